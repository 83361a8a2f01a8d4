//! `towscan eval`: score a predicted defect mask against ground truth.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use towscan_core::evaluation::evaluate;
use towscan_core::io::load_defect_mask;

#[derive(clap::Args, Debug)]
pub struct EvalArgs {
    /// Predicted defect mask PNG (as written by `inspect`).
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth defect mask PNG (as written by `synth`).
    #[arg(long)]
    pub truth: PathBuf,
}

pub fn run(args: &EvalArgs) -> Result<ExitCode> {
    let pred =
        load_defect_mask(&args.pred).with_context(|| format!("loading {}", args.pred.display()))?;
    let truth = load_defect_mask(&args.truth)
        .with_context(|| format!("loading {}", args.truth.display()))?;
    let report = evaluate(&pred, &truth)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}
