//! `towscan`: gap/overlap inspection for fiber-placement depth scans.

mod batch;
mod eval;
mod files;
mod inspect;
mod report;
mod synth;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "towscan",
    version,
    about = "Detects and scores gap/overlap defects in tow-placement depth scans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the detection pipeline on one depth-map PNG.
    Inspect(inspect::InspectArgs),
    /// Score a predicted defect mask against a ground-truth mask.
    Eval(eval::EvalArgs),
    /// Render a synthetic scene with exact ground truth.
    Synth(synth::SynthArgs),
    /// Inspect (and score, where truth exists) every scene directory under a root.
    Batch(batch::BatchArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Inspect(args) => inspect::run(&args),
        Command::Eval(args) => eval::run(&args),
        Command::Synth(args) => synth::run(&args),
        Command::Batch(args) => batch::run(&args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
