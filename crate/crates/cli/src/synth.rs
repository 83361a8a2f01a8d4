//! `towscan synth`: render a synthetic scene with exact ground truth.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use serde::Serialize;
use towscan_core::io;
use towscan_core::synth::{generate, SceneSpec, TowTruth};

use crate::files;

#[derive(clap::Args, Debug)]
pub struct SynthArgs {
    /// Scene spec JSON (see SceneSpec in the core crate).
    #[arg(long, value_name = "FILE")]
    pub spec: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, short)]
    pub out: PathBuf,
    /// Override the spec's seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Serialize)]
struct TruthCurves<'a> {
    /// One entry per tow, top to bottom.
    tows: &'a [TowTruth],
}

pub fn run(args: &SynthArgs) -> Result<ExitCode> {
    let mut spec: SceneSpec = files::read_json(&args.spec)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let scene = generate(&spec)?;

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    files::write_png(&args.out.join("scene.png"), |p| {
        io::save_depth_png(&scene.image, p)
    })?;
    files::write_png(&args.out.join("truth.png"), |p| {
        io::save_defect_mask(&scene.truth, p)
    })?;
    files::write_json(
        &args.out.join("truth_curves.json"),
        &TruthCurves {
            tows: &scene.curves,
        },
    )?;
    // The manifest echoes the fully resolved spec (seed overrides applied)
    // so the scene can be regenerated from the output directory alone.
    files::write_json(&args.out.join("manifest.json"), &spec)?;

    println!(
        "wrote {}x{} scene with {} tow(s) to {}",
        spec.width,
        spec.height,
        spec.courses.len(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}
