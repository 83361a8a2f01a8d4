//! `towscan inspect`: run the pipeline on one scan and write artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use towscan_core::pipeline::{run_pipeline, PipelineOutput};
use towscan_core::raster::DepthMap;
use towscan_core::{io, render};

use crate::files;
use crate::report::{ParamArgs, Report};

#[derive(clap::Args, Debug)]
pub struct InspectArgs {
    /// Grayscale PNG depth map to inspect.
    pub image: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, short)]
    pub out: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Also dump numbered per-stage images under OUT/stages/.
    #[arg(long)]
    pub stages: bool,
    /// Record wall-clock pipeline time in the report.
    #[arg(long)]
    pub timings: bool,
}

pub fn run(args: &InspectArgs) -> Result<ExitCode> {
    let params = args.params.resolve()?;
    let map = io::load_depth_map(&args.image)
        .with_context(|| format!("loading {}", args.image.display()))?;

    let start = Instant::now();
    let out = run_pipeline(&map, &params)?;
    let timing_ms = args.timings.then(|| start.elapsed().as_secs_f64() * 1e3);

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let report = Report::new(args.image.display().to_string(), &params, &out, timing_ms);
    files::write_json(&args.out.join("report.json"), &report)?;
    files::write_png(&args.out.join("mask.png"), |p| {
        io::save_defect_mask(&out.assembly.mask, p)
    })?;
    files::write_png(&args.out.join("overlay.png"), |p| {
        io::save_overlay_png(&map, &out.assembly.mask, p)
    })?;
    if args.stages {
        write_stages(&args.out.join("stages"), &map, &out)?;
    }

    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{}: {} boundaries, {} pairs, {} gap px, {} overlap px, {} warnings",
        args.image.display(),
        out.boundaries.len(),
        out.pairing.pairs.len(),
        report.gap_pixels,
        report.overlap_pixels,
        out.warnings.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn write_stages(dir: &Path, map: &DepthMap, out: &PipelineOutput) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    files::write_png(&dir.join("01_median.png"), |p| {
        io::save_depth_png(&out.median, p)
    })?;
    files::write_png(&dir.join("02_edges.png"), |p| {
        io::save_mask_png(&out.edges, p)
    })?;
    files::write_png(&dir.join("03_opened.png"), |p| {
        io::save_mask_png(&out.opened, p)
    })?;
    files::write_png(&dir.join("04_polarity.png"), |p| {
        io::save_rgb_png(&render::render_polarity(&out.polarity), p)
    })?;
    files::write_png(&dir.join("05_groups.png"), |p| {
        io::save_rgb_png(
            &render::render_groups(&out.groups, map.width(), map.height()),
            p,
        )
    })?;
    files::write_png(&dir.join("06_boundaries.png"), |p| {
        io::save_rgb_png(&render::render_boundaries(map, &out.boundaries), p)
    })?;
    Ok(())
}
