//! `towscan batch`: inspect every scene directory under a root and
//! aggregate the scores where ground truth is available.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use towscan_core::evaluation::{aggregate, evaluate, BatchReport, EvalReport};
use towscan_core::io;
use towscan_core::pipeline::{run_pipeline, Params};
use towscan_core::raster::DefectClass;

use crate::files;
use crate::report::{ParamArgs, Report};

#[derive(clap::Args, Debug)]
pub struct BatchArgs {
    /// Root whose immediate subdirectories each hold a scene.png
    /// (and, when available, a truth.png defect mask).
    #[arg(long, value_name = "DIR")]
    pub input: PathBuf,
    /// Output root; per-scene artifacts land under OUT/<name>/.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Worker threads (0 picks the machine default).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Record wall-clock pipeline time per scene.
    #[arg(long)]
    pub timings: bool,
}

/// One row of the aggregate: either counts (and a score when truth was
/// present) or the error that stopped the scene.
#[derive(Debug, Serialize)]
struct SceneEntry {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    boundaries: usize,
    pairs: usize,
    gap_pixels: usize,
    overlap_pixels: usize,
    warnings: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    eval: Option<EvalReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<f64>,
}

impl SceneEntry {
    fn failed(name: String, err: &anyhow::Error) -> Self {
        SceneEntry {
            name,
            error: Some(format!("{err:#}")),
            boundaries: 0,
            pairs: 0,
            gap_pixels: 0,
            overlap_pixels: 0,
            warnings: 0,
            eval: None,
            timing_ms: None,
        }
    }
}

#[derive(Debug, Serialize)]
struct Aggregate {
    input: String,
    params: Params,
    scenes: Vec<SceneEntry>,
    evaluated: usize,
    /// Scenes inspected without scoring because truth.png was absent.
    skipped_truth: Vec<String>,
    errors: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    batch: Option<BatchReport>,
}

pub fn run(args: &BatchArgs) -> Result<ExitCode> {
    let params = args.params.resolve()?;
    let dirs = scene_dirs(&args.input)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .context("building worker pool")?;
    let entries: Vec<SceneEntry> = pool.install(|| {
        dirs.par_iter()
            .map(|dir| {
                let name = dir
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default();
                process_scene(dir, &args.out.join(&name), &name, &params, args.timings)
                    .unwrap_or_else(|err| SceneEntry::failed(name, &err))
            })
            .collect()
    });

    let reports: Vec<EvalReport> = entries.iter().filter_map(|e| e.eval.clone()).collect();
    let skipped_truth: Vec<String> = entries
        .iter()
        .filter(|e| e.error.is_none() && e.eval.is_none())
        .map(|e| e.name.clone())
        .collect();
    let errors = entries.iter().filter(|e| e.error.is_some()).count();
    let summary = Aggregate {
        input: args.input.display().to_string(),
        params,
        evaluated: reports.len(),
        skipped_truth,
        errors,
        batch: aggregate(&reports),
        scenes: entries,
    };
    files::write_json(&args.out.join("aggregate.json"), &summary)?;

    for entry in &summary.scenes {
        if let Some(err) = &entry.error {
            eprintln!("error: {}: {err}", entry.name);
        }
    }
    match &summary.batch {
        Some(b) => println!(
            "{} scenes, {} evaluated, macro mean IoU {:.4}",
            summary.scenes.len(),
            summary.evaluated,
            b.macro_mean_iou
        ),
        None => println!("{} scenes, none evaluated", summary.scenes.len()),
    }
    Ok(if summary.errors == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

/// Immediate subdirectories containing scene.png, in name order so reruns
/// and varying thread counts produce identical aggregates.
fn scene_dirs(input: &Path) -> Result<Vec<PathBuf>> {
    let mut dirs = Vec::new();
    let entries = fs::read_dir(input).with_context(|| format!("reading {}", input.display()))?;
    for entry in entries {
        let path = entry?.path();
        if path.is_dir() && path.join("scene.png").is_file() {
            dirs.push(path);
        }
    }
    dirs.sort();
    Ok(dirs)
}

fn process_scene(
    dir: &Path,
    out_dir: &Path,
    name: &str,
    params: &Params,
    timings: bool,
) -> Result<SceneEntry> {
    let scene_path = dir.join("scene.png");
    let map = io::load_depth_map(&scene_path)
        .with_context(|| format!("loading {}", scene_path.display()))?;
    let start = Instant::now();
    let out = run_pipeline(&map, params)?;
    let timing_ms = timings.then(|| start.elapsed().as_secs_f64() * 1e3);

    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let report = Report::new(scene_path.display().to_string(), params, &out, timing_ms);
    files::write_json(&out_dir.join("report.json"), &report)?;
    files::write_png(&out_dir.join("mask.png"), |p| {
        io::save_defect_mask(&out.assembly.mask, p)
    })?;
    files::write_png(&out_dir.join("overlay.png"), |p| {
        io::save_overlay_png(&map, &out.assembly.mask, p)
    })?;

    let truth_path = dir.join("truth.png");
    let eval = if truth_path.is_file() {
        let truth = io::load_defect_mask(&truth_path)
            .with_context(|| format!("loading {}", truth_path.display()))?;
        Some(evaluate(&out.assembly.mask, &truth)?)
    } else {
        None
    };

    Ok(SceneEntry {
        name: name.to_string(),
        error: None,
        boundaries: out.boundaries.len(),
        pairs: out.pairing.pairs.len(),
        gap_pixels: out.assembly.mask.count(DefectClass::Gap),
        overlap_pixels: out.assembly.mask.count(DefectClass::Overlap),
        warnings: out.warnings.len(),
        eval,
        timing_ms,
    })
}
