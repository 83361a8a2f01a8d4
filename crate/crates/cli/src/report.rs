//! JSON report emitted by `inspect` and `batch`, plus the shared pipeline
//! parameter flags.

use std::path::PathBuf;

use anyhow::Result;
use serde::Serialize;
use towscan_core::pipeline::{Params, PipelineOutput};
use towscan_core::raster::{DefectClass, Polarity};

use crate::files;

/// Pipeline tuning flags shared by `inspect` and `batch`.
///
/// Resolution order: built-in defaults, then `--config`, then explicit
/// flags, so a config file can be partially overridden per run.
#[derive(clap::Args, Debug, Clone)]
pub struct ParamArgs {
    /// JSON file of pipeline parameters; omitted fields keep defaults.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Median filter window edge (odd; 1 disables).
    #[arg(long)]
    pub median: Option<u32>,
    /// Gaussian smoothing sigma in pixels.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Low hysteresis threshold as a fraction of the magnitude anchor.
    #[arg(long)]
    pub canny_low: Option<f64>,
    /// High hysteresis threshold as a fraction of the magnitude anchor.
    #[arg(long)]
    pub canny_high: Option<f64>,
    /// Horizontal opening structuring element length (1 disables).
    #[arg(long)]
    pub se_length: Option<u32>,
    /// Horizontal weight in the fragment grouping distance.
    #[arg(long)]
    pub alpha_x: Option<f64>,
    /// Vertical weight in the fragment grouping distance.
    #[arg(long)]
    pub alpha_y: Option<f64>,
    /// Fragment grouping distance threshold.
    #[arg(long)]
    pub d_th: Option<f64>,
    /// Spline residual budget; defaults to one per knot.
    #[arg(long)]
    pub spline_s: Option<f64>,
    /// Clearance in pixels below which a column counts as conformal.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

impl ParamArgs {
    pub fn resolve(&self) -> Result<Params> {
        let mut p: Params = match &self.config {
            Some(path) => files::read_json(path)?,
            None => Params::default(),
        };
        if let Some(v) = self.median {
            p.median = v;
        }
        if let Some(v) = self.sigma {
            p.sigma = v;
        }
        if let Some(v) = self.canny_low {
            p.canny_low = v;
        }
        if let Some(v) = self.canny_high {
            p.canny_high = v;
        }
        if let Some(v) = self.se_length {
            p.se_length = v;
        }
        if let Some(v) = self.alpha_x {
            p.alpha_x = v;
        }
        if let Some(v) = self.alpha_y {
            p.alpha_y = v;
        }
        if let Some(v) = self.d_th {
            p.d_th = v;
        }
        if let Some(v) = self.spline_s {
            p.spline_s = Some(v);
        }
        if let Some(v) = self.tolerance {
            p.tolerance = v;
        }
        p.validate()?;
        Ok(p)
    }
}

/// Per-image machine-readable inspection result.
#[derive(Debug, Serialize)]
pub struct Report {
    pub image: String,
    pub width: u32,
    pub height: u32,
    pub params: Params,
    pub boundaries: Vec<BoundaryReport>,
    pub pairs: Vec<PairReport>,
    /// Group ids of boundaries that joined no tow pair.
    pub unpaired: Vec<u32>,
    pub defects: Vec<DefectReport>,
    pub gap_pixels: usize,
    pub overlap_pixels: usize,
    /// Cells claimed by both classes before overlap-wins resolution.
    pub conflict_pixels: usize,
    pub warnings: Vec<String>,
    /// Wall-clock pipeline time; present only under --timings so default
    /// outputs stay byte-reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct BoundaryReport {
    pub polarity: Polarity,
    pub group_id: u32,
    pub domain: (f64, f64),
    pub median_row: f64,
    /// Merged one-point-per-column trace the spline was fitted to.
    pub knots: Vec<(f64, f64)>,
}

#[derive(Debug, Serialize)]
pub struct PairReport {
    /// Group id of the upper tow's bottom boundary.
    pub upper_tow_lower: u32,
    /// Group id of the lower tow's top boundary.
    pub lower_tow_upper: u32,
    pub shared_domain: (f64, f64),
}

#[derive(Debug, Serialize)]
pub struct DefectReport {
    pub class: DefectClass,
    /// (min_col, min_row, max_col, max_row), inclusive.
    pub bbox: (u32, u32, u32, u32),
    pub area_px: usize,
    pub max_width_px: f64,
}

impl Report {
    pub fn new(
        image: String,
        params: &Params,
        out: &PipelineOutput,
        timing_ms: Option<f64>,
    ) -> Self {
        let boundaries = out
            .boundaries
            .iter()
            .map(|b| BoundaryReport {
                polarity: b.polarity,
                group_id: b.group_id,
                domain: b.domain(),
                median_row: b.median_row(),
                knots: b.knots.clone(),
            })
            .collect();
        let pairs = out
            .pairing
            .pair_indices
            .iter()
            .zip(&out.pairing.pairs)
            .map(|(&(u, l), pair)| PairReport {
                upper_tow_lower: out.boundaries[u].group_id,
                lower_tow_upper: out.boundaries[l].group_id,
                shared_domain: pair.shared_domain,
            })
            .collect();
        let unpaired = out
            .pairing
            .unpaired
            .iter()
            .map(|&i| out.boundaries[i].group_id)
            .collect();
        let defects = out
            .defects
            .iter()
            .map(|d| DefectReport {
                class: d.class,
                bbox: d.bbox,
                area_px: d.area,
                max_width_px: d.max_width,
            })
            .collect();
        Report {
            image,
            width: out.median.width(),
            height: out.median.height(),
            params: params.clone(),
            boundaries,
            pairs,
            unpaired,
            defects,
            gap_pixels: out.assembly.mask.count(DefectClass::Gap),
            overlap_pixels: out.assembly.mask.count(DefectClass::Overlap),
            conflict_pixels: out.assembly.conflict_pixels,
            warnings: out.warnings.clone(),
            timing_ms,
        }
    }
}
