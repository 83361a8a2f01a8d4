//! End-to-end defect detection: depth map in, classified defect regions out.
//!
//! Stages run in a fixed order: median denoise, Canny edges, horizontal
//! opening, polarity classification, per-polarity fragment grouping, merged
//! boundary splines, tow pairing, and per-column gap/overlap segmentation.
//! Every intermediate is kept on the output so callers can dump or inspect
//! any stage.

use crate::edges::{
    canny, classify_edges, gaussian_blur, open_horizontal, sobel_vertical, CannyParams,
};
use crate::error::{Error, Result};
use crate::preprocess::median_filter;
use crate::raster::{BinaryMask, DepthMap, PolarEdgeMap, Polarity};
use crate::segmentation::{
    assemble_mask, extract_regions, pair_boundaries, segment_pair, Assembly, DefectRegion,
    PairingOutcome,
};
use crate::towlines::{
    fit_boundary, group_regions, label_components, merge_group, GroupingParams, TowBoundary,
};

/// Tuning knobs for the full pipeline.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct Params {
    /// Median filter window edge; odd, 1 disables.
    pub median: u32,
    /// Gaussian smoothing sigma inside Canny and for polarity gradients.
    pub sigma: f64,
    /// Low hysteresis threshold as a fraction of the magnitude anchor.
    pub canny_low: f64,
    /// High hysteresis threshold as a fraction of the magnitude anchor.
    pub canny_high: f64,
    /// Horizontal opening structuring element length; 1 disables.
    pub se_length: u32,
    /// Horizontal weight in the fragment grouping distance.
    pub alpha_x: f64,
    /// Vertical weight in the fragment grouping distance.
    pub alpha_y: f64,
    /// Grouping distance threshold (strict).
    pub d_th: f64,
    /// Spline residual budget; `None` uses one per knot.
    pub spline_s: Option<f64>,
    /// Clearance below which a column counts as conformal.
    pub tolerance: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            median: 3,
            sigma: 2.0,
            canny_low: 0.4,
            canny_high: 1.0,
            se_length: 5,
            alpha_x: 1.0,
            alpha_y: 4.0,
            d_th: 30.0,
            spline_s: None,
            tolerance: 1.0,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        if self.median == 0 || self.median.is_multiple_of(2) {
            return Err(Error::EvenMedianWindow(self.median as usize));
        }
        self.canny_params().validate()?;
        if self.se_length == 0 {
            return Err(Error::InvalidParameter(
                "structuring element length must be positive".into(),
            ));
        }
        self.grouping_params().validate()?;
        if let Some(s) = self.spline_s {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "spline budget must be finite and nonnegative, got {s}"
                )));
            }
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be nonnegative, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }

    pub fn canny_params(&self) -> CannyParams {
        CannyParams {
            sigma: self.sigma,
            low_ratio: self.canny_low,
            high_ratio: self.canny_high,
        }
    }

    pub fn grouping_params(&self) -> GroupingParams {
        GroupingParams {
            alpha_x: self.alpha_x,
            alpha_y: self.alpha_y,
            d_th: self.d_th,
        }
    }
}

/// One fused fragment group, kept for diagnostics and stage rendering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryGroup {
    pub polarity: Polarity,
    /// Id shared with the boundary fitted from this group.
    pub group_id: u32,
    /// Union of member fragment pixels.
    pub pixels: Vec<(u32, u32)>,
    /// Merged one-point-per-column trace the spline was fitted to.
    pub polyline: Vec<(u32, u32)>,
}

/// Everything the pipeline produced, intermediates included.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub median: DepthMap,
    pub edges: BinaryMask,
    pub opened: BinaryMask,
    pub polarity: PolarEdgeMap,
    pub groups: Vec<BoundaryGroup>,
    /// Fitted boundaries, upper-polarity groups first; ids are 1-based and
    /// shared with `groups`.
    pub boundaries: Vec<TowBoundary>,
    pub pairing: PairingOutcome,
    pub assembly: Assembly,
    pub defects: Vec<DefectRegion>,
    /// Human-readable anomalies (unpaired boundaries, conflicts, ...).
    pub warnings: Vec<String>,
}

/// Runs the full pipeline on one depth map.
pub fn run_pipeline(img: &DepthMap, params: &Params) -> Result<PipelineOutput> {
    params.validate()?;
    let median = median_filter(img, params.median)?;
    let edges = canny(&median, &params.canny_params())?;
    let opened = open_horizontal(&edges, params.se_length)?;
    let gradient = sobel_vertical(&gaussian_blur(&median, params.sigma));
    let polarity = classify_edges(&opened, &gradient)?;

    let mut warnings = Vec::new();
    let mut groups = Vec::new();
    let mut boundaries = Vec::new();
    let mut next_id = 1u32;
    let gp = params.grouping_params();
    for pol in [Polarity::Upper, Polarity::Lower] {
        let regions = label_components(&polarity, pol);
        for members in group_regions(&regions, &gp)? {
            let fragments: Vec<_> = members.iter().map(|&i| regions[i].clone()).collect();
            let polyline = merge_group(&fragments)?;
            if polyline.len() < 2 {
                warnings.push(format!(
                    "group {next_id} ({pol}) spans a single column; skipped"
                ));
                next_id += 1;
                continue;
            }
            let s = params.spline_s.unwrap_or(polyline.len() as f64);
            boundaries.push(fit_boundary(pol, next_id, &polyline, s)?);
            let mut pixels: Vec<(u32, u32)> = fragments
                .iter()
                .flat_map(|r| r.pixels.iter().copied())
                .collect();
            pixels.sort_unstable_by_key(|&(c, r)| (r, c));
            groups.push(BoundaryGroup {
                polarity: pol,
                group_id: next_id,
                pixels,
                polyline,
            });
            next_id += 1;
        }
    }
    if boundaries.is_empty() {
        warnings.push("no tow boundaries detected".into());
    }

    let pairing = pair_boundaries(&boundaries);
    for &i in &pairing.unpaired {
        warnings.push(format!(
            "boundary {} ({}) not matched into any tow",
            boundaries[i].group_id, boundaries[i].polarity
        ));
    }

    let mut marks = Vec::new();
    for pair in &pairing.pairs {
        marks.extend(segment_pair(pair, params.tolerance)?);
    }
    let assembly = assemble_mask(&marks, img.width(), img.height());
    if assembly.conflict_pixels > 0 {
        warnings.push(format!(
            "{} pixels claimed as both gap and overlap; kept overlap",
            assembly.conflict_pixels
        ));
    }
    let defects = extract_regions(&assembly);

    Ok(PipelineOutput {
        median,
        edges,
        opened,
        polarity,
        groups,
        boundaries,
        pairing,
        assembly,
        defects,
        warnings,
    })
}
