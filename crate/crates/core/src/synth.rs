//! Synthetic depth scans with exact ground truth.
//!
//! Tows render as bright horizontal bands on a darker background; coverage
//! adds, so overlapping tows come out brighter (stacked material sits
//! higher). The ground-truth mask and boundary curves are derived from the
//! band geometry before any noise is applied, in the same strict-interior
//! row convention the segmentation stage uses, so synthetic truth and
//! pipeline output are directly comparable.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::raster::{DefectClass, DefectMask, DepthMap};

/// Horizontal course of one tow: a nominal top row plus sinusoidal drift.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TowCourse {
    /// Nominal top row of the band.
    pub top_row: f64,
    /// Drift amplitude in pixels.
    pub drift_amplitude: f64,
    /// Drift wavelength in pixels; must be positive.
    pub drift_wavelength: f64,
    /// Drift phase in radians.
    pub drift_phase: f64,
}

impl TowCourse {
    /// Straight course with no drift.
    pub fn flat(top_row: f64) -> Self {
        Self {
            top_row,
            drift_amplitude: 0.0,
            drift_wavelength: 64.0,
            drift_phase: 0.0,
        }
    }

    /// Real-valued top row at column `x`.
    pub fn top_at(&self, x: f64) -> f64 {
        self.top_row
            + self.drift_amplitude * (TAU * x / self.drift_wavelength + self.drift_phase).sin()
    }
}

/// Complete description of one synthetic scene.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SceneSpec {
    pub width: u32,
    pub height: u32,
    /// Band thickness in rows, identical for all tows.
    pub tow_height: u32,
    /// Single-coverage intensity; double coverage renders at
    /// `2 tow - background` (clamped), so keep it below `(1 + bg) / 2` to
    /// preserve equal edge contrast everywhere.
    pub tow_intensity: f64,
    pub background_intensity: f64,
    /// Courses ordered top to bottom.
    pub courses: Vec<TowCourse>,
    /// Probability a pixel flips to pure black or white (half each).
    pub salt_pepper_density: f64,
    /// Standard deviation of additive Gaussian texture.
    pub texture_sigma: f64,
    pub seed: u64,
}

impl SceneSpec {
    /// Builds a spec by stacking `offsets.len() + 1` tows: each next tow
    /// starts `tow_height + offset` rows below the previous one, so positive
    /// offsets leave gaps and negative ones overlap.
    #[allow(clippy::too_many_arguments)]
    pub fn from_offsets(
        width: u32,
        height: u32,
        tow_height: u32,
        tow_intensity: f64,
        background_intensity: f64,
        first_top: f64,
        offsets: &[f64],
        seed: u64,
    ) -> Self {
        let mut courses = vec![TowCourse::flat(first_top)];
        for &o in offsets {
            let prev = courses.last().unwrap().top_row;
            courses.push(TowCourse::flat(prev + tow_height as f64 + o));
        }
        Self {
            width,
            height,
            tow_height,
            tow_intensity,
            background_intensity,
            courses,
            salt_pepper_density: 0.0,
            texture_sigma: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 || self.tow_height == 0 {
            return Err(Error::InvalidScene(
                "width, height and tow_height must be positive".into(),
            ));
        }
        if !(0.0 <= self.background_intensity
            && self.background_intensity < self.tow_intensity
            && self.tow_intensity <= 1.0)
        {
            return Err(Error::InvalidScene(format!(
                "intensities must satisfy 0 <= background < tow <= 1, got {} and {}",
                self.background_intensity, self.tow_intensity
            )));
        }
        if !(0.0..1.0).contains(&self.salt_pepper_density) {
            return Err(Error::InvalidScene(format!(
                "salt-pepper density must be in [0, 1), got {}",
                self.salt_pepper_density
            )));
        }
        if !(self.texture_sigma >= 0.0 && self.texture_sigma.is_finite()) {
            return Err(Error::InvalidScene(format!(
                "texture sigma must be finite and nonnegative, got {}",
                self.texture_sigma
            )));
        }
        for pair in self.courses.windows(2) {
            // NaN compares false, so it also lands in the error branch.
            if pair[1].top_row.partial_cmp(&pair[0].top_row) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::InvalidScene(
                    "tow courses must be ordered top to bottom".into(),
                ));
            }
        }
        for (i, course) in self.courses.iter().enumerate() {
            if !(course.drift_wavelength.is_finite() && course.drift_wavelength > 0.0) {
                return Err(Error::InvalidScene(format!(
                    "course {i} has non-positive drift wavelength"
                )));
            }
            for x in 0..self.width {
                let top = integer_top(course, x);
                if top < 0 || top + self.tow_height as i64 > self.height as i64 {
                    return Err(Error::InvalidScene(format!(
                        "course {i} leaves the image at column {x}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// First integer row covered by the band: the band occupies the `tow_height`
/// integer rows in `[top, top + tow_height)`.
fn integer_top(course: &TowCourse, x: u32) -> i64 {
    course.top_at(x as f64).ceil() as i64
}

/// Exact boundary rows of one tow in the detected-edge convention: `upper`
/// is the last background row above the band, `lower` the last material row.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TowTruth {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

/// Generated scene: image, truth mask, and per-tow boundary curves.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub image: DepthMap,
    pub truth: DefectMask,
    pub curves: Vec<TowTruth>,
}

/// Renders a scene deterministically from its spec.
///
/// Truth is extracted from the band geometry before noise: for each pair of
/// consecutive tows the integer rows strictly between the facing edge rows
/// are gap where the bands separate and overlap where they intersect. Noise
/// is Gaussian texture first (clamped), then salt-and-pepper, so flipped
/// pixels stay at pure 0 or 1.
pub fn generate(spec: &SceneSpec) -> Result<Scene> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let n = spec.courses.len();
    let th = spec.tow_height as i64;

    // Coverage counts and truth, column by column.
    let mut coverage = vec![0u8; (w as usize) * (h as usize)];
    let mut truth = DefectMask::neutral(w, h);
    let mut curves = vec![
        TowTruth {
            upper: Vec::with_capacity(w as usize),
            lower: Vec::with_capacity(w as usize),
        };
        n
    ];
    for x in 0..w {
        let tops: Vec<i64> = spec.courses.iter().map(|c| integer_top(c, x)).collect();
        for (i, &top) in tops.iter().enumerate() {
            for r in top..top + th {
                coverage[r as usize * w as usize + x as usize] += 1;
            }
            curves[i].upper.push((top - 1) as f64);
            curves[i].lower.push((top + th - 1) as f64);
        }
        for i in 0..n.saturating_sub(1) {
            let y_l = tops[i] + th - 1;
            let y_u = tops[i + 1] - 1;
            let (class, lo, hi) = match y_u - y_l {
                d if d > 0 => (DefectClass::Gap, y_l + 1, y_u - 1),
                d if d < 0 => (DefectClass::Overlap, y_u + 1, y_l - 1),
                _ => continue,
            };
            for r in lo.max(0)..=hi.min(h as i64 - 1) {
                truth.set(x, r as u32, class);
            }
        }
    }

    let contrast = spec.tow_intensity - spec.background_intensity;
    let mut pixels: Vec<f64> = coverage
        .iter()
        .map(|&c| (spec.background_intensity + c as f64 * contrast).clamp(0.0, 1.0))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    if spec.texture_sigma > 0.0 {
        let normal = Normal::new(0.0, spec.texture_sigma).expect("sigma validated");
        for v in &mut pixels {
            *v = (*v + normal.sample(&mut rng)).clamp(0.0, 1.0);
        }
    }
    if spec.salt_pepper_density > 0.0 {
        let d = spec.salt_pepper_density;
        for v in &mut pixels {
            let u: f64 = rng.gen();
            if u < d / 2.0 {
                *v = 0.0;
            } else if u < d {
                *v = 1.0;
            }
        }
    }

    Ok(Scene {
        image: DepthMap::from_parts(w, h, pixels),
        truth,
        curves,
    })
}

/// Thin bright band on a dark ground; the regression fixture for median
/// window sizing. Its top edge is a step that small windows must preserve
/// and windows taller than `2 band_height + 1` wipe out.
pub fn band_fixture(
    width: u32,
    height: u32,
    band_top: u32,
    band_height: u32,
    background: f64,
    band: f64,
) -> Result<DepthMap> {
    if band_top + band_height > height {
        return Err(Error::InvalidScene("band leaves the image".into()));
    }
    DepthMap::from_fn(width, height, |_, y| {
        if (band_top..band_top + band_height).contains(&y) {
            band
        } else {
            background
        }
    })
}

/// Uniform sampling ranges for corpus generation. Inclusive (lo, hi) pairs;
/// a degenerate pair pins the parameter.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CorpusRanges {
    pub width: u32,
    pub height: u32,
    pub tows: (u32, u32),
    pub tow_height: (u32, u32),
    pub first_top: (u32, u32),
    /// Inter-tow offsets in pixels; negative overlaps, positive gaps.
    pub offset: (i32, i32),
    pub drift_amplitude: (f64, f64),
    pub drift_wavelength: (f64, f64),
    pub tow_intensity: f64,
    pub background_intensity: f64,
    pub salt_pepper_density: f64,
    pub texture_sigma: f64,
}

impl CorpusRanges {
    fn validate(&self) -> Result<()> {
        if self.tows.0 > self.tows.1 || self.tows.0 == 0 {
            return Err(Error::EmptyRange("tows"));
        }
        if self.tow_height.0 > self.tow_height.1 || self.tow_height.0 == 0 {
            return Err(Error::EmptyRange("tow_height"));
        }
        if self.first_top.0 > self.first_top.1 {
            return Err(Error::EmptyRange("first_top"));
        }
        if self.offset.0 > self.offset.1 {
            return Err(Error::EmptyRange("offset"));
        }
        if !(self.drift_amplitude.0 <= self.drift_amplitude.1 && self.drift_amplitude.0 >= 0.0) {
            return Err(Error::EmptyRange("drift_amplitude"));
        }
        if !(self.drift_wavelength.0 <= self.drift_wavelength.1 && self.drift_wavelength.0 > 0.0) {
            return Err(Error::EmptyRange("drift_wavelength"));
        }
        Ok(())
    }
}

/// A reproducible corpus: the sampled per-scene specs plus provenance.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CorpusManifest {
    pub seed: u64,
    pub ranges: CorpusRanges,
    pub scenes: Vec<SceneSpec>,
}

fn sample_f64(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    if range.0 == range.1 {
        range.0
    } else {
        rng.gen_range(range.0..=range.1)
    }
}

/// Samples `n` scene specs uniformly from `ranges`, reproducibly from
/// `seed`. Scene seeds derive from the master stream, so individual scenes
/// can later be generated independently (and in parallel).
///
/// Drift is sampled once per scene and shared by every course: adjacent
/// courses follow the same tool path, so placement wobble moves them
/// together and the inter-tow offsets (the defects) stay constant along the
/// scan. Independent per-course drift would instead make touching tows
/// cross, and a zero-contrast conformal joint carries no signal to detect.
pub fn corpus(n: usize, ranges: &CorpusRanges, seed: u64) -> Result<CorpusManifest> {
    if n == 0 {
        return Err(Error::EmptyRange("scene count"));
    }
    ranges.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scenes = Vec::with_capacity(n);
    for _ in 0..n {
        let tows = rng.gen_range(ranges.tows.0..=ranges.tows.1);
        let tow_height = rng.gen_range(ranges.tow_height.0..=ranges.tow_height.1);
        let first_top = rng.gen_range(ranges.first_top.0..=ranges.first_top.1);
        let drift_amplitude = sample_f64(&mut rng, ranges.drift_amplitude);
        let drift_wavelength = sample_f64(&mut rng, ranges.drift_wavelength);
        let drift_phase = sample_f64(&mut rng, (0.0, TAU));
        let mut courses = Vec::with_capacity(tows as usize);
        let mut top = first_top as f64;
        for i in 0..tows {
            if i > 0 {
                let offset = rng.gen_range(ranges.offset.0..=ranges.offset.1);
                top += tow_height as f64 + offset as f64;
            }
            courses.push(TowCourse {
                top_row: top,
                drift_amplitude,
                drift_wavelength,
                drift_phase,
            });
        }
        let spec = SceneSpec {
            width: ranges.width,
            height: ranges.height,
            tow_height,
            tow_intensity: ranges.tow_intensity,
            background_intensity: ranges.background_intensity,
            courses,
            salt_pepper_density: ranges.salt_pepper_density,
            texture_sigma: ranges.texture_sigma,
            seed: rng.gen(),
        };
        spec.validate()?;
        scenes.push(spec);
    }
    Ok(CorpusManifest {
        seed,
        ranges: ranges.clone(),
        scenes,
    })
}
