//! Edge extraction and polarity classification.
//!
//! The stage chain is Canny (Gaussian blur, Sobel, non-maximum suppression,
//! hysteresis), then a horizontal morphological opening that keeps only
//! near-horizontal edge runs, then a sign classification of the vertical
//! gradient into upper/lower tow boundaries.
//!
//! Sign convention used throughout: a positive vertical gradient means
//! intensity grows with the row index (dark above, bright below), which marks
//! an upper tow boundary; negative marks a lower boundary.

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, DepthMap, PolarEdgeMap, Polarity, SignedGradientMap};

/// Canny configuration.
///
/// `low_ratio` and `high_ratio` scale the hysteresis thresholds relative to
/// the magnitude anchor, which is the 90th percentile (nearest rank) of the
/// nonzero gradient magnitudes of the blurred image.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CannyParams {
    /// Gaussian blur standard deviation in pixels; kernel radius is `ceil(3 sigma)`.
    pub sigma: f64,
    /// Low hysteresis threshold as a fraction of the anchor.
    pub low_ratio: f64,
    /// High hysteresis threshold as a fraction of the anchor.
    pub high_ratio: f64,
}

impl Default for CannyParams {
    fn default() -> Self {
        Self {
            sigma: 2.0,
            low_ratio: 0.4,
            high_ratio: 1.0,
        }
    }
}

impl CannyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidCannyParams(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if !(self.low_ratio > 0.0 && self.low_ratio < self.high_ratio && self.high_ratio <= 1.0) {
            return Err(Error::InvalidCannyParams(format!(
                "ratios must satisfy 0 < low < high <= 1, got low={} high={}",
                self.low_ratio, self.high_ratio
            )));
        }
        Ok(())
    }
}

/// Separable Gaussian blur with a truncated kernel of radius `ceil(3 sigma)`
/// and replicated borders. The kernel is normalized, so `[0, 1]` inputs stay
/// in `[0, 1]`.
pub fn gaussian_blur(img: &DepthMap, sigma: f64) -> DepthMap {
    let radius = (3.0 * sigma).ceil() as i64;
    let mut kernel = Vec::with_capacity((2 * radius + 1) as usize);
    for i in -radius..=radius {
        kernel.push((-((i * i) as f64) / (2.0 * sigma * sigma)).exp());
    }
    let sum: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= sum;
    }

    let (w, h) = (img.width(), img.height());
    let mut horizontal = Vec::with_capacity((w as usize) * (h as usize));
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, k) in kernel.iter().enumerate() {
                acc += k * img.get_clamped(x as i64 + i as i64 - radius, y as i64);
            }
            horizontal.push(acc);
        }
    }
    let mid = DepthMap::from_parts(w, h, horizontal);
    let mut out = Vec::with_capacity((w as usize) * (h as usize));
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, k) in kernel.iter().enumerate() {
                acc += k * mid.get_clamped(x as i64, y as i64 + i as i64 - radius);
            }
            out.push(acc);
        }
    }
    DepthMap::from_parts(w, h, out)
}

/// Weighted 1-2-1 sum of three samples. Both Sobel half-stencils use this
/// same expression, so equal triples produce bitwise-equal sums and their
/// difference is exactly zero on uniform regions.
#[inline]
fn smooth3(a: f64, b: f64, c: f64) -> f64 {
    a + 2.0 * b + c
}

/// Vertical Sobel response: positive where intensity increases with the row
/// index (dark above, bright below), the signature of an upper tow boundary.
/// Borders replicate, so the output covers the full grid.
pub fn sobel_vertical(img: &DepthMap) -> SignedGradientMap {
    let (w, h) = (img.width(), img.height());
    let mut out = Vec::with_capacity((w as usize) * (h as usize));
    for y in 0..h {
        for x in 0..w {
            let (xi, yi) = (x as i64, y as i64);
            let below = smooth3(
                img.get_clamped(xi - 1, yi + 1),
                img.get_clamped(xi, yi + 1),
                img.get_clamped(xi + 1, yi + 1),
            );
            let above = smooth3(
                img.get_clamped(xi - 1, yi - 1),
                img.get_clamped(xi, yi - 1),
                img.get_clamped(xi + 1, yi - 1),
            );
            out.push(below - above);
        }
    }
    SignedGradientMap::from_parts(w, h, out)
}

/// Horizontal Sobel response: positive where intensity increases with the
/// column index.
pub fn sobel_horizontal(img: &DepthMap) -> SignedGradientMap {
    let (w, h) = (img.width(), img.height());
    let mut out = Vec::with_capacity((w as usize) * (h as usize));
    for y in 0..h {
        for x in 0..w {
            let (xi, yi) = (x as i64, y as i64);
            let right = smooth3(
                img.get_clamped(xi + 1, yi - 1),
                img.get_clamped(xi + 1, yi),
                img.get_clamped(xi + 1, yi + 1),
            );
            let left = smooth3(
                img.get_clamped(xi - 1, yi - 1),
                img.get_clamped(xi - 1, yi),
                img.get_clamped(xi - 1, yi + 1),
            );
            out.push(right - left);
        }
    }
    SignedGradientMap::from_parts(w, h, out)
}

/// Canny edge detector.
///
/// Stages: Gaussian blur, Sobel magnitude/direction, non-maximum suppression
/// quantized to four directions, double-threshold hysteresis with 8-connected
/// linking. Output edges are one pixel thick along the gradient direction;
/// the outermost pixel ring never carries edges.
pub fn canny(img: &DepthMap, p: &CannyParams) -> Result<BinaryMask> {
    p.validate()?;
    if img.width() < 3 || img.height() < 3 {
        return Err(Error::ImageTooSmall {
            width: img.width(),
            height: img.height(),
            min: 3,
        });
    }
    let blurred = gaussian_blur(img, p.sigma);
    let gx = sobel_horizontal(&blurred);
    let gy = sobel_vertical(&blurred);
    let (w, h) = (img.width(), img.height());
    let mut mag = vec![0.0f64; (w as usize) * (h as usize)];
    for (i, m) in mag.iter_mut().enumerate() {
        *m = gx.values()[i].hypot(gy.values()[i]);
    }

    let mut nonzero: Vec<f64> = mag.iter().copied().filter(|&m| m > 0.0).collect();
    if nonzero.is_empty() {
        return Ok(BinaryMask::empty(w, h));
    }
    nonzero.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Nearest-rank 90th percentile: 1-based rank ceil(0.9 n).
    let rank = ((0.9 * nonzero.len() as f64).ceil() as usize).max(1);
    let anchor = nonzero[rank - 1];
    let high = p.high_ratio * anchor;
    let low = p.low_ratio * anchor;

    let thinned = non_maximum_suppression(&mag, &gx, &gy, w, h);

    // Hysteresis: seed at strong survivors, flood 8-connected through weak
    // survivors. The queue is per-image; no cross-image state.
    let mut out = BinaryMask::empty(w, h);
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let m = thinned[y as usize * w as usize + x as usize];
            if m >= high && m > 0.0 && !out.get(x, y) {
                out.set(x, y, true);
                stack.push((x, y));
                while let Some((cx, cy)) = stack.pop() {
                    for dy in -1i64..=1 {
                        for dx in -1i64..=1 {
                            if dx == 0 && dy == 0 {
                                continue;
                            }
                            let nx = cx as i64 + dx;
                            let ny = cy as i64 + dy;
                            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                                continue;
                            }
                            let (nx, ny) = (nx as u32, ny as u32);
                            let nm = thinned[ny as usize * w as usize + nx as usize];
                            if nm >= low && nm > 0.0 && !out.get(nx, ny) {
                                out.set(nx, ny, true);
                                stack.push((nx, ny));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Relative near-tie band for NMS magnitude comparisons.
///
/// A symmetric intensity step gives its two adjacent rows mathematically
/// equal gradient magnitudes; summation-order noise and the far tail of a
/// neighboring edge's blur kernel can split that tie by a sub-permille
/// amount and flip which row survives. Treating differences below one part
/// in 1e3 as ties keeps suppression deterministic and anchored to the
/// smaller-row side. Genuine maxima differ from their neighbors by orders
/// of magnitude more.
const NMS_TIE_EPS: f64 = 1e-3;

/// True when `a` exceeds `b` by more than the near-tie band.
fn definitely_greater(a: f64, b: f64) -> bool {
    a - b > NMS_TIE_EPS * a.abs().max(b.abs())
}

/// Non-maximum suppression over 4 quantized directions.
///
/// Tie handling keeps exactly one pixel of an equal-magnitude plateau: the
/// comparison is strict against the neighbor on the smaller-row (or, for the
/// horizontal direction, smaller-column) side and non-strict against the
/// other. A symmetric two-row step therefore keeps its upper row.
fn non_maximum_suppression(
    mag: &[f64],
    gx: &SignedGradientMap,
    gy: &SignedGradientMap,
    w: u32,
    h: u32,
) -> Vec<f64> {
    let mut out = vec![0.0f64; mag.len()];
    let at = |x: u32, y: u32| mag[y as usize * w as usize + x as usize];
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let m = at(x, y);
            if m == 0.0 {
                continue;
            }
            let mut angle = gy.get(x, y).atan2(gx.get(x, y)).to_degrees();
            if angle < 0.0 {
                angle += 180.0;
            }
            // (before, after): before is the smaller-row / smaller-column side.
            let (before, after) = if !(22.5..157.5).contains(&angle) {
                (at(x - 1, y), at(x + 1, y))
            } else if angle < 67.5 {
                (at(x - 1, y - 1), at(x + 1, y + 1))
            } else if angle < 112.5 {
                (at(x, y - 1), at(x, y + 1))
            } else {
                (at(x + 1, y - 1), at(x - 1, y + 1))
            };
            if definitely_greater(m, before) && !definitely_greater(after, m) {
                out[y as usize * w as usize + x as usize] = m;
            }
        }
    }
    out
}

/// Morphological opening with a 1 x `se_len` horizontal line.
///
/// Equivalent to the union of every structuring-element placement fully
/// contained in the input: horizontal runs of length >= `se_len` survive
/// exactly, shorter runs and strictly non-horizontal strokes vanish.
pub fn open_horizontal(mask: &BinaryMask, se_len: u32) -> Result<BinaryMask> {
    if se_len == 0 {
        return Err(Error::InvalidParameter(
            "structuring element length must be at least 1".into(),
        ));
    }
    let (w, h) = (mask.width(), mask.height());
    let anchor = ((se_len - 1) / 2) as i64;
    let len = se_len as i64;

    // Erosion: keep p when every SE offset lands in-bounds on a set pixel.
    let mut eroded = BinaryMask::empty(w, h);
    for y in 0..h {
        'px: for x in 0..w {
            for i in 0..len {
                let nx = x as i64 + i - anchor;
                if nx < 0 || nx >= w as i64 || !mask.get(nx as u32, y) {
                    continue 'px;
                }
            }
            eroded.set(x, y, true);
        }
    }
    // Dilation: paint the SE at every surviving pixel.
    let mut out = BinaryMask::empty(w, h);
    for y in 0..h {
        for x in 0..w {
            if eroded.get(x, y) {
                for i in 0..len {
                    let nx = x as i64 + i - anchor;
                    if (0..w as i64).contains(&nx) {
                        out.set(nx as u32, y, true);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Labels each edge pixel as an upper or lower tow boundary by the sign of
/// the vertical gradient. Zero-gradient pixels fall back to the sign of the
/// in-bounds 3x3 neighborhood sum; an exactly zero sum drops the pixel.
pub fn classify_edges(edges: &BinaryMask, g: &SignedGradientMap) -> Result<PolarEdgeMap> {
    if edges.width() != g.width() || edges.height() != g.height() {
        return Err(Error::DimensionMismatch {
            a_width: edges.width(),
            a_height: edges.height(),
            b_width: g.width(),
            b_height: g.height(),
        });
    }
    let (w, h) = (edges.width(), edges.height());
    let mut out = PolarEdgeMap::unlabeled(w, h);
    for (x, y) in edges.set_pixels() {
        let v = g.get(x, y);
        let label = if v > 0.0 {
            Some(Polarity::Upper)
        } else if v < 0.0 {
            Some(Polarity::Lower)
        } else {
            let mut sum = 0.0;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let nx = x as i64 + dx;
                    let ny = y as i64 + dy;
                    if (0..w as i64).contains(&nx) && (0..h as i64).contains(&ny) {
                        sum += g.get(nx as u32, ny as u32);
                    }
                }
            }
            if sum > 0.0 {
                Some(Polarity::Upper)
            } else if sum < 0.0 {
                Some(Polarity::Lower)
            } else {
                None
            }
        };
        out.set(x, y, label);
    }
    Ok(out)
}
