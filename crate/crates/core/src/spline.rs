//! Natural cubic smoothing splines for boundary reconstruction.
//!
//! A fit minimizes curve roughness (integral of the squared second
//! derivative) subject to a residual budget: the sum of squared deviations
//! from the samples may not exceed the smoothing factor `s`. `s = 0` yields
//! the interpolating natural cubic spline; a generous `s` collapses to the
//! least-squares line, the roughness-free optimum.
//!
//! The solver follows the classic banded formulation: with `Q` the second
//! divided-difference matrix and `R` the curvature Gram matrix, the interior
//! curvatures solve `(R + lambda QtQ) gamma = Qt y` and the fitted values are
//! `g = y - lambda Q gamma`. The residual norm grows monotonically with
//! `lambda`, so the residual budget is met by bisection on `lambda`.

use crate::error::{Error, Result};

/// Fitted natural cubic spline: knot positions, fitted values and second
/// derivatives (zero at both ends).
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingSpline {
    x: Vec<f64>,
    g: Vec<f64>,
    m: Vec<f64>,
}

impl SmoothingSpline {
    /// Fits a smoothing spline through `(x, y)` samples with residual budget `s`.
    ///
    /// `x` must be strictly increasing with at least 2 entries. With fewer
    /// than 4 points the fit degrades to piecewise-linear interpolation.
    pub fn fit(x: &[f64], y: &[f64], s: f64) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::TooFewPoints(x.len()));
        }
        assert_eq!(x.len(), y.len(), "knot coordinate arrays must match");
        for i in 1..x.len() {
            // NaN compares false, so it also lands in the error branch.
            if x[i].partial_cmp(&x[i - 1]) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::NonMonotoneColumns(i));
            }
        }
        if s < 0.0 || !s.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "smoothing factor must be finite and nonnegative, got {s}"
            )));
        }
        let n = x.len();
        if n < 4 {
            // Too few points for a cubic; linear interpolation has zero
            // residual and zero roughness between knots.
            return Ok(Self {
                x: x.to_vec(),
                g: y.to_vec(),
                m: vec![0.0; n],
            });
        }

        let sys = BandedSystem::new(x, y);
        if s == 0.0 {
            let gamma = sys.solve(0.0);
            return Ok(Self::from_gamma(x, y, &gamma, 0.0, &sys));
        }

        // A least-squares line is the roughness optimum; accept it outright
        // when it fits within the residual budget.
        let (a, b) = least_squares_line(x, y);
        let rss_line: f64 = x
            .iter()
            .zip(y)
            .map(|(&xi, &yi)| {
                let r = yi - (a + b * xi);
                r * r
            })
            .sum();
        if rss_line <= s {
            return Ok(Self {
                x: x.to_vec(),
                g: x.iter().map(|&xi| a + b * xi).collect(),
                m: vec![0.0; n],
            });
        }

        // Residual grows monotonically with lambda from 0 toward rss_line > s,
        // so a bracketing lambda always exists.
        let mut hi = 1.0;
        while sys.rss(hi) < s {
            hi *= 4.0;
            if !hi.is_finite() {
                break;
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if sys.rss(mid) <= s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Take the feasible end of the bracket so RSS <= s holds.
        let lambda = lo;
        let gamma = sys.solve(lambda);
        Ok(Self::from_gamma(x, y, &gamma, lambda, &sys))
    }

    fn from_gamma(x: &[f64], y: &[f64], gamma: &[f64], lambda: f64, sys: &BandedSystem) -> Self {
        let n = x.len();
        let qg = sys.q_times(gamma);
        let mut g = Vec::with_capacity(n);
        for i in 0..n {
            g.push(y[i] - lambda * qg[i]);
        }
        let mut m = vec![0.0; n];
        m[1..n - 1].copy_from_slice(gamma);
        Self {
            x: x.to_vec(),
            g,
            m,
        }
    }

    /// Inclusive evaluation domain `[first knot, last knot]`.
    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Evaluates the spline; `at` outside the domain is an error.
    pub fn evaluate(&self, at: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(at >= lo && at <= hi) {
            return Err(Error::OutOfDomain { x: at, lo, hi });
        }
        // Interval index: last i with x[i] <= at, clamped so at == hi uses
        // the final interval.
        let i = match self.x.partition_point(|&xi| xi <= at) {
            0 => 0,
            p => (p - 1).min(self.x.len() - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let d0 = self.x[i + 1] - at;
        let d1 = at - self.x[i];
        let v = self.m[i] * d0 * d0 * d0 / (6.0 * h)
            + self.m[i + 1] * d1 * d1 * d1 / (6.0 * h)
            + (self.g[i] / h - self.m[i] * h / 6.0) * d0
            + (self.g[i + 1] / h - self.m[i + 1] * h / 6.0) * d1;
        Ok(v)
    }

    /// Fitted values at the knots.
    pub fn knot_values(&self) -> &[f64] {
        &self.g
    }

    /// Sum of squared residuals against the original samples.
    pub fn residual_sum_squares(&self, y: &[f64]) -> f64 {
        self.g
            .iter()
            .zip(y)
            .map(|(&gi, &yi)| (gi - yi) * (gi - yi))
            .sum()
    }
}

fn least_squares_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    // x strictly increasing implies sxx > 0.
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Banded matrices of the smoothing system for fixed knots. `Q` is stored by
/// its three diagonals, `R` by two, `QtQ` by three; all derived from the knot
/// spacings once and reused across bisection iterations.
struct BandedSystem {
    q_top: Vec<f64>,
    q_mid: Vec<f64>,
    q_bot: Vec<f64>,
    r_diag: Vec<f64>,
    r_off: Vec<f64>,
    qtq_d0: Vec<f64>,
    qtq_d1: Vec<f64>,
    qtq_d2: Vec<f64>,
    qty: Vec<f64>,
}

impl BandedSystem {
    fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        let k = n - 2;
        let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
        let mut q_top = Vec::with_capacity(k);
        let mut q_mid = Vec::with_capacity(k);
        let mut q_bot = Vec::with_capacity(k);
        let mut r_diag = Vec::with_capacity(k);
        let mut r_off = Vec::with_capacity(k.saturating_sub(1));
        let mut qty = Vec::with_capacity(k);
        for c in 0..k {
            q_top.push(1.0 / h[c]);
            q_mid.push(-1.0 / h[c] - 1.0 / h[c + 1]);
            q_bot.push(1.0 / h[c + 1]);
            r_diag.push((h[c] + h[c + 1]) / 3.0);
            if c + 1 < k {
                r_off.push(h[c + 1] / 6.0);
            }
            qty.push((y[c + 2] - y[c + 1]) / h[c + 1] - (y[c + 1] - y[c]) / h[c]);
        }
        let mut qtq_d0 = Vec::with_capacity(k);
        let mut qtq_d1 = Vec::with_capacity(k.saturating_sub(1));
        let mut qtq_d2 = Vec::with_capacity(k.saturating_sub(2));
        for c in 0..k {
            qtq_d0.push(q_top[c] * q_top[c] + q_mid[c] * q_mid[c] + q_bot[c] * q_bot[c]);
            if c + 1 < k {
                qtq_d1.push(q_mid[c] * q_top[c + 1] + q_bot[c] * q_mid[c + 1]);
            }
            if c + 2 < k {
                qtq_d2.push(q_bot[c] * q_top[c + 2]);
            }
        }
        Self {
            q_top,
            q_mid,
            q_bot,
            r_diag,
            r_off,
            qtq_d0,
            qtq_d1,
            qtq_d2,
            qty,
        }
    }

    /// Solves `(R + lambda QtQ) gamma = Qt y` via banded LDLt (the matrix is
    /// symmetric positive definite, so no pivoting is needed).
    fn solve(&self, lambda: f64) -> Vec<f64> {
        let k = self.qty.len();
        let a0: Vec<f64> = (0..k)
            .map(|i| self.r_diag[i] + lambda * self.qtq_d0[i])
            .collect();
        let a1: Vec<f64> = (0..k.saturating_sub(1))
            .map(|i| self.r_off[i] + lambda * self.qtq_d1[i])
            .collect();
        let a2: Vec<f64> = (0..k.saturating_sub(2))
            .map(|i| lambda * self.qtq_d2[i])
            .collect();

        let mut d = vec![0.0; k];
        let mut e = vec![0.0; k]; // L[i][i-1]
        let mut f = vec![0.0; k]; // L[i][i-2]
        for i in 0..k {
            let fi = if i >= 2 { a2[i - 2] / d[i - 2] } else { 0.0 };
            let ei = if i >= 1 {
                let mut v = a1[i - 1];
                if i >= 2 {
                    v -= fi * d[i - 2] * e[i - 1];
                }
                v / d[i - 1]
            } else {
                0.0
            };
            let mut di = a0[i];
            if i >= 2 {
                di -= fi * fi * d[i - 2];
            }
            if i >= 1 {
                di -= ei * ei * d[i - 1];
            }
            d[i] = di;
            e[i] = ei;
            f[i] = fi;
        }

        let mut z = vec![0.0; k];
        for i in 0..k {
            let mut v = self.qty[i];
            if i >= 1 {
                v -= e[i] * z[i - 1];
            }
            if i >= 2 {
                v -= f[i] * z[i - 2];
            }
            z[i] = v;
        }
        let mut gamma = vec![0.0; k];
        for i in (0..k).rev() {
            let mut v = z[i] / d[i];
            if i + 1 < k {
                v -= e[i + 1] * gamma[i + 1];
            }
            if i + 2 < k {
                v -= f[i + 2] * gamma[i + 2];
            }
            gamma[i] = v;
        }
        gamma
    }

    /// `Q gamma`, expanded to full knot length.
    fn q_times(&self, gamma: &[f64]) -> Vec<f64> {
        let k = gamma.len();
        let n = k + 2;
        let mut out = vec![0.0; n];
        for c in 0..k {
            out[c] += self.q_top[c] * gamma[c];
            out[c + 1] += self.q_mid[c] * gamma[c];
            out[c + 2] += self.q_bot[c] * gamma[c];
        }
        out
    }

    /// Residual sum of squares at a given lambda: `lambda^2 |Q gamma|^2`.
    fn rss(&self, lambda: f64) -> f64 {
        let gamma = self.solve(lambda);
        let qg = self.q_times(&gamma);
        lambda * lambda * qg.iter().map(|v| v * v).sum::<f64>()
    }
}
