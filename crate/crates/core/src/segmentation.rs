//! Gap/overlap classification between paired tow boundaries.
//!
//! Boundaries are associated into tows (an upper curve with the nearest
//! lower curve beneath it), adjacent tows form pairs, and the vertical
//! clearance between a pair's facing curves decides the defect class per
//! column: positive beyond tolerance is a gap, negative beyond tolerance an
//! overlap, anything else neutral.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::raster::{DefectClass, DefectMask, Polarity};
use crate::towlines::TowBoundary;

/// Two facing boundaries of adjacent tows.
#[derive(Debug, Clone)]
pub struct TowPair {
    /// Bottom curve of the tow above (polarity lower).
    pub upper_tow_lower_boundary: TowBoundary,
    /// Top curve of the tow below (polarity upper).
    pub lower_tow_upper_boundary: TowBoundary,
    /// Column interval where both curves are defined.
    pub shared_domain: (f64, f64),
}

/// Result of boundary association: adjacent pairs plus the indices of
/// boundaries that could not be matched into any tow.
#[derive(Debug, Clone, Default)]
pub struct PairingOutcome {
    pub pairs: Vec<TowPair>,
    /// Per pair, the indices of the two member boundaries in the input list
    /// (upper tow's lower boundary, lower tow's upper boundary).
    pub pair_indices: Vec<(usize, usize)>,
    /// Input indices never matched into a tow; reported, not dropped.
    pub unpaired: Vec<usize>,
}

fn domains_intersect(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0.max(b.0) <= a.1.min(b.1)
}

/// Associates boundaries into tows and tows into adjacent pairs.
///
/// Boundaries are scanned top to bottom by median knot row. Each unused
/// upper curve grabs the nearest unused lower curve below it whose domain
/// overlaps; consecutive tows whose domains intersect yield one pair.
pub fn pair_boundaries(boundaries: &[TowBoundary]) -> PairingOutcome {
    let mut order: Vec<usize> = (0..boundaries.len()).collect();
    order.sort_by(|&a, &b| {
        let key = |i: usize| {
            (
                boundaries[i].median_row(),
                boundaries[i].domain().0,
                boundaries[i].polarity as u8,
            )
        };
        key(a).partial_cmp(&key(b)).unwrap()
    });

    let mut used = vec![false; boundaries.len()];
    let mut tows: Vec<(usize, usize)> = Vec::new(); // (upper idx, lower idx)
    for (pos, &i) in order.iter().enumerate() {
        if used[i] || boundaries[i].polarity != Polarity::Upper {
            continue;
        }
        let found = order[pos + 1..].iter().copied().find(|&j| {
            !used[j]
                && boundaries[j].polarity == Polarity::Lower
                && domains_intersect(boundaries[i].domain(), boundaries[j].domain())
        });
        if let Some(j) = found {
            used[i] = true;
            used[j] = true;
            tows.push((i, j));
        }
    }

    let mut outcome = PairingOutcome::default();
    for w in tows.windows(2) {
        let (_, above_lower) = w[0];
        let (below_upper, _) = w[1];
        let da = boundaries[above_lower].domain();
        let db = boundaries[below_upper].domain();
        if domains_intersect(da, db) {
            outcome.pairs.push(TowPair {
                upper_tow_lower_boundary: boundaries[above_lower].clone(),
                lower_tow_upper_boundary: boundaries[below_upper].clone(),
                shared_domain: (da.0.max(db.0), da.1.min(db.1)),
            });
            outcome.pair_indices.push((above_lower, below_upper));
        }
    }
    outcome.unpaired = (0..boundaries.len()).filter(|&i| !used[i]).collect();
    outcome
}

/// Per-column defect claim from one pair: rows `row_lo..=row_hi` in `col`
/// carry `class`, with the curve separation `width` retained for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnMark {
    pub col: u32,
    pub row_lo: i64,
    pub row_hi: i64,
    pub class: DefectClass,
    /// Absolute vertical clearance |y_U - y_L| at this column.
    pub width: f64,
}

/// Classifies every integer column of a pair's shared domain.
///
/// With `y_L` the upper tow's lower curve and `y_U` the lower tow's upper
/// curve (rows grow downward), the clearance is `w = y_U - y_L`. Columns
/// with `w > tol` mark the rows strictly between the curves as gap; columns
/// with `w < -tol` mark them as overlap; `|w| <= tol` stays neutral.
pub fn segment_pair(pair: &TowPair, tol: f64) -> Result<Vec<ColumnMark>> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be nonnegative, got {tol}"
        )));
    }
    let lo = pair.shared_domain.0.ceil() as i64;
    let hi = pair.shared_domain.1.floor() as i64;
    let mut marks = Vec::new();
    for col in lo..=hi {
        let x = col as f64;
        let y_l = pair.upper_tow_lower_boundary.evaluate(x)?;
        let y_u = pair.lower_tow_upper_boundary.evaluate(x)?;
        let w = y_u - y_l;
        let (class, top, bottom) = if w > tol {
            (DefectClass::Gap, y_l, y_u)
        } else if w < -tol {
            (DefectClass::Overlap, y_u, y_l)
        } else {
            continue;
        };
        // Integer rows strictly inside the open interval (top, bottom). The
        // nudge keeps solver noise around exact-integer curve values from
        // leaking a boundary row into the interior.
        const EPS: f64 = 1e-6;
        let row_lo = (top + EPS).floor() as i64 + 1;
        let row_hi = (bottom - EPS).ceil() as i64 - 1;
        if row_lo <= row_hi {
            marks.push(ColumnMark {
                col: col as u32,
                row_lo,
                row_hi,
                class,
                width: w.abs(),
            });
        }
    }
    Ok(marks)
}

/// Assembled defect mask plus diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Assembly {
    pub mask: DefectMask,
    /// Cells claimed both gap and overlap by different pairs; resolved to
    /// overlap (material present is the stronger claim) but surfaced here.
    pub conflict_pixels: usize,
    /// Per-pixel curve separation backing each defect cell, image-sized.
    widths: Vec<f64>,
}

impl Assembly {
    pub fn widths(&self) -> &[f64] {
        &self.widths
    }
}

/// Merges per-pair column marks into one mask.
///
/// Claims landing outside the image are clipped. A cell claimed by both
/// classes becomes overlap and increments the conflict tally once.
pub fn assemble_mask(marks: &[ColumnMark], width: u32, height: u32) -> Assembly {
    let len = (width as usize) * (height as usize);
    let mut mask = DefectMask::neutral(width, height);
    let mut widths = vec![0.0f64; len];
    let mut saw_gap = vec![false; len];
    let mut saw_overlap = vec![false; len];
    for mark in marks {
        if mark.col >= width {
            continue;
        }
        let lo = mark.row_lo.max(0);
        let hi = mark.row_hi.min(height as i64 - 1);
        for row in lo..=hi {
            let idx = row as usize * width as usize + mark.col as usize;
            match mark.class {
                DefectClass::Gap => saw_gap[idx] = true,
                DefectClass::Overlap => saw_overlap[idx] = true,
                DefectClass::Neutral => {}
            }
            widths[idx] = widths[idx].max(mark.width);
        }
    }
    let mut conflict_pixels = 0;
    for idx in 0..len {
        let class = match (saw_gap[idx], saw_overlap[idx]) {
            (false, false) => continue,
            (true, false) => DefectClass::Gap,
            (false, true) => DefectClass::Overlap,
            (true, true) => {
                conflict_pixels += 1;
                DefectClass::Overlap
            }
        };
        mask.set(idx as u32 % width, idx as u32 / width, class);
    }
    Assembly {
        mask,
        conflict_pixels,
        widths,
    }
}

/// One 8-connected defect region of a single class.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectRegion {
    pub class: DefectClass,
    /// Member pixels (col, row) in discovery order.
    pub pixels: Vec<(u32, u32)>,
    /// (min_col, min_row, max_col, max_row).
    pub bbox: (u32, u32, u32, u32),
    pub area: usize,
    /// Maximal per-column curve separation |y_U - y_L| across the region.
    pub max_width: f64,
}

/// Extracts per-class 8-connected regions from an assembly, using the
/// recorded curve separations for `max_width`.
pub fn extract_regions(assembly: &Assembly) -> Vec<DefectRegion> {
    extract(&assembly.mask, Some(&assembly.widths))
}

/// Extracts regions from a bare mask (for example a ground-truth file).
///
/// Without recorded separations, `max_width` falls back to the longest
/// per-column pixel run plus one: defect rows sit strictly between two
/// boundary rows, so a run of k marked rows implies a separation of k + 1.
pub fn extract_mask_regions(mask: &DefectMask) -> Vec<DefectRegion> {
    extract(mask, None)
}

fn extract(mask: &DefectMask, widths: Option<&[f64]>) -> Vec<DefectRegion> {
    let (w, h) = (mask.width(), mask.height());
    let mut out = Vec::new();
    for class in [DefectClass::Gap, DefectClass::Overlap] {
        let mut seen = vec![false; (w as usize) * (h as usize)];
        for y in 0..h {
            for x in 0..w {
                let start = y as usize * w as usize + x as usize;
                if mask.get(x, y) != class || seen[start] {
                    continue;
                }
                let mut pixels = Vec::new();
                let mut queue = VecDeque::from([(x, y)]);
                seen[start] = true;
                while let Some((cx, cy)) = queue.pop_front() {
                    pixels.push((cx, cy));
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
                            let idx = ny as usize * w as usize + nx as usize;
                            if mask.get(nx as u32, ny as u32) == class && !seen[idx] {
                                seen[idx] = true;
                                queue.push_back((nx as u32, ny as u32));
                            }
                        }
                    }
                }
                let mut bbox = (u32::MAX, u32::MAX, 0u32, 0u32);
                for &(c, r) in &pixels {
                    bbox.0 = bbox.0.min(c);
                    bbox.1 = bbox.1.min(r);
                    bbox.2 = bbox.2.max(c);
                    bbox.3 = bbox.3.max(r);
                }
                let max_width = match widths {
                    Some(ws) => pixels
                        .iter()
                        .map(|&(c, r)| ws[r as usize * w as usize + c as usize])
                        .fold(0.0f64, f64::max),
                    None => max_column_run(&pixels) as f64 + 1.0,
                };
                let area = pixels.len();
                out.push(DefectRegion {
                    class,
                    pixels,
                    bbox,
                    area,
                    max_width,
                });
            }
        }
    }
    out
}

/// Longest vertically contiguous run of pixels within any single column.
fn max_column_run(pixels: &[(u32, u32)]) -> usize {
    let mut by_col: std::collections::BTreeMap<u32, Vec<u32>> = std::collections::BTreeMap::new();
    for &(c, r) in pixels {
        by_col.entry(c).or_default().push(r);
    }
    let mut best = 0usize;
    for rows in by_col.values_mut() {
        rows.sort_unstable();
        let mut run = 1usize;
        best = best.max(1);
        for i in 1..rows.len() {
            if rows[i] == rows[i - 1] + 1 {
                run += 1;
            } else {
                run = 1;
            }
            best = best.max(run);
        }
    }
    best
}
