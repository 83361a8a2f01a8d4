//! Tow boundary reconstruction from polarity-labeled edge fragments.
//!
//! Edges arrive broken into pieces. The stages here label 8-connected
//! fragments, group fragments that belong to the same physical boundary by a
//! weighted endpoint distance, merge each group into a single-valued
//! polyline, and fit a smoothing spline `y = f(x)` per boundary.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::raster::{PolarEdgeMap, Polarity};
use crate::spline::SmoothingSpline;

/// One 8-connected edge fragment of a single polarity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRegion {
    pub id: u32,
    pub polarity: Polarity,
    /// Member pixels (col, row) in raster order.
    pub pixels: Vec<(u32, u32)>,
    /// Lexicographically smallest (col, row) pixel.
    pub leftmost: (u32, u32),
    /// Lexicographically largest (col, row) pixel.
    pub rightmost: (u32, u32),
    /// (min_col, min_row, max_col, max_row).
    pub bbox: (u32, u32, u32, u32),
}

impl EdgeRegion {
    /// Builds a region from its pixels, validating nonemptiness and
    /// 8-connectivity and deriving the endpoint/bbox fields.
    pub fn new(id: u32, polarity: Polarity, pixels: Vec<(u32, u32)>) -> Result<Self> {
        if pixels.is_empty() {
            return Err(Error::EmptyRange("edge region pixels"));
        }
        if !is_8_connected(&pixels) {
            return Err(Error::InvalidParameter(format!(
                "region {id} pixels are not 8-connected"
            )));
        }
        let leftmost = *pixels.iter().min().unwrap();
        let rightmost = *pixels.iter().max().unwrap();
        let mut bbox = (u32::MAX, u32::MAX, 0u32, 0u32);
        for &(c, r) in &pixels {
            bbox.0 = bbox.0.min(c);
            bbox.1 = bbox.1.min(r);
            bbox.2 = bbox.2.max(c);
            bbox.3 = bbox.3.max(r);
        }
        Ok(Self {
            id,
            polarity,
            pixels,
            leftmost,
            rightmost,
            bbox,
        })
    }
}

fn is_8_connected(pixels: &[(u32, u32)]) -> bool {
    if pixels.len() == 1 {
        return true;
    }
    let set: std::collections::HashSet<(u32, u32)> = pixels.iter().copied().collect();
    let mut seen = std::collections::HashSet::with_capacity(set.len());
    let mut stack = vec![pixels[0]];
    seen.insert(pixels[0]);
    while let Some((c, r)) = stack.pop() {
        for dr in -1i64..=1 {
            for dc in -1i64..=1 {
                if dc == 0 && dr == 0 {
                    continue;
                }
                let nc = c as i64 + dc;
                let nr = r as i64 + dr;
                if nc < 0 || nr < 0 {
                    continue;
                }
                let p = (nc as u32, nr as u32);
                if set.contains(&p) && seen.insert(p) {
                    stack.push(p);
                }
            }
        }
    }
    seen.len() == set.len()
}

/// Weights and threshold for fragment grouping.
///
/// Vertical offsets are penalized harder than horizontal ones because tow
/// boundaries run nearly horizontal: `alpha_x < alpha_y` is required.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GroupingParams {
    pub alpha_x: f64,
    pub alpha_y: f64,
    /// Strict threshold: fragments join when distance < `d_th`.
    pub d_th: f64,
}

impl Default for GroupingParams {
    fn default() -> Self {
        Self {
            alpha_x: 1.0,
            alpha_y: 4.0,
            d_th: 30.0,
        }
    }
}

impl GroupingParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_x >= 0.0 && self.alpha_x < self.alpha_y) {
            return Err(Error::InvalidGroupingParams(format!(
                "weights must satisfy 0 <= alpha_x < alpha_y, got {} and {}",
                self.alpha_x, self.alpha_y
            )));
        }
        if !(self.d_th.is_finite() && self.d_th > 0.0) {
            return Err(Error::InvalidGroupingParams(format!(
                "d_th must be positive, got {}",
                self.d_th
            )));
        }
        Ok(())
    }
}

/// A reconstructed tow boundary: merged knots plus the fitted spline.
#[derive(Debug, Clone, PartialEq)]
pub struct TowBoundary {
    pub polarity: Polarity,
    pub group_id: u32,
    /// Strictly increasing (col, row) samples the spline was fitted to.
    pub knots: Vec<(f64, f64)>,
    pub spline: SmoothingSpline,
    /// Residual budget used for the fit.
    pub smoothing: f64,
}

impl TowBoundary {
    /// Column domain `[first knot, last knot]`.
    pub fn domain(&self) -> (f64, f64) {
        self.spline.domain()
    }

    /// Boundary row at column `x`; outside the domain is an error.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        self.spline.evaluate(x)
    }

    /// Median knot row (lower-middle element), used for vertical ordering.
    pub fn median_row(&self) -> f64 {
        let mut rows: Vec<f64> = self.knots.iter().map(|&(_, y)| y).collect();
        rows.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rows[(rows.len() - 1) / 2]
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// Two-pass union-find connected-component labeling of one polarity.
///
/// Components are 8-connected; labels follow raster-scan discovery order
/// starting at 1, and each region's pixel list is in raster order.
pub fn label_components(pe: &PolarEdgeMap, polarity: Polarity) -> Vec<EdgeRegion> {
    let (w, h) = (pe.width() as usize, pe.height() as usize);
    let mut provisional = vec![0usize; w * h]; // 0 = background, else label + 1
    let mut uf = UnionFind::new(0);
    let mut next = 0usize;

    // First pass: assign provisional labels, union with already-scanned
    // neighbors (W, NW, N, NE).
    for y in 0..h {
        for x in 0..w {
            if pe.get(x as u32, y as u32) != Some(polarity) {
                continue;
            }
            let mut neighbor_label = None;
            let candidates: [(i64, i64); 4] = [
                (x as i64 - 1, y as i64),
                (x as i64 - 1, y as i64 - 1),
                (x as i64, y as i64 - 1),
                (x as i64 + 1, y as i64 - 1),
            ];
            for (nx, ny) in candidates {
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let l = provisional[ny as usize * w + nx as usize];
                if l > 0 {
                    match neighbor_label {
                        None => neighbor_label = Some(l - 1),
                        Some(first) => uf.union(first, l - 1),
                    }
                }
            }
            let label = match neighbor_label {
                Some(l) => l,
                None => {
                    uf.parent.push(next);
                    uf.size.push(1);
                    next += 1;
                    next - 1
                }
            };
            provisional[y * w + x] = label + 1;
        }
    }

    // Second pass: resolve roots, relabel by raster discovery order.
    let mut root_to_region: BTreeMap<usize, usize> = BTreeMap::new();
    let mut regions: Vec<Vec<(u32, u32)>> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let l = provisional[y * w + x];
            if l == 0 {
                continue;
            }
            let root = uf.find(l - 1);
            let idx = *root_to_region.entry(root).or_insert_with(|| {
                regions.push(Vec::new());
                regions.len() - 1
            });
            regions[idx].push((x as u32, y as u32));
        }
    }
    regions
        .into_iter()
        .enumerate()
        .map(|(i, pixels)| {
            EdgeRegion::new(i as u32 + 1, polarity, pixels)
                .expect("labeled components are nonempty and connected")
        })
        .collect()
}

/// Weighted distance between the facing endpoints of two same-polarity
/// fragments.
///
/// The regions are put in canonical horizontal order first, then the
/// horizontal gap (clipped at zero when the column spans overlap) and the
/// vertical offset between the left region's rightmost pixel and the right
/// region's leftmost pixel are combined as `alpha_x dx + alpha_y dy`.
pub fn region_distance(a: &EdgeRegion, b: &EdgeRegion, p: &GroupingParams) -> Result<f64> {
    p.validate()?;
    if a.polarity != b.polarity {
        return Err(Error::PolarityMismatch);
    }
    let key = |r: &EdgeRegion| (r.leftmost, r.rightmost);
    let (left, right) = if key(a) <= key(b) { (a, b) } else { (b, a) };
    let dx = (right.leftmost.0 as f64 - left.rightmost.0 as f64).max(0.0);
    let dy = (right.leftmost.1 as f64 - left.rightmost.1 as f64).abs();
    Ok(p.alpha_x * dx + p.alpha_y * dy)
}

/// Partitions fragments into boundary groups: the transitive closure of
/// "distance < d_th" via union-find.
///
/// Returned groups hold indices into `regions`, members ascending; groups are
/// ordered by their topmost-then-leftmost member bbox corner.
pub fn group_regions(regions: &[EdgeRegion], p: &GroupingParams) -> Result<Vec<Vec<usize>>> {
    p.validate()?;
    if let Some(first) = regions.first() {
        if regions.iter().any(|r| r.polarity != first.polarity) {
            return Err(Error::PolarityMismatch);
        }
    }
    let mut uf = UnionFind::new(regions.len());
    for i in 0..regions.len() {
        for j in i + 1..regions.len() {
            if region_distance(&regions[i], &regions[j], p)? < p.d_th {
                uf.union(i, j);
            }
        }
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..regions.len() {
        by_root.entry(uf.find(i)).or_default().push(i);
    }
    let mut groups: Vec<Vec<usize>> = by_root.into_values().collect();
    groups.sort_by_key(|members| {
        members
            .iter()
            .map(|&i| (regions[i].bbox.1, regions[i].bbox.0))
            .min()
            .unwrap()
    });
    Ok(groups)
}

/// Rasterizes the straight segment from `a` to `b` inclusive with the
/// classic incremental-error line algorithm. Works in any direction; on an
/// exact half-step tie the line rounds toward the destination.
pub fn bresenham_line(a: (i64, i64), b: (i64, i64)) -> Vec<(i64, i64)> {
    let dx = (b.0 - a.0).abs();
    let sx = if a.0 < b.0 { 1 } else { -1 };
    let dy = -(b.1 - a.1).abs();
    let sy = if a.1 < b.1 { 1 } else { -1 };
    let mut err = dx + dy;
    let (mut x, mut y) = a;
    let mut points = Vec::with_capacity((dx.max(-dy) + 1) as usize);
    loop {
        points.push((x, y));
        if x == b.0 && y == b.1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
    points
}

/// Merges a fragment group into one polyline with strictly increasing
/// columns.
///
/// Fragments are walked left to right; every fragment contributes one pixel
/// per column (median row), consecutive fragments are bridged with a
/// rasterized segment from the left fragment's rightmost pixel to the right
/// fragment's leftmost pixel, and the pooled points collapse to one point
/// per column by the median row of the contributors.
pub fn merge_group(group: &[EdgeRegion]) -> Result<Vec<(u32, u32)>> {
    if group.is_empty() {
        return Err(Error::EmptyRange("fragment group"));
    }
    let mut order: Vec<&EdgeRegion> = group.iter().collect();
    order.sort_by_key(|r| (r.leftmost, r.rightmost, r.id));

    let mut contributors: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for region in &order {
        let mut per_col: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for &(c, r) in &region.pixels {
            per_col.entry(c).or_default().push(r);
        }
        for (c, mut rows) in per_col {
            rows.sort_unstable();
            contributors
                .entry(c)
                .or_default()
                .push(rows[(rows.len() - 1) / 2]);
        }
    }
    for pair in order.windows(2) {
        let from = pair[0].rightmost;
        let to = pair[1].leftmost;
        for (c, r) in bresenham_line((from.0 as i64, from.1 as i64), (to.0 as i64, to.1 as i64)) {
            contributors.entry(c as u32).or_default().push(r as u32);
        }
    }
    Ok(contributors
        .into_iter()
        .map(|(c, mut rows)| {
            rows.sort_unstable();
            (c, rows[(rows.len() - 1) / 2])
        })
        .collect())
}

/// Fits a smoothing spline boundary through a merged polyline.
///
/// The polyline must have at least 2 points with strictly increasing
/// columns; `s` is the residual budget passed to the spline fit.
pub fn fit_boundary(
    polarity: Polarity,
    group_id: u32,
    polyline: &[(u32, u32)],
    s: f64,
) -> Result<TowBoundary> {
    let x: Vec<f64> = polyline.iter().map(|&(c, _)| c as f64).collect();
    let y: Vec<f64> = polyline.iter().map(|&(_, r)| r as f64).collect();
    let spline = SmoothingSpline::fit(&x, &y, s)?;
    Ok(TowBoundary {
        polarity,
        group_id,
        knots: x.into_iter().zip(y).collect(),
        spline,
        smoothing: s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn edge_map_from_pixels(w: u32, h: u32, pixels: &[(u32, u32)]) -> PolarEdgeMap {
        let mut pe = PolarEdgeMap::unlabeled(w, h);
        for &(c, r) in pixels {
            pe.set(c, r, Some(Polarity::Upper));
        }
        pe
    }

    fn single_pixel_region(id: u32, col: u32, row: u32) -> EdgeRegion {
        EdgeRegion::new(id, Polarity::Upper, vec![(col, row)]).unwrap()
    }

    /// BFS flood-fill oracle returning the component partition as a set of
    /// pixel sets.
    fn bfs_components(pe: &PolarEdgeMap, polarity: Polarity) -> HashSet<Vec<(u32, u32)>> {
        let (w, h) = (pe.width(), pe.height());
        let mut seen = HashSet::new();
        let mut out = HashSet::new();
        for y in 0..h {
            for x in 0..w {
                if pe.get(x, y) != Some(polarity) || seen.contains(&(x, y)) {
                    continue;
                }
                let mut comp = vec![];
                let mut queue = std::collections::VecDeque::from([(x, y)]);
                seen.insert((x, y));
                while let Some((cx, cy)) = queue.pop_front() {
                    comp.push((cx, cy));
                    for dy in -1i64..=1 {
                        for dx in -1i64..=1 {
                            let nx = cx as i64 + dx;
                            let ny = cy as i64 + dy;
                            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                                continue;
                            }
                            let p = (nx as u32, ny as u32);
                            if pe.get(p.0, p.1) == Some(polarity) && seen.insert(p) {
                                queue.push_back(p);
                            }
                        }
                    }
                }
                comp.sort_unstable();
                out.insert(comp);
            }
        }
        out
    }

    #[test]
    fn label_empty_map() {
        let pe = PolarEdgeMap::unlabeled(8, 8);
        assert!(label_components(&pe, Polarity::Upper).is_empty());
    }

    #[test]
    fn label_two_runs_split_by_blank_column() {
        let pe = edge_map_from_pixels(10, 3, &[(0, 1), (1, 1), (2, 1), (4, 1), (5, 1)]);
        let regions = label_components(&pe, Polarity::Upper);
        assert_eq!(regions.len(), 2);
        assert_eq!(regions[0].id, 1);
        assert_eq!(regions[1].id, 2);
        assert_eq!(regions[0].pixels, vec![(0, 1), (1, 1), (2, 1)]);
        assert_eq!(regions[1].leftmost, (4, 1));
        assert_eq!(regions[1].rightmost, (5, 1));
    }

    #[test]
    fn label_diagonal_touch_is_one_region() {
        let pe = edge_map_from_pixels(6, 6, &[(0, 0), (1, 1), (2, 2)]);
        let regions = label_components(&pe, Polarity::Upper);
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].pixels.len(), 3);
    }

    #[test]
    fn label_ignores_other_polarity() {
        let mut pe = PolarEdgeMap::unlabeled(4, 4);
        pe.set(1, 1, Some(Polarity::Lower));
        assert!(label_components(&pe, Polarity::Upper).is_empty());
        assert_eq!(label_components(&pe, Polarity::Lower).len(), 1);
    }

    #[test]
    fn region_distance_examples() {
        let p = GroupingParams::default();
        let a = single_pixel_region(1, 0, 0);
        let b = single_pixel_region(2, 3, 2);
        assert_eq!(region_distance(&a, &a.clone(), &p).unwrap(), 0.0);
        assert_eq!(region_distance(&a, &b, &p).unwrap(), 11.0);
        assert_eq!(region_distance(&b, &a, &p).unwrap(), 11.0);
    }

    #[test]
    fn region_distance_clips_horizontal_overlap() {
        // Two horizontally overlapping runs on rows 2 and 5.
        let a = EdgeRegion::new(1, Polarity::Upper, vec![(0, 2), (1, 2), (2, 2), (3, 2)]).unwrap();
        let b = EdgeRegion::new(2, Polarity::Upper, vec![(2, 5), (3, 5), (4, 5)]).unwrap();
        let p = GroupingParams::default();
        // Canonical left is a; facing endpoints (3,2) and (2,5): dx clipped to 0.
        assert_eq!(region_distance(&a, &b, &p).unwrap(), 4.0 * 3.0);
    }

    #[test]
    fn region_distance_rejects_mixed_polarity() {
        let a = single_pixel_region(1, 0, 0);
        let b = EdgeRegion::new(2, Polarity::Lower, vec![(3, 2)]).unwrap();
        assert!(matches!(
            region_distance(&a, &b, &GroupingParams::default()),
            Err(Error::PolarityMismatch)
        ));
    }

    #[test]
    fn grouping_joins_near_and_splits_far() {
        let p = GroupingParams {
            alpha_x: 1.0,
            alpha_y: 4.0,
            d_th: 20.0,
        };
        let r1 = single_pixel_region(1, 0, 0);
        let r2 = single_pixel_region(2, 10, 1);
        let r3 = single_pixel_region(3, 10, 30);
        let groups = group_regions(&[r1, r2, r3], &p).unwrap();
        assert_eq!(groups, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn grouping_takes_transitive_closure() {
        let p = GroupingParams {
            alpha_x: 1.0,
            alpha_y: 4.0,
            d_th: 20.0,
        };
        let a = single_pixel_region(1, 0, 0);
        let b = single_pixel_region(2, 15, 0);
        let c = single_pixel_region(3, 30, 0);
        // a-b and b-c are below threshold, a-c is not; closure joins all.
        assert!(region_distance(&a, &c, &p).unwrap() >= p.d_th);
        let groups = group_regions(&[a, b, c], &p).unwrap();
        assert_eq!(groups, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn grouping_rejects_bad_params() {
        let r = single_pixel_region(1, 0, 0);
        for p in [
            GroupingParams {
                alpha_x: 4.0,
                alpha_y: 1.0,
                d_th: 10.0,
            },
            GroupingParams {
                alpha_x: 1.0,
                alpha_y: 4.0,
                d_th: 0.0,
            },
        ] {
            assert!(matches!(
                group_regions(std::slice::from_ref(&r), &p),
                Err(Error::InvalidGroupingParams(_))
            ));
        }
    }

    /// Closed-form per-step oracle for the incremental line algorithm:
    /// along the major axis the minor coordinate is
    /// `minor0 + s_minor * floor((2 d_minor t + d_major) / (2 d_major))`,
    /// which rounds exact half steps toward the destination.
    fn bresenham_oracle(a: (i64, i64), b: (i64, i64)) -> Vec<(i64, i64)> {
        let dx = (b.0 - a.0).abs();
        let dy = (b.1 - a.1).abs();
        let sx = (b.0 - a.0).signum();
        let sy = (b.1 - a.1).signum();
        let mut out = Vec::new();
        if dx >= dy {
            for t in 0..=dx {
                let minor = if dx == 0 {
                    0
                } else {
                    (2 * dy * t + dx) / (2 * dx)
                };
                out.push((a.0 + sx * t, a.1 + sy * minor));
            }
        } else {
            for t in 0..=dy {
                let minor = (2 * dx * t + dy) / (2 * dy);
                out.push((a.0 + sx * minor, a.1 + sy * t));
            }
        }
        out
    }

    #[test]
    fn bresenham_matches_closed_form_oracle_exhaustively() {
        for x0 in -5i64..=5 {
            for y0 in -5i64..=5 {
                for x1 in -5i64..=5 {
                    for y1 in -5i64..=5 {
                        let got = bresenham_line((x0, y0), (x1, y1));
                        let want = bresenham_oracle((x0, y0), (x1, y1));
                        assert_eq!(got, want, "({x0},{y0}) -> ({x1},{y1})");
                    }
                }
            }
        }
    }

    #[test]
    fn bresenham_steps_are_8_connected_and_inclusive() {
        let pts = bresenham_line((2, 9), (11, 3));
        assert_eq!(*pts.first().unwrap(), (2, 9));
        assert_eq!(*pts.last().unwrap(), (11, 3));
        for w in pts.windows(2) {
            let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            assert!(dx.abs() <= 1 && dy.abs() <= 1 && (dx, dy) != (0, 0));
        }
    }

    #[test]
    fn merge_single_region_is_its_own_polyline() {
        let pixels: Vec<(u32, u32)> = (0..10).map(|c| (c, 5)).collect();
        let region = EdgeRegion::new(1, Polarity::Upper, pixels).unwrap();
        let line = merge_group(&[region]).unwrap();
        assert_eq!(line, (0..10).map(|c| (c, 5)).collect::<Vec<_>>());
    }

    #[test]
    fn merge_bridges_collinear_runs() {
        let a = EdgeRegion::new(1, Polarity::Upper, (0..5).map(|c| (c, 7)).collect()).unwrap();
        let b = EdgeRegion::new(2, Polarity::Upper, (8..13).map(|c| (c, 7)).collect()).unwrap();
        let line = merge_group(&[b, a]).unwrap();
        assert_eq!(line.len(), 13);
        assert!(line.iter().all(|&(_, r)| r == 7));
        assert_eq!(line.first().unwrap().0, 0);
        assert_eq!(line.last().unwrap().0, 12);
    }

    #[test]
    fn merge_bridge_steps_monotonically_between_rows() {
        let a = EdgeRegion::new(1, Polarity::Upper, (0..5).map(|c| (c, 5)).collect()).unwrap();
        let b = EdgeRegion::new(2, Polarity::Upper, (8..13).map(|c| (c, 8)).collect()).unwrap();
        let line = merge_group(&[a, b]).unwrap();
        let cols: Vec<u32> = line.iter().map(|&(c, _)| c).collect();
        assert_eq!(cols, (0..13).collect::<Vec<_>>());
        for w in line.windows(2) {
            assert!(w[1].1 >= w[0].1, "rows must not decrease: {line:?}");
        }
        assert_eq!(line[4].1, 5);
        assert_eq!(line[8].1, 8);
    }

    #[test]
    fn merge_dedups_overlapping_columns_by_median() {
        // Three stacked single-pixel regions in one column plus a neighbor
        // column to keep each 8-connected run separate.
        let a = EdgeRegion::new(1, Polarity::Upper, vec![(0, 2), (1, 2)]).unwrap();
        let b = EdgeRegion::new(2, Polarity::Upper, vec![(0, 6), (1, 6)]).unwrap();
        let c = EdgeRegion::new(3, Polarity::Upper, vec![(0, 4), (1, 4)]).unwrap();
        let line = merge_group(&[a, b, c]).unwrap();
        assert_eq!(line.iter().filter(|&&(c, _)| c == 0).count(), 1);
        // Contributors at col 0: rows 2, 6, 4 plus bridge rows; the median
        // picks an interior row, never duplicates the column.
        let cols: Vec<u32> = line.iter().map(|&(c, _)| c).collect();
        let mut sorted = cols.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(cols, sorted);
    }

    #[test]
    fn merge_rejects_empty_group() {
        assert!(matches!(merge_group(&[]), Err(Error::EmptyRange(_))));
    }

    #[test]
    fn fit_boundary_plumbs_polarity_and_group() {
        let line: Vec<(u32, u32)> = (0..8).map(|c| (c, 3)).collect();
        let b = fit_boundary(Polarity::Lower, 4, &line, 8.0).unwrap();
        assert_eq!(b.polarity, Polarity::Lower);
        assert_eq!(b.group_id, 4);
        assert_eq!(b.domain(), (0.0, 7.0));
        assert_eq!(b.median_row(), 3.0);
        assert!((b.evaluate(3.5).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn fit_boundary_rejects_degenerate_input() {
        assert!(matches!(
            fit_boundary(Polarity::Upper, 1, &[], 0.0),
            Err(Error::TooFewPoints(0))
        ));
        assert!(matches!(
            fit_boundary(Polarity::Upper, 1, &[(3, 1), (3, 2)], 0.0),
            Err(Error::NonMonotoneColumns(1))
        ));
    }

    fn arbitrary_edge_map() -> impl Strategy<Value = PolarEdgeMap> {
        (1u32..24, 1u32..24).prop_flat_map(|(w, h)| {
            proptest::collection::vec(proptest::bool::weighted(0.3), (w * h) as usize).prop_map(
                move |bits| {
                    let mut pe = PolarEdgeMap::unlabeled(w, h);
                    for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
                        pe.set(i as u32 % w, i as u32 / w, Some(Polarity::Upper));
                    }
                    pe
                },
            )
        })
    }

    proptest! {
        #[test]
        fn labeling_matches_bfs_oracle(pe in arbitrary_edge_map()) {
            let regions = label_components(&pe, Polarity::Upper);
            let got: HashSet<Vec<(u32, u32)>> = regions
                .into_iter()
                .map(|r| {
                    let mut p = r.pixels;
                    p.sort_unstable();
                    p
                })
                .collect();
            prop_assert_eq!(got, bfs_components(&pe, Polarity::Upper));
        }

        #[test]
        fn grouping_is_a_partition_and_permutation_invariant(
            pe in arbitrary_edge_map(),
            perm_seed in any::<u64>(),
        ) {
            let regions = label_components(&pe, Polarity::Upper);
            let p = GroupingParams::default();
            let groups = group_regions(&regions, &p).unwrap();

            let mut covered: Vec<usize> = groups.iter().flatten().copied().collect();
            covered.sort_unstable();
            prop_assert_eq!(covered, (0..regions.len()).collect::<Vec<_>>());

            // Permute the input; the partition must be identical as sets of
            // region identities (compare by leftmost pixel, which is unique).
            let mut shuffled: Vec<EdgeRegion> = regions.clone();
            let mut state = perm_seed;
            for i in (1..shuffled.len()).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                shuffled.swap(i, j);
            }
            let canon = |groups: &[Vec<usize>], regs: &[EdgeRegion]| {
                let mut sets: Vec<Vec<(u32, u32)>> = groups
                    .iter()
                    .map(|g| {
                        let mut s: Vec<(u32, u32)> = g.iter().map(|&i| regs[i].leftmost).collect();
                        s.sort_unstable();
                        s
                    })
                    .collect();
                sets.sort();
                sets
            };
            let groups2 = group_regions(&shuffled, &p).unwrap();
            prop_assert_eq!(canon(&groups, &regions), canon(&groups2, &shuffled));
        }

        #[test]
        fn grouping_is_scale_invariant(
            pe in arbitrary_edge_map(),
            exponent in -3i32..=3,
        ) {
            let regions = label_components(&pe, Polarity::Upper);
            let base = GroupingParams::default();
            let k = 2.0f64.powi(exponent);
            let scaled = GroupingParams {
                alpha_x: base.alpha_x * k,
                alpha_y: base.alpha_y * k,
                d_th: base.d_th * k,
            };
            // Powers of two scale floats exactly, so membership tests agree
            // bit for bit.
            prop_assert_eq!(
                group_regions(&regions, &base).unwrap(),
                group_regions(&regions, &scaled).unwrap()
            );
        }

        #[test]
        fn merged_polylines_cover_the_group_span(pe in arbitrary_edge_map()) {
            let regions = label_components(&pe, Polarity::Upper);
            if regions.is_empty() {
                return Ok(());
            }
            let groups = group_regions(&regions, &GroupingParams::default()).unwrap();
            for members in groups {
                let group: Vec<EdgeRegion> =
                    members.iter().map(|&i| regions[i].clone()).collect();
                let min_col = group.iter().map(|r| r.bbox.0).min().unwrap();
                let max_col = group.iter().map(|r| r.bbox.2).max().unwrap();
                let line = merge_group(&group).unwrap();
                let cols: Vec<u32> = line.iter().map(|&(c, _)| c).collect();
                prop_assert_eq!(cols, (min_col..=max_col).collect::<Vec<_>>());
            }
        }
    }
}
