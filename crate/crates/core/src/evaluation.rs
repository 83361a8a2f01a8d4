//! Segmentation scoring: per-class IoU and confusion matrices.

use crate::error::Result;
use crate::raster::{DefectClass, DefectMask};

/// Pixel tallies for one class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ClassCounts {
    pub intersection: u64,
    pub union: u64,
    pub pred: u64,
    pub gt: u64,
}

impl ClassCounts {
    /// IoU with the vacuous convention: both sets empty scores 1, exactly
    /// one empty scores 0.
    pub fn iou(&self) -> f64 {
        if self.union == 0 {
            1.0
        } else {
            self.intersection as f64 / self.union as f64
        }
    }
}

/// Full comparison of a predicted mask against ground truth.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EvalReport {
    pub iou_gap: f64,
    pub iou_overlap: f64,
    /// Mean of the two defect-class IoUs.
    pub mean_iou: f64,
    pub gap: ClassCounts,
    pub overlap: ClassCounts,
    /// `confusion[gt][pred]` over {neutral, gap, overlap}; row sums equal
    /// ground-truth class pixel counts.
    pub confusion: [[u64; 3]; 3],
}

/// IoU of one class between two masks of equal dimensions.
pub fn iou(pred: &DefectMask, gt: &DefectMask, class: DefectClass) -> Result<f64> {
    pred.same_dims(gt)?;
    Ok(class_counts(pred, gt, class).iou())
}

fn class_counts(pred: &DefectMask, gt: &DefectMask, class: DefectClass) -> ClassCounts {
    let mut counts = ClassCounts::default();
    for (p, g) in pred.classes().iter().zip(gt.classes()) {
        let in_pred = *p == class;
        let in_gt = *g == class;
        counts.pred += in_pred as u64;
        counts.gt += in_gt as u64;
        counts.intersection += (in_pred && in_gt) as u64;
        counts.union += (in_pred || in_gt) as u64;
    }
    counts
}

/// Scores `pred` against `gt`: per-class IoU, their mean, and the 3x3
/// confusion matrix.
pub fn evaluate(pred: &DefectMask, gt: &DefectMask) -> Result<EvalReport> {
    pred.same_dims(gt)?;
    let gap = class_counts(pred, gt, DefectClass::Gap);
    let overlap = class_counts(pred, gt, DefectClass::Overlap);
    let mut confusion = [[0u64; 3]; 3];
    for (p, g) in pred.classes().iter().zip(gt.classes()) {
        confusion[g.code() as usize][p.code() as usize] += 1;
    }
    let (iou_gap, iou_overlap) = (gap.iou(), overlap.iou());
    Ok(EvalReport {
        iou_gap,
        iou_overlap,
        mean_iou: 0.5 * (iou_gap + iou_overlap),
        gap,
        overlap,
        confusion,
    })
}

/// Aggregate scores over a batch of (pred, gt) comparisons.
///
/// Macro figures average the per-image IoUs; micro figures pool the pixel
/// counts first and apply the same vacuous-empty convention to the pools.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BatchReport {
    pub images: usize,
    pub macro_iou_gap: f64,
    pub macro_iou_overlap: f64,
    pub macro_mean_iou: f64,
    pub micro_iou_gap: f64,
    pub micro_iou_overlap: f64,
    pub micro_mean_iou: f64,
    pub gap: ClassCounts,
    pub overlap: ClassCounts,
    pub confusion: [[u64; 3]; 3],
}

/// Combines per-image reports into batch aggregates.
///
/// Returns `None` for an empty batch (no meaningful average exists).
pub fn aggregate(reports: &[EvalReport]) -> Option<BatchReport> {
    if reports.is_empty() {
        return None;
    }
    let n = reports.len() as f64;
    let mut gap = ClassCounts::default();
    let mut overlap = ClassCounts::default();
    let mut confusion = [[0u64; 3]; 3];
    let mut macro_gap = 0.0;
    let mut macro_overlap = 0.0;
    for r in reports {
        macro_gap += r.iou_gap;
        macro_overlap += r.iou_overlap;
        for (acc, part) in [(&mut gap, &r.gap), (&mut overlap, &r.overlap)] {
            acc.intersection += part.intersection;
            acc.union += part.union;
            acc.pred += part.pred;
            acc.gt += part.gt;
        }
        for (row, r_row) in confusion.iter_mut().zip(&r.confusion) {
            for (cell, add) in row.iter_mut().zip(r_row) {
                *cell += add;
            }
        }
    }
    let (macro_iou_gap, macro_iou_overlap) = (macro_gap / n, macro_overlap / n);
    let (micro_iou_gap, micro_iou_overlap) = (gap.iou(), overlap.iou());
    Some(BatchReport {
        images: reports.len(),
        macro_iou_gap,
        macro_iou_overlap,
        macro_mean_iou: 0.5 * (macro_iou_gap + macro_iou_overlap),
        micro_iou_gap,
        micro_iou_overlap,
        micro_mean_iou: 0.5 * (micro_iou_gap + micro_iou_overlap),
        gap,
        overlap,
        confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use proptest::prelude::*;

    fn mask_from_codes(w: u32, h: u32, codes: &[u8]) -> DefectMask {
        let classes = codes
            .iter()
            .map(|&c| DefectClass::from_code(c).unwrap())
            .collect();
        DefectMask::from_classes(w, h, classes).unwrap()
    }

    #[test]
    fn identical_nonempty_masks_score_one() {
        let m = mask_from_codes(3, 2, &[0, 1, 1, 2, 0, 2]);
        assert_eq!(iou(&m, &m, DefectClass::Gap).unwrap(), 1.0);
        assert_eq!(iou(&m, &m, DefectClass::Overlap).unwrap(), 1.0);
        let r = evaluate(&m, &m).unwrap();
        assert_eq!(r.mean_iou, 1.0);
        assert_eq!(r.confusion[0][1] + r.confusion[0][2], 0);
        assert_eq!(r.confusion[1][0] + r.confusion[1][2], 0);
    }

    #[test]
    fn disjoint_nonempty_sets_score_zero() {
        let a = mask_from_codes(4, 1, &[1, 1, 0, 0]);
        let b = mask_from_codes(4, 1, &[0, 0, 1, 1]);
        assert_eq!(iou(&a, &b, DefectClass::Gap).unwrap(), 0.0);
    }

    #[test]
    fn offset_blocks_score_one_third() {
        // pred: 2x2 block at (0,0); gt: 2x2 block at (1,0).
        let mut pred = DefectMask::neutral(3, 2);
        let mut gt = DefectMask::neutral(3, 2);
        for (x, y) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            pred.set(x, y, DefectClass::Gap);
        }
        for (x, y) in [(1, 0), (2, 0), (1, 1), (2, 1)] {
            gt.set(x, y, DefectClass::Gap);
        }
        let v = iou(&pred, &gt, DefectClass::Gap).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn vacuous_and_one_sided_empty_conventions() {
        let empty = DefectMask::neutral(4, 4);
        let mut some = DefectMask::neutral(4, 4);
        some.set(1, 1, DefectClass::Gap);
        assert_eq!(iou(&empty, &empty, DefectClass::Gap).unwrap(), 1.0);
        assert_eq!(iou(&empty, &some, DefectClass::Gap).unwrap(), 0.0);
        assert_eq!(iou(&some, &empty, DefectClass::Gap).unwrap(), 0.0);
    }

    #[test]
    fn all_neutral_prediction_scores_zero_against_defects() {
        let pred = DefectMask::neutral(4, 4);
        let mut gt = DefectMask::neutral(4, 4);
        gt.set(0, 0, DefectClass::Gap);
        gt.set(3, 3, DefectClass::Overlap);
        let r = evaluate(&pred, &gt).unwrap();
        assert_eq!(r.iou_gap, 0.0);
        assert_eq!(r.iou_overlap, 0.0);
        assert_eq!(r.mean_iou, 0.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = DefectMask::neutral(4, 4);
        let b = DefectMask::neutral(4, 5);
        assert!(matches!(
            evaluate(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn aggregate_of_empty_batch_is_none() {
        assert!(aggregate(&[]).is_none());
    }

    #[test]
    fn aggregate_macro_and_micro_differ_on_skewed_batches() {
        // Image 1: tiny and wrong; image 2: large and right. Macro averages
        // per-image scores, micro pools pixels and favors the large image.
        let p1 = mask_from_codes(2, 1, &[1, 0]);
        let g1 = mask_from_codes(2, 1, &[0, 1]);
        let big = vec![1u8; 100];
        let p2 = mask_from_codes(10, 10, &big);
        let g2 = mask_from_codes(10, 10, &big);
        let reports = vec![evaluate(&p1, &g1).unwrap(), evaluate(&p2, &g2).unwrap()];
        let agg = aggregate(&reports).unwrap();
        assert!((agg.macro_iou_gap - 0.5).abs() < 1e-12);
        assert!((agg.micro_iou_gap - 100.0 / 102.0).abs() < 1e-12);
    }

    /// Naive oracle: explicit pixel-set arithmetic with HashSets.
    fn naive_report(pred: &DefectMask, gt: &DefectMask) -> EvalReport {
        use std::collections::HashSet;
        let setof = |m: &DefectMask, class: DefectClass| -> HashSet<(u32, u32)> {
            let mut s = HashSet::new();
            for y in 0..m.height() {
                for x in 0..m.width() {
                    if m.get(x, y) == class {
                        s.insert((x, y));
                    }
                }
            }
            s
        };
        let counts = |class| {
            let p = setof(pred, class);
            let g = setof(gt, class);
            ClassCounts {
                intersection: p.intersection(&g).count() as u64,
                union: p.union(&g).count() as u64,
                pred: p.len() as u64,
                gt: g.len() as u64,
            }
        };
        let gap = counts(DefectClass::Gap);
        let overlap = counts(DefectClass::Overlap);
        let mut confusion = [[0u64; 3]; 3];
        for y in 0..pred.height() {
            for x in 0..pred.width() {
                confusion[gt.get(x, y).code() as usize][pred.get(x, y).code() as usize] += 1;
            }
        }
        EvalReport {
            iou_gap: gap.iou(),
            iou_overlap: overlap.iou(),
            mean_iou: 0.5 * (gap.iou() + overlap.iou()),
            gap,
            overlap,
            confusion,
        }
    }

    proptest! {
        #[test]
        fn matches_naive_oracle(
            pred_codes in proptest::collection::vec(0u8..=2, 256),
            gt_codes in proptest::collection::vec(0u8..=2, 256),
        ) {
            let pred = mask_from_codes(16, 16, &pred_codes);
            let gt = mask_from_codes(16, 16, &gt_codes);
            prop_assert_eq!(evaluate(&pred, &gt).unwrap(), naive_report(&pred, &gt));
        }

        #[test]
        fn iou_is_symmetric(
            a_codes in proptest::collection::vec(0u8..=2, 64),
            b_codes in proptest::collection::vec(0u8..=2, 64),
        ) {
            let a = mask_from_codes(8, 8, &a_codes);
            let b = mask_from_codes(8, 8, &b_codes);
            for class in [DefectClass::Gap, DefectClass::Overlap] {
                prop_assert_eq!(
                    iou(&a, &b, class).unwrap(),
                    iou(&b, &a, class).unwrap()
                );
            }
        }

        #[test]
        fn confusion_rows_sum_to_gt_counts(
            pred_codes in proptest::collection::vec(0u8..=2, 144),
            gt_codes in proptest::collection::vec(0u8..=2, 144),
        ) {
            let pred = mask_from_codes(12, 12, &pred_codes);
            let gt = mask_from_codes(12, 12, &gt_codes);
            let r = evaluate(&pred, &gt).unwrap();
            for class in [DefectClass::Neutral, DefectClass::Gap, DefectClass::Overlap] {
                let row: u64 = r.confusion[class.code() as usize].iter().sum();
                prop_assert_eq!(row, gt.count(class) as u64);
            }
        }
    }
}
