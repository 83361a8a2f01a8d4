//! End-to-end boundary fidelity on noiseless, driftless scenes: every
//! reconstructed boundary must stay within 1 px RMS of the matching truth
//! curve over the columns both cover.

use towscan_core::pipeline::{run_pipeline, Params};
use towscan_core::raster::Polarity;
use towscan_core::synth::{generate, SceneSpec};

fn sharp() -> Params {
    Params {
        sigma: 0.5,
        canny_low: 0.3,
        canny_high: 0.6,
        // Default d_th assumes scan-scale tow heights; these scenes stack
        // boundaries as close as 6 rows, so shrink the merge radius to match.
        d_th: 16.0,
        ..Params::default()
    }
}

#[test]
fn boundaries_within_one_pixel_rms_of_truth() {
    for offsets in [
        vec![4.0],
        vec![-4.0],
        vec![3.0, -3.0],
        vec![2.0],
        vec![-2.0, 4.0],
    ] {
        let spec = SceneSpec::from_offsets(96, 90, 10, 0.55, 0.2, 12.0, &offsets, 5);
        let scene = generate(&spec).unwrap();
        let out = run_pipeline(&scene.image, &sharp()).unwrap();
        assert_eq!(
            out.boundaries.len(),
            2 * spec.courses.len(),
            "offsets {offsets:?}: expected two boundaries per tow"
        );

        let mut sq_sum = 0.0f64;
        let mut count = 0usize;
        for b in &out.boundaries {
            // Match the detected boundary to the closest truth curve of the
            // same polarity by mean offset, then accumulate its residuals.
            let (lo, hi) = b.domain();
            let cols: Vec<u32> = (lo.ceil() as u32..=hi.floor() as u32).collect();
            let best = scene
                .curves
                .iter()
                .map(|tow| match b.polarity {
                    Polarity::Upper => &tow.upper,
                    Polarity::Lower => &tow.lower,
                })
                .min_by(|ca, cb| {
                    let mean = |curve: &Vec<f64>| {
                        cols.iter()
                            .map(|&c| (b.evaluate(c as f64).unwrap() - curve[c as usize]).abs())
                            .sum::<f64>()
                            / cols.len() as f64
                    };
                    mean(ca).partial_cmp(&mean(cb)).unwrap()
                })
                .unwrap();
            for &c in &cols {
                let err = b.evaluate(c as f64).unwrap() - best[c as usize];
                sq_sum += err * err;
                count += 1;
            }
        }
        let rms = (sq_sum / count as f64).sqrt();
        assert!(
            rms <= 1.0,
            "offsets {offsets:?}: boundary RMS {rms} exceeds 1 px"
        );
    }
}
