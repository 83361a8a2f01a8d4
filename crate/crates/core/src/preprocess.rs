//! Scan preprocessing: salt-and-pepper suppression with a median filter.

use crate::error::{Error, Result};
use crate::raster::DepthMap;

/// Applies an `n`×`n` median filter with edge replication.
///
/// `n` must be odd, at least 1 and no larger than the smaller image side.
/// `n = 1` is the identity. Borders replicate the nearest edge pixel, so
/// output dimensions equal input dimensions.
pub fn median_filter(img: &DepthMap, n: u32) -> Result<DepthMap> {
    if n.is_multiple_of(2) || n == 0 {
        return Err(Error::EvenMedianWindow(n as usize));
    }
    if n > img.width() || n > img.height() {
        return Err(Error::WindowTooLarge {
            n: n as usize,
            width: img.width(),
            height: img.height(),
        });
    }
    if n == 1 {
        return Ok(img.clone());
    }

    let (w, h) = (img.width(), img.height());
    let r = (n / 2) as i64;
    let win = (n as usize) * (n as usize);
    let mid = win / 2;
    let mut out = Vec::with_capacity((w as usize) * (h as usize));
    let mut window = Vec::with_capacity(win);
    for y in 0..h {
        for x in 0..w {
            window.clear();
            for dy in -r..=r {
                for dx in -r..=r {
                    window.push(img.get_clamped(x as i64 + dx, y as i64 + dy));
                }
            }
            // Window values come from a validated DepthMap, so they are never NaN
            // and total order via partial_cmp is safe.
            let (_, median, _) =
                window.select_nth_unstable_by(mid, |a, b| a.partial_cmp(b).unwrap());
            out.push(*median);
        }
    }
    Ok(DepthMap::from_parts(w, h, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force oracle: full sort of the replicated neighborhood.
    fn median_oracle(img: &DepthMap, n: u32) -> DepthMap {
        let (w, h) = (img.width(), img.height());
        let r = n as i64 / 2;
        let mut out = Vec::with_capacity((w as usize) * (h as usize));
        for y in 0..h {
            for x in 0..w {
                let mut window = Vec::new();
                for dy in -r..=r {
                    for dx in -r..=r {
                        window.push(img.get_clamped(x as i64 + dx, y as i64 + dy));
                    }
                }
                window.sort_by(|a, b| a.partial_cmp(b).unwrap());
                out.push(window[window.len() / 2]);
            }
        }
        DepthMap::from_parts(w, h, out)
    }

    fn count_isolated_extrema(img: &DepthMap) -> usize {
        let (w, h) = (img.width(), img.height());
        let mut count = 0;
        for y in 1..h.saturating_sub(1) {
            for x in 1..w.saturating_sub(1) {
                let v = img.get(x, y);
                let mut above = 0;
                let mut below = 0;
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let nv = img.get_clamped(x as i64 + dx, y as i64 + dy);
                        if v > nv {
                            above += 1;
                        } else if v < nv {
                            below += 1;
                        }
                    }
                }
                if above == 8 || below == 8 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn constant_image_unchanged() {
        let img = DepthMap::filled(7, 5, 0.42).unwrap();
        assert_eq!(median_filter(&img, 3).unwrap(), img);
        assert_eq!(median_filter(&img, 5).unwrap(), img);
    }

    #[test]
    fn removes_single_hot_pixel() {
        let mut data = vec![0.0; 9];
        data[4] = 1.0;
        let img = DepthMap::new(3, 3, data).unwrap();
        let out = median_filter(&img, 3).unwrap();
        assert_eq!(out.get(1, 1), 0.0);
    }

    #[test]
    fn n1_is_identity() {
        let img = DepthMap::from_fn(6, 4, |x, y| ((x * 7 + y * 3) % 11) as f64 / 10.0).unwrap();
        assert_eq!(median_filter(&img, 1).unwrap(), img);
    }

    #[test]
    fn rejects_even_window() {
        let img = DepthMap::filled(8, 8, 0.5).unwrap();
        assert!(matches!(
            median_filter(&img, 4),
            Err(Error::EvenMedianWindow(4))
        ));
        assert!(matches!(
            median_filter(&img, 0),
            Err(Error::EvenMedianWindow(0))
        ));
    }

    #[test]
    fn rejects_window_larger_than_image() {
        let img = DepthMap::filled(4, 9, 0.5).unwrap();
        assert!(matches!(
            median_filter(&img, 5),
            Err(Error::WindowTooLarge { n: 5, .. })
        ));
    }

    proptest! {
        #[test]
        fn matches_full_sort_oracle(
            seed in proptest::collection::vec(0u8..=255, 256),
            n in prop_oneof![Just(3u32), Just(5), Just(7)],
        ) {
            let data: Vec<f64> = seed.iter().map(|&b| b as f64 / 255.0).collect();
            let img = DepthMap::new(16, 16, data).unwrap();
            let fast = median_filter(&img, n).unwrap();
            let slow = median_oracle(&img, n);
            prop_assert_eq!(fast, slow);
        }

        #[test]
        fn output_values_come_from_input(
            seed in proptest::collection::vec(0u8..=4, 144),
        ) {
            let data: Vec<f64> = seed.iter().map(|&b| b as f64 / 4.0).collect();
            let img = DepthMap::new(12, 12, data.clone()).unwrap();
            let out = median_filter(&img, 3).unwrap();
            for v in out.pixels() {
                prop_assert!(data.contains(v));
            }
        }

        #[test]
        fn never_increases_isolated_extrema(
            seed in proptest::collection::vec(0u8..=255, 144),
        ) {
            let data: Vec<f64> = seed.iter().map(|&b| b as f64 / 255.0).collect();
            let img = DepthMap::new(12, 12, data).unwrap();
            let out = median_filter(&img, 3).unwrap();
            prop_assert!(count_isolated_extrema(&out) <= count_isolated_extrema(&img));
        }
    }
}
