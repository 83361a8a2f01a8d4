//! Image file I/O.
//!
//! Depth scans arrive as 8- or 16-bit grayscale PNG or PGM; both are
//! normalized to `[0, 1]` on load so the pipeline never sees raw counts.
//! Label masks use raw class codes {0, 1, 2} in 8-bit grayscale.

use std::path::Path;

use image::{DynamicImage, GrayImage, ImageReader, RgbImage};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, DefectClass, DefectMask, DepthMap};

fn read_image(path: &Path) -> Result<DynamicImage> {
    let reader = ImageReader::open(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    reader.decode().map_err(|source| Error::Codec {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a grayscale depth scan and normalizes intensities to `[0, 1]`.
///
/// 8-bit samples divide by 255, 16-bit by 65535. Color inputs are rejected
/// rather than silently flattened: a color scan indicates a wrong export.
pub fn load_depth_map(path: impl AsRef<Path>) -> Result<DepthMap> {
    let path = path.as_ref();
    let img = read_image(path)?;
    let (data, width, height) = match img {
        DynamicImage::ImageLuma8(buf) => {
            let (w, h) = buf.dimensions();
            let data = buf.pixels().map(|p| p.0[0] as f64 / 255.0).collect();
            (data, w, h)
        }
        DynamicImage::ImageLuma16(buf) => {
            let (w, h) = buf.dimensions();
            let data = buf.pixels().map(|p| p.0[0] as f64 / 65535.0).collect();
            (data, w, h)
        }
        other => {
            return Err(Error::MultiChannel(format!(
                "{path:?} has color type {:?}; expected 8- or 16-bit grayscale",
                other.color()
            )))
        }
    };
    DepthMap::new(width, height, data)
}

/// Saves a depth map as 16-bit grayscale PNG (quantized by rounding).
pub fn save_depth_png(map: &DepthMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = image::ImageBuffer::<image::Luma<u16>, Vec<u16>>::new(map.width(), map.height());
    for (x, y, px) in buf.enumerate_pixels_mut() {
        px.0[0] = (map.get(x, y) * 65535.0).round() as u16;
    }
    buf.save(path).map_err(|source| Error::Codec {
        path: path.to_path_buf(),
        source,
    })
}

/// Saves a binary mask as 8-bit PNG, set pixels white.
pub fn save_mask_png(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = GrayImage::new(mask.width(), mask.height());
    for (x, y, px) in buf.enumerate_pixels_mut() {
        px.0[0] = if mask.get(x, y) { 255 } else { 0 };
    }
    buf.save(path).map_err(|source| Error::Codec {
        path: path.to_path_buf(),
        source,
    })
}

/// Saves a defect mask as 8-bit PNG holding raw class codes {0, 1, 2}.
pub fn save_defect_mask(mask: &DefectMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = GrayImage::new(mask.width(), mask.height());
    for (x, y, px) in buf.enumerate_pixels_mut() {
        px.0[0] = mask.get(x, y).code();
    }
    buf.save(path).map_err(|source| Error::Codec {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a defect mask stored as raw class codes in 8-bit grayscale.
///
/// Any sample outside {0, 1, 2} is an error; label images are an exact
/// contract and an unexpected code means the file is not a label mask.
pub fn load_defect_mask(path: impl AsRef<Path>) -> Result<DefectMask> {
    let path = path.as_ref();
    let img = read_image(path)?;
    let buf = match img {
        DynamicImage::ImageLuma8(buf) => buf,
        other => {
            return Err(Error::MultiChannel(format!(
                "{path:?} has color type {:?}; expected 8-bit grayscale label mask",
                other.color()
            )))
        }
    };
    let (width, height) = buf.dimensions();
    let mut classes = Vec::with_capacity((width as usize) * (height as usize));
    for (index, px) in buf.pixels().enumerate() {
        let code = px.0[0];
        match DefectClass::from_code(code) {
            Some(class) => classes.push(class),
            None => return Err(Error::InvalidLabelCode { index, code }),
        }
    }
    DefectMask::from_classes(width, height, classes)
}

/// Renders the scan with defect pixels tinted (gap red, overlap green).
pub fn save_overlay_png(map: &DepthMap, mask: &DefectMask, path: impl AsRef<Path>) -> Result<()> {
    save_rgb_png(&crate::render::render_overlay(map, mask)?, path)
}

/// Writes any rendered RGB image as PNG.
pub fn save_rgb_png(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    img.save(path).map_err(|source| Error::Codec {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Rgb;
    use tempfile::tempdir;

    #[test]
    fn depth_round_trip_16bit_png() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("scan.png");
        let map = DepthMap::from_fn(8, 6, |x, y| (x + y) as f64 / 13.0).unwrap();
        save_depth_png(&map, &path).unwrap();
        let back = load_depth_map(&path).unwrap();
        assert_eq!(back.width(), 8);
        assert_eq!(back.height(), 6);
        for (a, b) in map.pixels().iter().zip(back.pixels()) {
            assert!((a - b).abs() <= 0.5 / 65535.0 + 1e-12);
        }
    }

    #[test]
    fn loads_8bit_pgm() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("scan.pgm");
        let mut buf = GrayImage::new(4, 3);
        for (x, y, px) in buf.enumerate_pixels_mut() {
            px.0[0] = (x * 20 + y * 5) as u8;
        }
        buf.save(&path).unwrap();
        let map = load_depth_map(&path).unwrap();
        assert_eq!((map.width(), map.height()), (4, 3));
        assert!((map.get(3, 2) - 70.0 / 255.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_color_input() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("color.png");
        let buf = RgbImage::from_pixel(4, 4, Rgb([10, 20, 30]));
        buf.save(&path).unwrap();
        assert!(matches!(load_depth_map(&path), Err(Error::MultiChannel(_))));
    }

    #[test]
    fn defect_mask_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("labels.png");
        let mut mask = DefectMask::neutral(5, 4);
        mask.set(1, 1, DefectClass::Gap);
        mask.set(2, 3, DefectClass::Overlap);
        save_defect_mask(&mask, &path).unwrap();
        let back = load_defect_mask(&path).unwrap();
        assert_eq!(back, mask);
    }

    #[test]
    fn rejects_unknown_label_code() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.png");
        let mut buf = GrayImage::new(2, 2);
        buf.put_pixel(1, 0, image::Luma([7]));
        buf.save(&path).unwrap();
        assert!(matches!(
            load_defect_mask(&path),
            Err(Error::InvalidLabelCode { index: 1, code: 7 })
        ));
    }

    #[test]
    fn missing_file_is_a_read_error() {
        assert!(matches!(
            load_depth_map("/nonexistent/scan.png"),
            Err(Error::Read { .. })
        ));
    }
}
