//! Raster containers shared by every pipeline stage.
//!
//! All grids are row-major with the row index growing downward, matching the
//! scan orientation: a "higher" pixel on the part surface is brighter, and an
//! edge's upper side has a smaller row index. Every container is immutable
//! after construction and safe to share across threads.

use crate::error::{Error, Result};

/// Grayscale depth scan with intensities normalized to `[0, 1]`.
///
/// Brightness encodes surface height regardless of the source bit depth, so
/// downstream filter parameters do not depend on whether the scan was stored
/// as 8- or 16-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: u32,
    height: u32,
    data: Vec<f64>,
}

impl DepthMap {
    /// Validates dimensions, buffer length and the `[0, 1]` intensity range.
    pub fn new(width: u32, height: u32, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        for (index, &value) in data.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::IntensityRange { index, value });
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Constant-intensity map.
    pub fn filled(width: u32, height: u32, value: f64) -> Result<Self> {
        Self::new(
            width,
            height,
            vec![value; (width as usize) * (height as usize)],
        )
    }

    /// Builds a map by evaluating `f(col, row)`; the result is clamped to `[0, 1]`.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroSized);
        }
        let mut data = Vec::with_capacity((width as usize) * (height as usize));
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y).clamp(0.0, 1.0));
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub(crate) fn from_parts(width: u32, height: u32, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), (width as usize) * (height as usize));
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    /// Sample with edge replication: out-of-range coordinates clamp to the border.
    #[inline]
    pub fn get_clamped(&self, x: i64, y: i64) -> f64 {
        let cx = x.clamp(0, self.width as i64 - 1) as u32;
        let cy = y.clamp(0, self.height as i64 - 1) as u32;
        self.get(cx, cy)
    }

    pub fn pixels(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, y: u32) -> &[f64] {
        let w = self.width as usize;
        let start = y as usize * w;
        &self.data[start..start + w]
    }
}

/// Boolean raster used to carry edge detections and morphology results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn empty(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; (width as usize) * (height as usize)],
        }
    }

    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        check_dims(width, height, bits.len())?;
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_set(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Iterator over set pixels in raster order.
    pub fn set_pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| ((i as u32) % w, (i as u32) / w))
    }

    /// True when `other` has the same dimensions and a superset of set pixels.
    pub fn subset_of(&self, other: &BinaryMask) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }
}

/// Side of a tow a boundary edge belongs to.
///
/// `Upper` marks a dark-to-bright transition going down the image (tow body
/// below the edge); `Lower` marks bright-to-dark (tow body above).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Upper,
    Lower,
}

impl std::fmt::Display for Polarity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Polarity::Upper => write!(f, "upper"),
            Polarity::Lower => write!(f, "lower"),
        }
    }
}

/// Edge raster where every surviving edge pixel carries a boundary polarity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarEdgeMap {
    width: u32,
    height: u32,
    labels: Vec<Option<Polarity>>,
}

impl PolarEdgeMap {
    pub fn unlabeled(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            labels: vec![None; (width as usize) * (height as usize)],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Option<Polarity> {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, label: Option<Polarity>) {
        self.labels[y as usize * self.width as usize + x as usize] = label;
    }

    /// Pixels carrying the given polarity, raster order.
    pub fn pixels_with(&self, polarity: Polarity) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width;
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, &l)| l == Some(polarity))
            .map(move |(i, _)| ((i as u32) % w, (i as u32) / w))
    }
}

/// Signed vertical gradient raster. Positive means intensity grows with the
/// row index (dark above, bright below).
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGradientMap {
    width: u32,
    height: u32,
    values: Vec<f64>,
}

impl SignedGradientMap {
    pub(crate) fn from_parts(width: u32, height: u32, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), (width as usize) * (height as usize));
        Self {
            width,
            height,
            values,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.values[y as usize * self.width as usize + x as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Per-pixel defect class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(u8)]
pub enum DefectClass {
    Neutral = 0,
    Gap = 1,
    Overlap = 2,
}

impl DefectClass {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(DefectClass::Neutral),
            1 => Some(DefectClass::Gap),
            2 => Some(DefectClass::Overlap),
            _ => None,
        }
    }
}

impl std::fmt::Display for DefectClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DefectClass::Neutral => write!(f, "neutral"),
            DefectClass::Gap => write!(f, "gap"),
            DefectClass::Overlap => write!(f, "overlap"),
        }
    }
}

/// Per-pixel gap/overlap segmentation result (or ground-truth annotation).
///
/// The code table {0 neutral, 1 gap, 2 overlap} is a stable external
/// contract: label PNGs store these raw codes in 8-bit grayscale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectMask {
    width: u32,
    height: u32,
    classes: Vec<DefectClass>,
}

impl DefectMask {
    pub fn neutral(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            classes: vec![DefectClass::Neutral; (width as usize) * (height as usize)],
        }
    }

    pub fn from_classes(width: u32, height: u32, classes: Vec<DefectClass>) -> Result<Self> {
        check_dims(width, height, classes.len())?;
        Ok(Self {
            width,
            height,
            classes,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> DefectClass {
        self.classes[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, class: DefectClass) {
        self.classes[y as usize * self.width as usize + x as usize] = class;
    }

    pub fn classes(&self) -> &[DefectClass] {
        &self.classes
    }

    pub fn count(&self, class: DefectClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    pub fn same_dims(&self, other: &DefectMask) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch {
                a_width: self.width,
                a_height: self.height,
                b_width: other.width,
                b_height: other.height,
            });
        }
        Ok(())
    }
}

fn check_dims(width: u32, height: u32, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::ZeroSized);
    }
    if len != (width as usize) * (height as usize) {
        return Err(Error::BufferLength {
            width,
            height,
            got: len,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_map_rejects_zero_size() {
        assert!(matches!(DepthMap::new(0, 4, vec![]), Err(Error::ZeroSized)));
        assert!(matches!(DepthMap::new(4, 0, vec![]), Err(Error::ZeroSized)));
    }

    #[test]
    fn depth_map_rejects_bad_length() {
        assert!(matches!(
            DepthMap::new(2, 2, vec![0.0; 3]),
            Err(Error::BufferLength { .. })
        ));
    }

    #[test]
    fn depth_map_rejects_out_of_range_intensity() {
        assert!(matches!(
            DepthMap::new(2, 1, vec![0.5, 1.5]),
            Err(Error::IntensityRange { index: 1, .. })
        ));
    }

    #[test]
    fn clamped_sampling_replicates_edges() {
        let m = DepthMap::new(2, 2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(m.get_clamped(-5, 0), 0.1);
        assert_eq!(m.get_clamped(7, 1), 0.4);
        assert_eq!(m.get_clamped(1, -1), 0.2);
    }

    #[test]
    fn defect_class_codes_round_trip() {
        for class in [DefectClass::Neutral, DefectClass::Gap, DefectClass::Overlap] {
            assert_eq!(DefectClass::from_code(class.code()), Some(class));
        }
        assert_eq!(DefectClass::from_code(3), None);
    }

    #[test]
    fn mask_subset_check() {
        let mut a = BinaryMask::empty(3, 3);
        let mut b = BinaryMask::empty(3, 3);
        a.set(1, 1, true);
        b.set(1, 1, true);
        b.set(2, 2, true);
        assert!(a.subset_of(&b));
        assert!(!b.subset_of(&a));
    }
}
