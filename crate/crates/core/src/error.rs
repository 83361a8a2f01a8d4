//! Error type shared by all pipeline stages.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by raster construction, file I/O and pipeline stages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("image has zero width or height")]
    ZeroSized,

    #[error("pixel buffer length {got} does not match {width}x{height}")]
    BufferLength { width: u32, height: u32, got: usize },

    #[error("intensity {value} at index {index} is outside [0, 1]")]
    IntensityRange { index: usize, value: f64 },

    #[error("dimension mismatch: {a_width}x{a_height} vs {b_width}x{b_height}")]
    DimensionMismatch {
        a_width: u32,
        a_height: u32,
        b_width: u32,
        b_height: u32,
    },

    #[error("expected a single-channel grayscale image, got {0}")]
    MultiChannel(String),

    #[error("invalid defect label code {code} at pixel index {index} (expected 0, 1 or 2)")]
    InvalidLabelCode { index: usize, code: u8 },

    #[error("median window must be odd, got {0}")]
    EvenMedianWindow(usize),

    #[error("median window {n} exceeds image extent {width}x{height}")]
    WindowTooLarge { n: usize, width: u32, height: u32 },

    #[error("image {width}x{height} is too small for this operation (minimum {min}x{min})")]
    ImageTooSmall { width: u32, height: u32, min: u32 },

    #[error("invalid Canny parameters: {0}")]
    InvalidCannyParams(String),

    #[error("invalid grouping parameters: {0}")]
    InvalidGroupingParams(String),

    #[error("regions have mismatched polarity")]
    PolarityMismatch,

    #[error("polyline columns must be strictly increasing (violation near index {0})")]
    NonMonotoneColumns(usize),

    #[error("polyline needs at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("x = {x} is outside the boundary domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("invalid scene spec: {0}")]
    InvalidScene(String),

    #[error("empty sampling range for {0}")]
    EmptyRange(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("failed to read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image codec error for {path}: {source}")]
    Codec {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
