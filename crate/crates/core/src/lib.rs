//! Gap and overlap detection in depth scans of fiber-placement layups.
//!
//! Automated fiber placement lays composite tape in parallel tows; laser
//! profilometers scan the result as a grayscale depth map where tows read
//! brighter than the substrate. This crate finds the two defect classes
//! that matter in that image: gaps (tows too far apart, substrate showing)
//! and overlaps (tows stacked on each other).
//!
//! The pipeline is classical and fully deterministic:
//!
//! 1. median filter ([`preprocess::median_filter`]),
//! 2. Canny edges plus a horizontal morphological opening to keep only
//!    tow-direction edges ([`edges`]),
//! 3. polarity classification by vertical gradient sign: upper boundaries
//!    brighten downward, lower boundaries darken ([`edges::classify_edges`]),
//! 4. connected edge fragments grouped by a weighted endpoint distance and
//!    merged into one trace per tow boundary ([`towlines`]),
//! 5. a cubic smoothing spline per boundary ([`spline`]),
//! 6. facing boundaries of adjacent tows paired and their clearance
//!    classified per column ([`segmentation`]),
//! 7. pixel IoU scoring against ground truth ([`evaluation`]).
//!
//! [`pipeline::run_pipeline`] chains the stages; [`synth`] generates test
//! scenes with exact truth masks for end-to-end validation.

pub mod edges;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod pipeline;
pub mod preprocess;
pub mod raster;
pub mod render;
pub mod segmentation;
pub mod spline;
pub mod synth;
pub mod towlines;

pub use error::{Error, Result};
pub use pipeline::{run_pipeline, Params, PipelineOutput};
pub use raster::{BinaryMask, DefectClass, DefectMask, DepthMap, PolarEdgeMap, Polarity};
