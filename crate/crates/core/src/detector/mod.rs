//! Multi-scale detection: image pyramids, dense inference per level, thresholded
//! response maps and throughput measurement.

mod detect;
mod pgm;
mod pyramid;

pub use detect::{benchmark_fps, detect, BenchReport, DetectionResult, LevelDetection, PyramidConfig};
pub use pgm::{decode_pgm, encode_pgm, read_pgm, write_pgm};
pub use pyramid::{build_pyramid, PyramidLevel, DEFAULT_SCALE_FACTOR};
