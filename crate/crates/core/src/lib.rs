//! Sliding-window scene text spotting with character (unigram) and character-pair
//! (bigram) convolutional detectors.
//!
//! The crate is organised bottom-up:
//!
//! - [`tensor`]: a small `f32`/`f64` tensor engine with forward and backward passes
//!   for valid convolution, ReLU, 2×2 max pooling, dropout and softmax cross-entropy,
//!   plus a finite-difference gradient checker.
//! - [`netzoo`]: the three reference architectures, per-window and dense
//!   (fully-convolutional) inference, and analytic MAC accounting.
//! - [`synthgen`]: a stroke-font renderer and the synthetic patch generator, with the
//!   `BGDS` dataset container.
//! - [`trainer`]: Adam, mini-batch training and the `BGNM` model container.
//! - [`detector`]: image pyramids, multi-scale dense detection, PGM I/O and throughput
//!   measurement.
//! - [`evalkit`]: ROC sweeps, fixed-precision operating points and CSV/SVG reports.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the default
//! `parallel` feature is enabled and plain iterators otherwise. Results never depend
//! on the number of worker threads.

pub mod detector;
pub mod error;
pub mod evalkit;
pub mod image;
pub mod netzoo;
pub mod par;
pub mod rng;
pub mod synthgen;
pub mod tensor;
pub mod trainer;

pub use error::{Error, Result};
