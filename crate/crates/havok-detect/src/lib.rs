//! Model-free event and anomaly detection for noisy univariate time
//! series.
//!
//! The pipeline works in four stages: build a bank of multivariate basis
//! functions from the raw samples, stack them into a time-feature Hankel
//! matrix and extract empirical modes by SVD, fit a linear one-step model
//! to the dominant modes with the trailing mode treated as a residual
//! driving force, and finally calibrate a decision threshold from the
//! amplitude histogram of the combined decision signal. No generative
//! model, labels, or training data are required.
//!
//! The crate ships as a library first; see the `examples/` directory for
//! one runnable program per capability, and the `havok-detect` binary for
//! file-based detection, synthetic data generation, and benchmark sweeps.

pub mod cli;
pub mod detector;
pub mod dynamics;
pub mod embedding;
pub mod error;
pub mod features;
pub mod io;
pub mod series;
pub mod synth;
pub mod threshold;

pub use detector::{run_pipeline, DetectionReport, Event};
pub use error::{Error, Result};
pub use series::{AutoOr, FeatureBank, PipelineConfig, ThresholdMethod, TimeSeries};
