//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by the detection pipeline and its building blocks.
#[derive(Debug, Error)]
pub enum Error {
    /// The input series itself is unusable (NaN/Inf samples, too short,
    /// non-positive sample period).
    #[error("invalid series: {0}")]
    InvalidSeries(String),

    /// A configuration value is out of bounds for the given data.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A numerical routine failed (degenerate regression, non-finite
    /// intermediate, decomposition failure).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// File access failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A data file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An error raised by a named pipeline stage.
    #[error("stage '{stage}': {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Walk to the innermost error, unwrapping stage attribution.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// True when the root cause is a data/configuration problem rather
    /// than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self.root(),
            Error::InvalidSeries(_) | Error::InvalidConfig(_) | Error::Io(_) | Error::Parse { .. }
        )
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
