//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by model evaluation, fitting and data ingestion.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two inputs that must agree (e.g. thresholds) do not.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The sample carries no usable information (e.g. all mass at the threshold).
    #[error("degenerate sample: {0}")]
    Degenerate(String),

    /// Too few observations for the requested fit.
    #[error("sample too small: need at least {min}, got {got}")]
    SampleTooSmall { min: usize, got: usize },

    /// The observed information matrix could not be inverted.
    #[error("singular observed information: {0}")]
    SingularInformation(String),

    /// An iterative scheme failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Malformed input data.
    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
