//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by parsing, validation, embedding providers, and the
/// numerical pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input payload (JSON syntax, wrong field types, ...).
    #[error("parse error: {0}")]
    Parse(String),

    /// A structural invariant was violated (duplicate ids, bad bboxes,
    /// mismatched region sets, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Two vectors (or a vector and a provider config) disagree on dimension.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// The remote embedding service failed or returned a non-conforming
    /// response. `batch` is the zero-based index of the failing batch.
    #[error("embedding transport error in batch {batch}: {message}")]
    Transport { batch: usize, message: String },

    /// An argument was outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The eigensolver hit its sweep limit before reaching tolerance.
    #[error("eigendecomposition did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to:
    /// 2 input, 3 validation/mismatch, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Transport { .. } | Error::Io(_) => 2,
            Error::Validation(_) | Error::DimensionMismatch { .. } | Error::Domain(_) => 3,
            Error::NoConvergence { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
