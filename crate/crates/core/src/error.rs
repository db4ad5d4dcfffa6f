//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A grid failed its construction invariants.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Two fields that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A field contains NaN or infinite entries.
    #[error("non-finite values in {0}")]
    NonFinite(String),

    /// An operation precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Drift, overflow or loss of accuracy beyond tolerance.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
