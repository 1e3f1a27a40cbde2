//! Error type shared by every fallible operation in the crate.

use thiserror::Error;

/// Errors surfaced by tensor algebra, the filtering pipeline, and file I/O.
#[derive(Debug, Error)]
pub enum CdidError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("mode {mode} out of range for order-{order} tensor")]
    ModeOutOfRange { mode: usize, order: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("{algorithm} did not converge within {sweeps} sweeps")]
    NonConvergence {
        algorithm: &'static str,
        sweeps: usize,
    },

    #[error("bad magic bytes: expected {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: String },

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },

    #[error("unsupported dtype code {0}")]
    UnsupportedDtype(u8),

    #[error("field side {0} exceeds the supported maximum of 65535")]
    SideTooLarge(usize),

    #[error("malformed PGM: {0}")]
    BadPgm(String),

    #[error("degenerate scene: {0}")]
    DegenerateScene(String),

    #[error("incomplete benchmark grid: missing cell {0}")]
    MissingCells(String),

    #[error("unknown algorithm {0:?}")]
    UnknownAlgorithm(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CdidError>;
