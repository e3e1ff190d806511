//! Crate-wide error type.

use crate::graph::VertexId;

/// Errors produced by any toolkit operation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed input data (edge lists, dataset files, rosters).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    /// Caller passed an out-of-contract argument.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("balance error: {0}")]
    Balance(String),

    #[error("metric error: {0}")]
    Metric(String),

    #[error("generation error: {0}")]
    Generation(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// An internal invariant was violated; indicates a bug, not bad input.
    #[error("internal invariant violation: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 1 usage, 2 data, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) => 1,
            Error::Internal(_) => 3,
            _ => 2,
        }
    }
}
