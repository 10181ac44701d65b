use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("improper convex function: {0}")]
    Improper(String),

    #[error("no coercivity witness: {0}")]
    NoWitness(String),

    #[error("degenerate region: {0}")]
    Degenerate(String),

    #[error("unbounded feasible region; supply a bounding box")]
    Unbounded,

    #[error("invalid measure pair ({condition}): {detail}")]
    InvalidPair { condition: String, detail: String },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
