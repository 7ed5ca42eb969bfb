use thiserror::Error;

/// Errors raised by the grid, analysis, solver and probe layers.
#[derive(Debug, Error)]
pub enum KghError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("ratio is undefined: {0}")]
    UndefinedRatio(String),

    #[error("index {index} out of range: {reason}")]
    OutOfRange { index: i64, reason: String },

    #[error("solver aborted at step {step}: {reason}")]
    SolverAbort { step: usize, reason: String },

    #[error(
        "Picard iteration diverged after {iterations} iterates (contraction factors {factors:?})"
    )]
    Divergence {
        iterations: usize,
        factors: Vec<f64>,
    },

    #[error("exponent gate failed: {0}")]
    GateFailed(String),

    #[error("snapshot format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, KghError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> KghError {
    KghError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
