use thiserror::Error;

/// Errors produced while building, relaxing or solving a problem.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("polynomial is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("relaxation order {order} is below the minimum order {min_order}")]
    OrderTooLow { order: u32, min_order: u32 },

    #[error("constraint {0} does not fit any variable clique")]
    UnassignableConstraint(usize),

    #[error("objective term over variables {0:?} does not fit any variable clique")]
    UnassignableObjectiveTerm(Vec<usize>),

    #[error("objective is empty")]
    EmptyObjective,

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid network data: {0}")]
    Network(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("optimality gap undefined for a zero reference objective")]
    ZeroReference,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
