use thiserror::Error;

/// Errors raised across the polynomial, toric and estimation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("unsupported structure: {0}")]
    UnsupportedStructure(String),

    #[error(
        "infeasible moments after {iterations} iterations (residual {residual:.3e}): {detail}"
    )]
    InfeasibleMoments {
        iterations: usize,
        residual: f64,
        detail: String,
    },

    #[error("rank-deficient constraints: {0}; remove linearly dependent constraint rows")]
    RankDeficient(String),

    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
