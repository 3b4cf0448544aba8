use thiserror::Error;

/// Errors raised by the lattice, evolution and audit routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An external block `A_{j,k}` (|j-k| = s) that must be invertible is singular.
    #[error("constraint violation: external block A[{row},{col}] is singular (smallest singular value {sigma_min:e})")]
    SingularExternal { row: i64, col: i64, sigma_min: f64 },

    #[error("constraint violation: {0}")]
    Constraint(String),

    #[error("unsupported argument: {0}")]
    Unsupported(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("overflow: {0}")]
    Overflow(String),

    /// Input does not satisfy the routine's precondition; `residual` quantifies by how much.
    #[error("precondition violation: {message} (residual {residual:e})")]
    Precondition { message: String, residual: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
