use thiserror::Error;

/// Errors from grid construction, solvers and I/O.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("geometry does not fit the grid: {0}")]
    Geometry(String),

    #[error("unsupported potential: {0}")]
    UnsupportedPotential(String),

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl CoreError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CoreError::InvalidInput(msg.into())
    }
}
