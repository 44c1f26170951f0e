use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A parameter lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects were combined whose grids or parameters do not match.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A quadrature or iteration lost accuracy beyond repair.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An iterative method exhausted its budget without reaching tolerance.
    #[error("did not converge: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

impl CoreError {
    pub fn domain(msg: impl Into<String>) -> Self {
        CoreError::Domain(msg.into())
    }
    pub fn mismatch(msg: impl Into<String>) -> Self {
        CoreError::GridMismatch(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        CoreError::Numerical(msg.into())
    }
}
