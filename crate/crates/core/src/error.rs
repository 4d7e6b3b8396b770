use thiserror::Error;

/// Errors raised by the numerical kernel and the criteria built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |H - H^dagger| = {violation:e} exceeds {tol:e}")]
    NotHermitian { violation: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} below -{tol:e}")]
    NotPsd { eigenvalue: f64, tol: f64 },

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("correlation entry ({row}, {col}) has imaginary residue {residue:e}")]
    NonRealCorrelation { row: usize, col: usize, residue: f64 },

    #[error("matrix is not orthogonal: max |O^T O - I| = {violation:e}")]
    NotOrthogonal { violation: f64 },

    #[error("invalid mixture weights: {0}")]
    BadWeights(String),

    #[error("parameter out of range: {0}")]
    Range(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("non-finite matrix entry at index {0}")]
    NonFinite(usize),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
