use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("index out of range or repeated: {0:?}")]
    BadIndex(Vec<usize>),
    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("value is not representable in this coefficient ring")]
    NotRepresentable,
    #[error("3-form is not definite (margin {margin:e})")]
    NotDefinite { margin: f64 },
    #[error("form is not of the required type (residual {0:e})")]
    Impure(f64),
    #[error("Jacobi identity fails (residual {0:e})")]
    Jacobi(f64),
    #[error("structure is not closed (residual {0:e})")]
    NotClosed(f64),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
