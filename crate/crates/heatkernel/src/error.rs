use thiserror::Error;

/// Errors raised by the numerical and symbolic routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("argument {0} is not strictly positive")]
    NonPositive(f64),
    #[error("arguments {0} and {1} coincide; the recursion needs distinct values")]
    Coincident(f64, f64),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive definite (smallest eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("ill-conditioned operator: eigenvalue ratio {0:.3e} below 1e-12")]
    IllConditioned(f64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("projector check failed: deviation {0:.3e}")]
    NotIdempotent(f64),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("least-squares fit failed: {0}")]
    Fit(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
