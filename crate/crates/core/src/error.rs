use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is rational")]
    RationalValue,
    #[error("radicand must be positive, got {0}")]
    InvalidRadicand(String),
    #[error("radicand {0} is not a squarefree integer > 1")]
    NonCanonicalRadicand(String),
    #[error("matrix has c = d = 0")]
    DegenerateMatrix,
    #[error("operation requires a real quadratic irrational")]
    NotReal,
    #[error("matrix determinant is {0}, expected 1")]
    NotUnimodular(String),
    #[error("matrix is not hyperbolic (|trace| <= 2)")]
    NotHyperbolic,
    #[error("fixed point at infinity (c = 0)")]
    FixedPointAtInfinity,
    #[error("{what} = {value} is outside the supported range {range}")]
    BoundExceeded {
        what: &'static str,
        value: String,
        range: String,
    },
    #[error("trace or norm is not an integer")]
    NotIntegral,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
