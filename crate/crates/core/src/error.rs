use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent {0}: Lebesgue exponents must satisfy p >= 1")]
    InvalidExponent(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("coefficient evaluation produced a non-finite value at node {node}")]
    Evaluation { node: usize },
    #[error("linear solve failed: {0}")]
    LinearSolve(String),
    #[error("hypothesis validation refused: {0}")]
    ValidationRefused(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
