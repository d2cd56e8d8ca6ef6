use thiserror::Error;

use crate::cyclotomic::CycloRational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero in cyclotomic field of order {order}")]
    DivisionByZero { order: u64 },

    #[error("invalid relabelling: {0}")]
    InvalidRelabelling(String),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("matrix is singular")]
    Singular,

    #[error("polynomial is not homogeneous of degree {degree}")]
    NotHomogeneous { degree: usize },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("model violation: m-th power of scalar {scalar} is neither 0 nor 1")]
    ModelViolation { scalar: CycloRational },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
