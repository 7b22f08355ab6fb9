use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("thin domain: {accepted} of {attempts} rejection draws landed inside")]
    ThinDomain { accepted: usize, attempts: usize },

    #[error("domain is empty after shrinking by {0}")]
    EmptyDomain(f64),

    #[error("no information: the node set is empty")]
    EmptyInformation,

    #[error("point lies outside the domain")]
    OutsideDomain,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("eigensolver did not converge: {0}")]
    NotConverged(String),

    #[error("no plateau: {0}")]
    NoPlateau(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
