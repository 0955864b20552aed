use thiserror::Error;

/// Errors raised by the operations of this crate.
///
/// Every variant describes a violated precondition except `Invariant`,
/// which signals an internal consistency failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("weight vector needs at least two entries, got {0}")]
    TooShort(usize),
    #[error("weight at index {0} is zero; weights must be positive")]
    NonPositiveWeight(usize),
    #[error("weights have common divisor {0}; divide it out first")]
    CommonDivisor(u64),
    #[error("weights {0:?} are not well-formed; normalize them first")]
    NotWellFormed(Vec<u64>),
    #[error("index {index} out of range for {len} coordinates")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("term {term} has degree {found}, expected {expected}")]
    Inhomogeneous { term: String, found: u64, expected: u64 },
    #[error("not covered: {0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn pre<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
