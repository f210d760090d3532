use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A weight matrix does not single out one permutation for some index.
    #[error("weight matrix is not generic at {index:?}: permutations {tied:?} attain the minimum")]
    NonCoherent {
        index: Vec<usize>,
        tied: Vec<Vec<usize>>,
    },

    #[error("unsupported factor polytope: {0}")]
    UnsupportedFactor(String),

    #[error("no mutation step: {0}")]
    NoStep(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
