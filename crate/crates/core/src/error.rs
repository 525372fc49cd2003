use thiserror::Error;

/// Which side of a split a failed interval scan belonged to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("lowest-point property violated on the {side:?} side")]
    PropertyViolation { side: Side },
    #[error("object {index} contains no point of the instance")]
    Unhittable { index: usize },
    #[error("verification failed: object {index} is not hit")]
    Verification { index: usize },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("no good pair found: {0}")]
    NoGoodPair(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
