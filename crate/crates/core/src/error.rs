use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("point {point} outside domain of degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("step budget of {budget} recursion states exceeded")]
    BudgetExceeded { budget: usize },

    #[error("element has infinite order (recursion cycle with multiplier {multiplier})")]
    InfiniteOrder { multiplier: usize },

    #[error("certificate integrity: {0}")]
    Integrity(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
