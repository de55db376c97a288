use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller broke an operation's precondition (bad grid, lag out of range, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A model produced something structurally impossible (non-positive gap, ...).
    #[error("model error: {0}")]
    Model(String),

    /// Evaluation landed on a point where a closed form degenerates
    /// (denominator below the singularity threshold).
    #[error("singular point at k = {0}")]
    SingularPoint(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
