//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an operation's inputs was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An iterative procedure ran out of its step budget. `last_delta` is the
    /// distance between the final two iterates.
    #[error("failed to converge after {steps} steps (last delta {last_delta:.3e})")]
    ConvergenceFailure { steps: usize, last_delta: f64 },

    /// A solver was asked for a solution that does not exist in the model.
    #[error("no solution: {0}")]
    NoSolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
