use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    /// An input value is outside the domain of the operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A dynamical precondition (gain bound, spread condition, ...) does not hold.
    #[error("precondition violated: {reason}")]
    Precondition {
        /// The offending vertex, when the violation is local to one agent.
        vertex: Option<usize>,
        reason: String,
    },

    /// An exact computation would exceed the supported problem size.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn precondition(vertex: Option<usize>, reason: impl Into<String>) -> Self {
        Error::Precondition {
            vertex,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
