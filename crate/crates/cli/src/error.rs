use thiserror::Error;

/// Errors of a command-line run, each with its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// `validate` found at least one error.
    #[error("validation failed with {0} error(s)")]
    Invalid(usize),

    /// The simulation library rejected the run.
    #[error(transparent)]
    Core(circsync::Error),

    /// Some gossip trials did not synchronize within `max_steps`.
    #[error("{timeouts} of {trials} gossip trials timed out")]
    GossipTimeout { timeouts: usize, trials: usize },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl From<circsync::Error> for CliError {
    fn from(e: circsync::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// `1` i/o, `2` configuration, `3` violated precondition or capacity,
    /// `4` gossip timeout.
    pub fn exit_code(&self) -> u8 {
        use circsync::Error as E;
        match self {
            CliError::Io { .. } | CliError::Core(E::Io(_)) => 1,
            CliError::Config(_) | CliError::Invalid(_) => 2,
            CliError::Core(E::InvalidArgument(_) | E::Json(_)) => 2,
            CliError::Core(E::Precondition { .. } | E::Capacity(_)) => 3,
            CliError::GossipTimeout { .. } => 4,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
