use thiserror::Error;

/// Failures of a CLI invocation, each mapped to a distinct exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] bchterm::Error),
    #[error("verification failed: {0}")]
    Mismatch(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed document: {0}")]
    Format(String),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io {
            context: context.into(),
            source,
        }
    }

    /// 0 success, 1 invalid arguments, 2 verification mismatch, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::Compute(_) => 1,
            Self::Mismatch(_) => 2,
            Self::Io { .. } | Self::Format(_) => 3,
        }
    }
}
