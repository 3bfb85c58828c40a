use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the front end, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input files.
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    /// A numerical failure: ill-conditioning, positivity, normalization.
    #[error("{context}{source}")]
    Numerical {
        context: String,
        #[source]
        source: micbench_core::Error,
    },
    /// The computation succeeded but the checked property does not hold.
    #[error("{0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::CheckFailed(_) => 1,
            Self::Usage(_) | Self::Io { .. } | Self::Format { .. } => 2,
            Self::Numerical { .. } => 3,
        }
    }

    pub fn numerical(context: impl Into<String>, source: micbench_core::Error) -> Self {
        Self::Numerical {
            context: context.into(),
            source,
        }
    }
}

impl From<micbench_core::Error> for CliError {
    fn from(source: micbench_core::Error) -> Self {
        use micbench_core::Error as E;
        match source {
            E::InvalidSpec(m) | E::InvalidConfig(m) => Self::Usage(m),
            E::UnknownDimension(_) | E::InvalidRank { .. } => Self::Usage(source.to_string()),
            other => Self::numerical("", other),
        }
    }
}
