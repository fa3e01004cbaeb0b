use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] sigplex::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("invalid value for `{key}`: {message}")]
    Setting { key: String, message: String },

    #[error("{path}:{line}: {message}")]
    ConfigFile { path: PathBuf, line: usize, message: String },
}

impl CliError {
    /// Process exit status: 1 I/O, 2 invalid argument, 3 parse, 4 invariant.
    pub fn exit_code(&self) -> i32 {
        use sigplex::Error as E;
        match self {
            Self::Io { .. } | Self::Core(E::Io(_)) => 1,
            Self::Setting { .. } | Self::Core(E::InvalidArgument(_) | E::OutOfRange(_) | E::DimensionCoherence(_)) => 2,
            Self::ConfigFile { .. } | Self::Core(E::Parse { .. }) => 3,
            Self::Core(E::Invariant(_)) => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
