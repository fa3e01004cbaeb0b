use thiserror::Error;

/// Errors raised by the inference pipeline and its file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    /// Vertices carry different channel counts and no coherence mode was chosen.
    #[error(
        "dimension coherence: {0} (choose a coherence mode: `project` keeps the shared \
         channels, `zero-pad` or `time` augments the lower-dimensional series)"
    )]
    DimensionCoherence(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
