use std::path::PathBuf;

/// Errors produced anywhere in the evaluation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed invocation or configuration (bad flag values, empty sweeps).
    #[error("usage error: {0}")]
    Usage(String),

    /// Inputs that are well-formed files but semantically invalid for the
    /// requested operation (length mismatches, empty partitions, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// Byte-level container or manifest problems.
    #[error("format error in {path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error("dimension mismatch: expected {expected} columns, got {got}")]
    Dimension { expected: usize, got: usize },

    /// NaN/Inf encountered in data or produced by a computation.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Format { path: path.into(), msg: msg.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Numeric(_) => 4,
            Error::Input(_) | Error::Format { .. } | Error::Dimension { .. } | Error::Io { .. } => 3,
        }
    }

    /// Wraps the message with a context prefix, keeping the variant.
    pub fn context(self, ctx: impl std::fmt::Display) -> Self {
        match self {
            Error::Usage(m) => Error::Usage(format!("{ctx}: {m}")),
            Error::Input(m) => Error::Input(format!("{ctx}: {m}")),
            Error::Numeric(m) => Error::Numeric(format!("{ctx}: {m}")),
            Error::Format { path, msg } => Error::Format { path, msg: format!("{ctx}: {msg}") },
            io @ Error::Io { .. } => io,
            dim @ Error::Dimension { .. } => Error::Input(format!("{ctx}: {dim}")),
        }
    }
}
