use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A record could not be decoded. `line` is 1-based.
    #[error("{origin}:{line}: parse error: {message}")]
    Parse { origin: String, line: usize, message: String },

    /// Well-formed input that breaks a data-model invariant.
    #[error("{0}")]
    Validation(String),

    /// A doc id or sentence index that does not resolve.
    #[error("dangling reference: {0}")]
    Reference(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// The caller violated an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("{count} candidates exceed the exact solver cap of {cap}; use the greedy solver or raise the cap")]
    CapExceeded { count: usize, cap: usize },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn parse(origin: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse { origin: origin.to_string(), line, message: message.into() }
    }

    /// Prefixes validation and reference messages with their location.
    pub(crate) fn at(self, origin: &str, line: usize) -> Self {
        match self {
            Error::Validation(m) => Error::Validation(format!("{origin}:{line}: {m}")),
            Error::Reference(m) => Error::Reference(format!("{origin}:{line}: {m}")),
            other => other,
        }
    }
}
