use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration key violates one of its constraints.
    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("array shape mismatch for {field}: expected {expected:?}, found {found:?}")]
    Shape {
        field: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("state is missing the {0} auxiliary arrays required by this scheme")]
    MissingAux(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("sampling lattices differ: {0}")]
    LatticeMismatch(String),

    #[error("non-finite field value after step {step}")]
    NonFinite { step: usize },

    #[error("{0}")]
    Estimation(String),

    #[error("failed to parse {path}: {reason}")]
    Parse { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Parse { .. } => 1,
            _ => 2,
        }
    }
}
