use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Vectors or states that do not fit the declared schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A caller broke an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),

    /// No admissible action exists for the current state.
    #[error("decision error: {0}")]
    Decision(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("snapshot format version {found} is newer than supported version {supported}")]
    Version { found: u64, supported: u64 },

    #[error("load error at `{field}`: {message}")]
    Load { field: String, message: String },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
