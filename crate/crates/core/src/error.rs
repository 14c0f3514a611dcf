use std::path::PathBuf;

/// Errors produced by the toolkit.
///
/// The CLI maps [`Error::Io`] to exit status 2 and every other variant to 1.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Validation(String),

    #[error("duplicate doc_id {0:?}")]
    DuplicateDocId(String),

    #[error("unknown document {0:?}")]
    UnknownDocument(String),

    #[error("unknown topic {0:?}")]
    UnknownTopic(String),

    #[error("empty query")]
    EmptyQuery,

    #[error("stratum {stratum} has {available} entries, {requested} requested")]
    InsufficientStratum {
        stratum: &'static str,
        available: usize,
        requested: usize,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn validation(message: impl Into<String>) -> Self {
        Error::Validation(message.into())
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
