use std::path::PathBuf;

use thiserror::Error;

use crate::pattern::PatternId;

/// Errors produced anywhere in the induction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("degenerate coding model: all symbol frequencies are zero")]
    DegenerateModel,

    #[error("integrity error: pattern {0} is not in the repository")]
    DanglingPattern(PatternId),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("corpus token `{token}` on line {line} collides with the ID-symbol namespace")]
    NamespaceCollision { line: usize, token: String },

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
