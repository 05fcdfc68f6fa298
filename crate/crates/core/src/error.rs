use std::path::PathBuf;

use crate::Dimension;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {malformed} of {total} records are malformed; wrong format?")]
    FormatMismatch {
        path: PathBuf,
        malformed: usize,
        total: usize,
    },

    #[error("{source_name} line {line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Invalid(String),

    #[error("no token of the sentence is in the embedding vocabulary")]
    NoVector,

    #[error("no keyword of dimension `{0}` is in the embedding vocabulary")]
    AnchorOutOfVocabulary(Dimension),

    #[error("feature schema mismatch: expected {expected}, found {found}")]
    SchemaMismatch { expected: String, found: String },

    #[error("dimension `{dimension}`: {message}")]
    Untrainable {
        dimension: Dimension,
        message: String,
    },

    #[error("training diverged: non-finite loss (are the features standardized?)")]
    NonFiniteLoss,

    #[error("collinear predictors: {}", .0.join(", "))]
    Collinear(Vec<String>),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(source_name: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }
}
