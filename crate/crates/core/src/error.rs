use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed csv: {0}")]
    Csv(String),
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("label column `{0}` not found")]
    LabelColumnNotFound(String),
    #[error("no data rows")]
    NoRows,
    #[error("missing value for `{attribute}` in row {row}")]
    MissingValue { attribute: String, row: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("token `{token}` was not seen when fitting `{attribute}`")]
    UnseenToken { attribute: String, token: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("example {0} has no label")]
    Unlabeled(usize),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("invalid view split: {0}")]
    InvalidViewSplit(String),
    #[error("training diverged: {0}")]
    Divergence(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures that arise while computing rather than from bad input.
    pub fn is_runtime(&self) -> bool {
        matches!(self, Error::Divergence(_))
    }
}
