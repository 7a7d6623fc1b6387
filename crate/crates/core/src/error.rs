use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the clustering pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },

    #[error("duplicate document id `{0}`")]
    DuplicateId(String),

    #[error("document `{0}` has empty text")]
    EmptyText(String),

    #[error("document `{0}` has no lexical entities after tokenization")]
    EmptyDocument(String),

    #[error("empty collection: {0}")]
    EmptyCollection(&'static str),

    #[error("token `{token}` of document `{doc_id}` is missing from the dictionary")]
    UnknownToken { token: String, doc_id: String },

    #[error("need at least 2 items to form a pair, got {0}")]
    TooFewItems(usize),

    #[error("invalid pair ({i}, {j}) for {n} items")]
    InvalidPair { i: usize, j: usize, n: usize },

    #[error("invalid distance value {value} at position {index}")]
    InvalidDistance { index: usize, value: f64 },

    #[error("clusters overlap on item {0}")]
    OverlappingClusters(usize),

    #[error("threshold {0} is outside [0, 1]")]
    ThresholdOutOfRange(f64),

    #[error("min_size must be at least 1")]
    InvalidMinSize,

    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),

    #[error("no gold sense for document `{0}`")]
    MissingGold(String),

    #[error("intruder `{0}` is not a member of any group")]
    StrayIntruder(String),

    #[error("invalid pattern template `{surface}`: {reason}")]
    InvalidTemplate { surface: String, reason: String },

    #[error("unknown definition type `{0}`")]
    UnknownDefType(String),
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
