//! Crate-wide error type.

use std::path::PathBuf;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("not a directory: {0}")]
    NotADirectory(PathBuf),

    #[error("corrupt record at {file}:{line}: {message}")]
    CorruptRecord {
        file: String,
        line: usize,
        message: String,
    },

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("unknown selector field: {0}")]
    UnknownSelectorField(String),

    #[error("no record with id {0}")]
    NotFound(String),

    #[error("no extractable text")]
    NoExtractableText,

    #[error("training corpus too small: {got} chars, need at least {min}")]
    CorpusTooSmall { got: usize, min: usize },

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("transform called before fit")]
    NotFitted,

    #[error("model has no trained members")]
    ModelNotTrained,

    #[error("labels contain a single class; need at least two")]
    SingleClass,

    #[error("need at least {min} documents per class, got {got}")]
    TooFewPerClass { min: usize, got: usize },

    #[error("k ({k}) exceeds feature count ({features})")]
    TooManyFeatures { k: usize, features: usize },

    #[error("top_n ({top_n}) exceeds vocabulary size ({vocab})")]
    TopNExceedsVocab { top_n: usize, vocab: usize },

    #[error("k_folds ({k}) exceeds smallest class count ({smallest})")]
    TooManyFolds { k: usize, smallest: usize },

    #[error("dataset contains non-finite feature values")]
    NonFiniteFeature,

    #[error("fetch failed for {url}: {message}")]
    Fetch { url: String, message: String },

    #[error("snapshot {url} returned HTTP {status}")]
    SnapshotStatus { url: String, status: u16 },

    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
