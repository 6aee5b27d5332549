use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    NotFound(PathBuf),

    #[error("i/o error on {}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON in {context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("lexicon `{0}` has no usable terms")]
    EmptyLexicon(String),

    #[error("duplicate category `{0}`")]
    DuplicateCategory(String),

    #[error("embedding table line {line}: {reason}")]
    EmbeddingFormat { line: usize, reason: String },

    #[error("zero-norm vector has no defined cosine similarity")]
    ZeroNorm,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("`{0}` is not in the embedding vocabulary")]
    OutOfVocabulary(String),

    #[error("invalid date range: {start} is after {end}")]
    InvalidRange { start: NaiveDate, end: NaiveDate },

    #[error("series of length {0} is too short for a gradient")]
    SeriesTooShort(usize),

    #[error("series do not share a date axis")]
    DateAxisMismatch,

    #[error("no markers given")]
    EmptyMarkers,

    #[error("unknown category `{0}`")]
    UnknownCategory(String),

    #[error("lead window must be non-negative, got {0}")]
    NegativeLead(i64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Process exit code: 2 for I/O and parse failures, 1 for validation or
    /// contract failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotFound(_)
            | Error::File { .. }
            | Error::Io(_)
            | Error::Json { .. }
            | Error::Csv(_)
            | Error::MalformedLine { .. }
            | Error::EmbeddingFormat { .. } => 2,
            _ => 1,
        }
    }

    pub(crate) fn open(path: &std::path::Path, source: std::io::Error) -> Self {
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound(path.to_path_buf())
        } else {
            Error::File {
                path: path.to_path_buf(),
                source,
            }
        }
    }
}
