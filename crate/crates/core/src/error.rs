use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The line is not valid JSON.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// Valid JSON that does not satisfy the record schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// A caller broke a function precondition (wrong answer count, too few items, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("config error: {0}")]
    Config(String),

    /// Predictions and gold annotations do not pair up one-to-one.
    #[error(
        "alignment error: {} prediction(s) without gold {:?}, {} gold without prediction {:?}{}",
        missing_gold.len(),
        missing_gold,
        missing_prediction.len(),
        missing_prediction,
        if duplicates.is_empty() { String::new() } else { format!(", duplicate ids {duplicates:?}") }
    )]
    Alignment {
        missing_gold: Vec<String>,
        missing_prediction: Vec<String>,
        duplicates: Vec<String>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

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
}

/// Why a record produced no example for a given objective or task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Error)]
pub enum Ineligible {
    #[error("record has no OCR tokens")]
    EmptyOcr,
    #[error("record has no caption")]
    MissingCaption,
    #[error("record has no QA annotations")]
    MissingQa,
}
