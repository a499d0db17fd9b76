use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed XML at byte offset {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("post {post_id}: {message}")]
    TagField { post_id: i64, message: String },

    #[error("duplicate post id {0}")]
    DuplicatePost(i64),

    #[error("corpus has {0} questions; at least 10 are needed to split")]
    CorpusTooSmall(usize),

    #[error("empty corpus: {0}")]
    EmptyCorpus(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown tag {0:?}")]
    UnknownTag(String),

    #[error("tag pair ({0}, {1}) never co-occurs")]
    UnseenPair(String, String),

    #[error("prediction for post {post_id} has no head label (source {source_label})")]
    UnlabeledPrediction { post_id: i64, source_label: String },

    #[error("prediction/gold mismatch: {0}")]
    PostMismatch(String),

    #[error("invalid record at {path}:{line}: {message}")]
    Record {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Errors caused by bad input or configuration rather than a defect in this crate.
    pub fn is_user_error(&self) -> bool {
        !matches!(self, Error::Io(_))
            || matches!(self, Error::Io(e) if e.kind() == io::ErrorKind::NotFound)
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
