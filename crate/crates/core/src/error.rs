use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution for {block}: {reason}")]
    InvalidDistribution { block: &'static str, reason: String },

    #[error("NA-only distribution in {0}")]
    NaOnly(&'static str),

    #[error("block {0} has no NA label")]
    NoNaLabel(&'static str),

    #[error("unknown label {label:?} for category {category}")]
    UnknownLabel {
        category: &'static str,
        label: String,
    },

    #[error("unknown category {0:?}")]
    UnknownCategory(String),

    #[error("invalid annotations: {0}")]
    Annotation(String),

    #[error("no shared posts for annotators {0} and {1}")]
    NoSharedPosts(String, String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mixed dims: post {id} has dim {found}, expected {expected}")]
    MixedDims {
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("duplicate post id {0:?}")]
    DuplicateId(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("rank-deficient design matrix: {0}")]
    RankDeficient(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag used in CLI error records and FFI codes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDistribution { .. } => "invalid_distribution",
            Error::NaOnly(_) => "na_only",
            Error::NoNaLabel(_) => "no_na_label",
            Error::UnknownLabel { .. } => "unknown_label",
            Error::UnknownCategory(_) => "unknown_category",
            Error::Annotation(_) => "annotation",
            Error::NoSharedPosts(..) => "no_shared_posts",
            Error::Shape(_) => "shape",
            Error::NonFinite(_) => "non_finite",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::MixedDims { .. } => "mixed_dims",
            Error::DuplicateId(_) => "duplicate_id",
            Error::Parse { .. } => "parse",
            Error::Checkpoint(_) => "checkpoint",
            Error::RankDeficient(_) => "rank_deficient",
            Error::Empty(_) => "empty",
            Error::Io { .. } => "io",
        }
    }
}
