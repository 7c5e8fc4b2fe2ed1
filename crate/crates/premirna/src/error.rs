//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("FASTA parse error: {0}")]
    Fasta(String),

    #[error("invalid sequence '{id}': {reason}")]
    InvalidSequence { id: String, reason: String },

    #[error("duplicate sequence id '{0}'")]
    DuplicateId(String),

    #[error("sequence '{id}' is {len} nt, longer than the {max} nt limit")]
    SequenceTooLong { id: String, len: usize, max: usize },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("feature extraction failed for '{id}': {reason}")]
    Feature { id: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("model file error: {0}")]
    ModelFile(String),

    #[error("data error: {0}")]
    Data(String),
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// Stable process exit code for CLI use: 2 for data problems, 3 for
    /// numeric failures, 1 for everything else (usage).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Fasta(_)
            | Error::InvalidSequence { .. }
            | Error::DuplicateId(_)
            | Error::SequenceTooLong { .. }
            | Error::Io { .. }
            | Error::Feature { .. }
            | Error::ModelFile(_)
            | Error::Data(_) => 2,
            Error::NonFinite(_) => 3,
            Error::InvalidArgument(_) | Error::Shape(_) => 1,
        }
    }
}
