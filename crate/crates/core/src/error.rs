use thiserror::Error;

/// Errors raised by the library.
///
/// Input problems (malformed documents, syntax errors, unknown configurations)
/// are kept apart from capacity problems so that callers can map them to
/// different exit statuses.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed structure: {0}")]
    Malformed(String),

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("{0} is not a configuration of the structure")]
    NotAConfiguration(String),

    #[error("unknown event `{0}`")]
    UnknownEvent(String),

    #[error("configuration {0} contains non-minimal events")]
    NotMinimal(String),

    #[error("causality in configuration {0} is not a partial order")]
    NotPartialOrder(String),

    #[error("structure is not stable ({0})")]
    NotStable(String),

    #[error("capacity exceeded: {what} is {actual}, limit {limit}")]
    Capacity {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("random generation gave up after {0} attempts")]
    GenerationBudget(usize),

    #[error("invalid structure document: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
