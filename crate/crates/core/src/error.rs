use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown emotion label `{0}`")]
    UnknownLabel(String),

    #[error("`{0}` is a wheel group, expected a fine-grained emotion")]
    NotFineGrained(String),

    #[error("empty emotion set in argument `{0}`")]
    EmptySet(&'static str),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate annotation for item `{item}` by worker `{worker}`")]
    DuplicateAnnotation { item: String, worker: String },

    #[error("duplicate record id `{0}`")]
    DuplicateId(String),

    #[error("item `{0}` has fewer than two annotators")]
    SingleAnnotator(String),

    #[error("missing annotation for item `{item}` by worker `{worker}`")]
    MissingAnnotation { item: String, worker: String },

    #[error("task `{task}` needs {needed} negatives but only {available} candidates exist")]
    InsufficientNegatives {
        task: String,
        needed: usize,
        available: usize,
    },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
