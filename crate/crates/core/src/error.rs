use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group presentation: {0}")]
    InvalidGroup(String),

    #[error("element {index} out of range for a group of cardinality {cardinality}")]
    ElementOutOfRange { index: usize, cardinality: usize },

    #[error("{what}: {cardinality} exceeds the configured bound {bound}")]
    BoundExceeded {
        what: &'static str,
        cardinality: usize,
        bound: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("subset must be nonempty")]
    EmptySubset,

    #[error("objects live over different groups ({left} vs {right})")]
    GroupMismatch { left: String, right: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not an autocorrelation vector: {0}")]
    InvalidVector(String),

    #[error("certificate failed verification: {0}")]
    Certificate(String),

    #[error("cache format: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
