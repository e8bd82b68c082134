use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rational `{0}`")]
    ParseRational(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("test function is identically zero")]
    ZeroFunction,
    #[error("average over an empty set")]
    EmptySet,
    #[error("space has {points} points, above the explicit limit {limit}")]
    TooLarge { points: String, limit: usize },
    #[error("unknown point label `{0}`")]
    UnknownLabel(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
