use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("invalid random variable: {0}")]
    InvalidScalar(String),

    #[error("invalid fiber system: {0}")]
    InvalidSystem(String),

    #[error("time {0} is negative but the fiber system is not invertible")]
    NotInvertible(i64),

    #[error("point is not in the fiber: {0}")]
    PointOutsideFiber(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("incompatible arguments: {0}")]
    Incompatible(String),

    #[error("measure representation is not closed under this map: {0}")]
    NotClosed(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("configuration rejected:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
