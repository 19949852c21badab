use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("level `{0}` is reducible: found a zero divisor while inverting")]
    Reducible(String),
    #[error("incompatible towers: {0}")]
    TowerMismatch(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("precision: {0}")]
    Precision(String),
    #[error("reconstruction failed: {0}")]
    Reconstruct(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("not in the family: {0}")]
    Family(String),
    #[error("search exhausted after {tested} candidates")]
    Exhausted { tested: usize, report: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
