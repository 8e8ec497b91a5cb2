use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("malformed data at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("hierarchy diverged at step {step} (t = {time_fs} fs): trace drift {drift:.3e}")]
    Divergence { step: usize, time_fs: f64, drift: f64 },
    #[error("{0}")]
    Unavailable(String),
    #[error("no feasible design found: {0}")]
    EmptyFeasibleSet(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
