use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown boundary pair `{0}`")]
    UnknownBoundaryPair(String),
    #[error("inadmissible parameter: {0}")]
    Inadmissible(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("search failed: {0}")]
    SearchFailed(String),
    #[error("numerical breakdown at step {step}: {what}")]
    Breakdown { step: usize, what: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
