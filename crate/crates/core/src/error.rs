use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    InvalidPrime(u32),
    #[error("invalid format: {0}")]
    InvalidFormat(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("span fills the ambient space (dimension {ambient}); no tangency conditions remain")]
    SpanFillsAmbient { ambient: usize },
    #[error("computation aborted: {0}")]
    Aborted(String),
    #[error("no reduction plan: {0}")]
    NoPlan(String),
    #[error("plan script error on line {line}: {message}")]
    Script { line: usize, message: String },
    #[error("out of regime: {0}")]
    OutOfRegime(String),
    #[error("certificate error: {0}")]
    Certificate(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Certificate(e.to_string())
    }
}
