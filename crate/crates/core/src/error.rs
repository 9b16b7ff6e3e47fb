use thiserror::Error;

/// Errors raised by grid construction, operators, solvers and the CLI layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two grid functions that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A dense linear system could not be factored.
    #[error("singular system (condition estimate {condition:.3e}): {context}")]
    Singular { context: String, condition: f64 },

    /// A configuration file failed to parse or validate.
    #[error("config:{line}: {message}")]
    Config { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
