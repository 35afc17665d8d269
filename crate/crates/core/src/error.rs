use thiserror::Error;

/// Errors raised by the pipeline stages.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("structural topology error at vertex {vertex}: {message}")]
    Topology { vertex: usize, message: String },

    #[error("member {member} is inconsistent with the topology: {message}")]
    Inconsistent { member: usize, message: String },

    #[error("degenerate form at vertex {vertex}: {message}")]
    Degenerate { vertex: usize, message: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
