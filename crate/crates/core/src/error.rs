use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Arguments outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested enumeration exceeds the configured limit.
    #[error("capacity error: {required} items exceed the limit of {limit}")]
    Capacity { required: u128, limit: u128 },

    /// A certificate or invariant failed independent re-checking.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A single-use box port was queried twice.
    #[error("box port {port} already used")]
    BoxReused { port: &'static str },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
