use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A run would exceed a memory or population budget. The message carries
    /// an advisory size so callers can shrink the request.
    #[error("resource limit: {0}")]
    Resource(String),
    /// A numerical procedure failed to converge or produced a degenerate
    /// system.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Filesystem or serialization problem while persisting results.
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
