use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller violated a precondition (sizes, degrees, flags).
    #[error("usage error: {0}")]
    Usage(String),

    /// An iterative or factorization routine failed.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A requested object would not fit in addressable memory.
    #[error("capacity error: {0}")]
    Capacity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Usage(_) | Error::Capacity(_) => 2,
            Error::Numerical(_) => 3,
            Error::Io(_) | Error::Csv(_) => 1,
        }
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
