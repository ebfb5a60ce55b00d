use thiserror::Error;

/// Errors surfaced by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("point lies on a phase boundary: {0}")]
    Boundary(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Pole(_) | Error::Domain(_) | Error::Boundary(_) | Error::Convergence(_) => 3,
            Error::UnsupportedFamily(_) => 4,
        }
    }
}
