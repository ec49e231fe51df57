use thiserror::Error;

use crate::quad::QuadError;
use crate::specfun::SpecialError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0}")]
    Config(String),
    /// A requested evaluation route does not apply to this configuration.
    #[error("{0}")]
    Unavailable(String),
    #[error("{0}")]
    Special(#[from] SpecialError),
    #[error("{0}")]
    Quadrature(#[from] QuadError),
}

impl Error {
    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Unavailable(_) => 3,
            Error::Special(SpecialError::Domain(_)) => 3,
            Error::Special(_) | Error::Quadrature(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
