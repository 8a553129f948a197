use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured size cap would be exceeded.
    #[error("resource limit: {what} requested {requested}, cap {cap}")]
    ResourceLimit {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    /// The prime table does not reach far enough for the request.
    #[error("prime table too short: need primes up to {needed}, table ends at {available}")]
    TableTooShort { needed: u64, available: u64 },

    /// A certified tail radius could not be reached with the available primes.
    #[error("tail radius {requested} unreachable; best achieved {achieved}")]
    TailRadius { requested: String, achieved: String },

    #[error("quadrature did not converge after {subdivisions} subdivisions (error estimate {estimate})")]
    Quadrature { subdivisions: usize, estimate: String },

    #[error("cache format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
