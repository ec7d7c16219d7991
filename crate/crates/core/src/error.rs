use thiserror::Error;

/// Engine-wide error type. The CLI maps variants onto its exit-code contract.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no maximal contact of shear type exists: {0}")]
    MaxContactNotFound(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
