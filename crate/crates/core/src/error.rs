use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("degenerate measure: {0}")]
    Degenerate(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("unsupported singularity class: {0}")]
    UnsupportedClass(String),
    /// Γ evaluated at a nonpositive integer; the corresponding main term is 0.
    #[error("gamma pole at {0}")]
    Pole(f64),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("weights for {0} have no exact representation")]
    NotExact(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}
