use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    /// A parameter lies outside the range admitted by a family or operation.
    #[error("parameter out of range: {0}")]
    Parameter(String),

    /// An argument is outside the domain of the operation (e.g. λ ≤ 0).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("simulation budget exceeded: {0}")]
    Budget(String),

    #[error("integral diverges: {0}")]
    Divergence(String),

    /// Reflection across H_{x,y} requires x ≠ y.
    #[error("degenerate reflection: x and y coincide")]
    DegenerateReflection,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Config(e.to_string())
    }
}
