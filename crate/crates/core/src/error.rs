use thiserror::Error;

/// Errors raised by the series pipeline and the numerical probes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A precondition on the arguments was violated.
    #[error("usage: {0}")]
    Usage(String),
    /// The data sits on an excluded degenerate stratum (vanishing leading coefficient).
    #[error("degenerate: {0}")]
    Degenerate(String),
    /// Boundary data too short for the requested truncation order.
    #[error("missing boundary coefficients: {}", format_missing(.0))]
    MissingBoundary(Vec<usize>),
    /// A numerical evaluation was requested outside its trustworthy domain.
    #[error("domain: {0}")]
    Domain(String),
}

fn format_missing(idx: &[usize]) -> String {
    idx.iter()
        .map(|j| format!("b0{j}"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
