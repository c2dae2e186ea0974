use thiserror::Error;

/// Errors raised by the solvers and checkers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A point fell outside the domain on which the distance is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A non-finite value appeared during numeric evaluation.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The sampled distance is not a metric.
    #[error("metric axiom violated: {0}")]
    MetricAxiom(String),

    /// Malformed input file or configuration.
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
