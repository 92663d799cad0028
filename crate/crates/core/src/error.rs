use thiserror::Error;

/// Errors raised by the simulator and the analytic engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A special function was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter set violates a model invariant.
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// The nulled channel set is numerically rank deficient.
    #[error("degenerate channel set: {0}")]
    Degenerate(String),

    /// An adaptive quadrature failed to reach its tolerance.
    #[error("quadrature did not converge: {what} (estimate {value:e}, error {error:e}, {evaluations} evaluations)")]
    Quadrature {
        what: String,
        value: f64,
        error: f64,
        evaluations: usize,
    },

    /// A root could not be bracketed.
    #[error("root bracketing failed: {0}")]
    RootBracket(String),

    /// Density inversion could not bracket the target outage.
    #[error("density search failed: {0}")]
    Search(String),

    /// Writing output failed.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
