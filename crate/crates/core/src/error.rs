//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or arguments (bad sizes, out-of-range hyperparameters).
    #[error("configuration error: {0}")]
    Config(String),

    /// A model evaluator produced a non-finite value.
    #[error("evaluation error: {what} is not finite at entry ({row}, {col})")]
    NonFinite {
        what: &'static str,
        row: usize,
        col: usize,
    },

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: String,
        got: String,
    },

    /// Precondition of an operation was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("simulation diverged at step {step} (t = {time:.4} s)")]
    Divergence { step: usize, time: f64 },

    /// The SDP backend broke down; distinct from certified infeasibility.
    #[error("numerical failure in conic solver: {0}")]
    NumericalFailure(String),

    /// Near-singular ellipsoid matrix at controller extraction.
    #[error("controller extraction failed: min eigenvalue of Q is {min_eig:e}; increase epsilon")]
    Extraction { min_eig: f64 },

    /// The verifier could not decide within its budget.
    #[error("verifier undecided: best value {best:e}, certified bound {bound:e} (gap {gap:e}) after {evaluations} evaluations")]
    Undecided {
        best: f64,
        bound: f64,
        gap: f64,
        evaluations: usize,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<toml::ser::Error> for Error {
    fn from(e: toml::ser::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
