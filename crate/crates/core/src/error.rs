use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the risk-measure pipeline.
#[derive(Debug, Error)]
pub enum CovarError {
    /// An argument lies outside the domain of the operation.
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// A tail expectation does not exist (Student-t with ν ≤ 1).
    #[error("expectation diverges: {0}")]
    Divergent(String),

    /// Root finding or quadrature missed its tolerance within the iteration budget.
    #[error("no convergence in {what}: residual {residual:e} after {iterations} iterations")]
    Convergence {
        what: &'static str,
        residual: f64,
        iterations: usize,
    },

    /// The copula does not support the requested operation.
    #[error("{operation} is not defined for the {copula} copula")]
    Unsupported {
        operation: &'static str,
        copula: &'static str,
    },

    /// Structurally invalid input, e.g. mismatched components.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("levels alpha = beta = 0.5 give a constant CoVaR=; no critical correlation")]
    DegenerateLevels,

    #[error("no conditioning exceedances among {n} samples")]
    NoConditioningEvents { n: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed command-line input, carrying the offending token.
    #[error("invalid argument `{token}`: {message}")]
    Config { token: String, message: String },
}

impl CovarError {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        CovarError::Domain {
            name,
            value,
            expected,
        }
    }

    pub(crate) fn config(token: impl Into<String>, message: impl Into<String>) -> Self {
        CovarError::Config {
            token: token.into(),
            message: message.into(),
        }
    }

    /// True for numerical failures (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, CovarError::Convergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, CovarError>;

pub(crate) fn check_probability_open(name: &'static str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(CovarError::domain(name, p, "open interval (0, 1)"))
    }
}
