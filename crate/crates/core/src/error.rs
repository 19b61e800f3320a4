use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input parameter lies outside the domain where the object is defined.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    /// An iterative method did not converge.
    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// Two routes to the same quantity disagree beyond the stated tolerance.
    #[error("consistency check `{check}` failed: deviation {deviation:e} exceeds {tolerance:e}")]
    Consistency {
        check: &'static str,
        deviation: f64,
        tolerance: f64,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by bad input, false for numerical failures.
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
