use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the formula.
    #[error("{parameter} out of domain: {reason}")]
    Domain {
        parameter: &'static str,
        reason: String,
    },

    /// Cone order too close to -1; the per-singularity terms diverge there.
    #[error("angle too small: cone order beta = {beta} must exceed -1 + 1e-9")]
    AngleTooSmall { beta: f64 },

    /// A configuration violates a structural invariant.
    #[error("invalid configuration ({parameter}): {reason}")]
    Config {
        parameter: &'static str,
        reason: String,
    },

    /// An iterative or adaptive procedure exhausted its budget.
    #[error("{what} did not converge: error estimate {error_estimate:e} exceeds tolerance {tolerance:e}")]
    Convergence {
        what: &'static str,
        error_estimate: f64,
        tolerance: f64,
    },
}

impl Error {
    pub(crate) fn domain(parameter: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            parameter,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(parameter: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            parameter,
            reason: reason.into(),
        }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } | Error::AngleTooSmall { .. } => "domain",
            Error::Config { .. } => "config",
            Error::Convergence { .. } => "convergence",
        }
    }

    /// Name of the offending parameter, when there is one.
    pub fn parameter(&self) -> Option<&'static str> {
        match self {
            Error::Domain { parameter, .. } | Error::Config { parameter, .. } => Some(parameter),
            Error::AngleTooSmall { .. } => Some("beta"),
            Error::Convergence { .. } => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
