use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An adaptive routine exhausted its evaluation budget before reaching the requested tolerance.
    #[error("no convergence after {evaluations} evaluations (estimated error {error_estimate:e}, requested {tolerance:e})")]
    NonConvergence {
        evaluations: usize,
        error_estimate: f64,
        tolerance: f64,
    },

    /// An integrand produced NaN or an infinity.
    #[error("integrand returned a non-finite value at {location}")]
    NonFinite { location: String },

    /// A series could not be truncated within the configured term cap.
    #[error("series tolerance {tolerance:e} unreachable within {cap} terms")]
    SeriesCap { tolerance: f64, cap: u64 },

    /// A kernel combination whose norm is numerically zero.
    #[error("degenerate function: norm {norm:e} below {threshold:e}")]
    Degenerate { norm: f64, threshold: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures that mean "the numerics did not converge", as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::NonFinite { .. } | Error::SeriesCap { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite, got {x}")))
    }
}

pub(crate) fn require_positive(name: &str, x: f64) -> Result<()> {
    require_finite(name, x)?;
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive, got {x}")))
    }
}

/// Checks `p` lies in the open interval (1, inf).
pub(crate) fn require_exponent(p: f64) -> Result<()> {
    require_finite("p", p)?;
    if p > 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("p must lie in (1, inf), got {p}")))
    }
}
