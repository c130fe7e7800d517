//! Deterministic baseline CDF evaluations used for comparison against the
//! sampling estimators: Imhof's characteristic-function inversion and the
//! Lugannani-Rice saddle-point approximation.

mod imhof;
mod spa;

pub use imhof::{imhof_cdf, ImhofConfig, ImhofOutcome};
pub use spa::{spa_cdf, SpaConfig, SpaOutcome};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error("quadrature error estimate {error_estimate:.3e} above tolerance after {evaluations} evaluations")]
    QuadratureFailure {
        error_estimate: f64,
        evaluations: usize,
    },
    #[error("saddle-point solve did not converge within {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("threshold {gamma0} is within tolerance of the distribution mean {mean}; the tail formula is singular there")]
    AtMeanSingularity { gamma0: f64, mean: f64 },
    #[error("threshold {gamma0} is not below the distribution mean {mean}; only the left tail is supported")]
    ThresholdNotBelowMean { gamma0: f64, mean: f64 },
}
