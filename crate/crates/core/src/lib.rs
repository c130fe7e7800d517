//! Left-tail probabilities `P(X^T S X <= gamma0)` of positive quadratic
//! forms in Gaussian vectors.
//!
//! The crate reduces a problem `(mu, S_x, S, gamma0)` to a weighted sum of
//! independent non-central chi-square(1) variates and estimates its left
//! tail with an importance-sampling scheme whose relative error stays
//! bounded as the tail probability vanishes. Alongside the estimator it
//! provides naive Monte Carlo, analytic lower bounds, two deterministic
//! baselines (Imhof inversion and the saddle-point approximation), and
//! sample-size planning at a fixed accuracy target.
//!
//! ```
//! use nalgebra::{DMatrix, DVector};
//! use qtail::canonical::{reduce_default, QuadFormProblem};
//! use qtail::sampler::importance_sampling;
//!
//! let n = 4;
//! let p = QuadFormProblem::new(
//!     DVector::from_element(n, 1.0),
//!     DMatrix::identity(n, n),
//!     DMatrix::identity(n, n),
//!     0.05,
//! );
//! let cf = reduce_default(&p).unwrap();
//! let est = importance_sampling(&cf, p.gamma0, 10_000, 7).unwrap();
//! assert!(est.estimate > 0.0 && est.estimate < 1e-3);
//! ```

pub mod baselines;
pub mod bounds;
pub mod canonical;
pub mod genmat;
pub mod planner;
pub mod sampler;
pub mod special;

pub use baselines::{imhof_cdf, spa_cdf, ImhofConfig, SpaConfig};
pub use bounds::{bound_report, marcum_lower_bound, zero_mean_lower_bound, BoundReport};
pub use canonical::{reduce, reduce_default, validate_problem, CanonicalForm, QuadFormProblem};
pub use planner::{is_runs_required, mc_runs_required, AccuracySpec};
pub use sampler::{importance_sampling, make_biased_spec, naive_mc, EstimateResult};

/// Convert a threshold in decibels to linear scale: `gamma0 = 10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    #[test]
    fn db_conversion_exact_at_grid_points() {
        assert_eq!(super::db_to_linear(0.0), 1.0);
        assert_eq!(super::db_to_linear(10.0), 10.0);
        assert!((super::db_to_linear(-20.0) - 0.01).abs() < 1e-17);
    }
}
