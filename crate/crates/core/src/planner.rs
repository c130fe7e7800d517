//! Sample-size planning at a fixed relative-error target: how many runs
//! naive MC and the IS estimator each need for the same accuracy.

use crate::canonical::CanonicalForm;
use crate::sampler::{self, SamplerError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlannerError {
    #[error("probability {p} is degenerate; planning requires p in (0, 1)")]
    DegenerateProbability { p: f64 },
    #[error("pilot importance-sampling estimate was zero; cannot plan")]
    ZeroEstimate,
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

/// Accuracy requirement: target relative error and confidence multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracySpec {
    pub epsilon: f64,
    pub confidence_c: f64,
}

impl Default for AccuracySpec {
    fn default() -> Self {
        // 5% relative error at the 95% confidence multiplier.
        Self {
            epsilon: 0.05,
            confidence_c: 1.96,
        }
    }
}

impl AccuracySpec {
    pub fn new(epsilon: f64, confidence_c: f64) -> Self {
        assert!(epsilon > 0.0 && epsilon < 1.0, "epsilon must be in (0,1)");
        assert!(confidence_c > 0.0, "confidence multiplier must be positive");
        Self {
            epsilon,
            confidence_c,
        }
    }
}

/// Naive MC runs required to estimate a probability `p` at the target
/// relative error: `M = ceil((C/eps)^2 (1-p)/p)`.
///
/// Returned as a float: in the deep tail the requirement exceeds any
/// integer type (1e-40 probabilities ask for ~1e43 runs). Values below
/// 2^53 are exact integers.
pub fn mc_runs_required(p: f64, spec: &AccuracySpec) -> Result<f64, PlannerError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(PlannerError::DegenerateProbability { p });
    }
    let factor = (spec.confidence_c / spec.epsilon).powi(2);
    Ok((factor * (1.0 - p) / p).ceil().max(1.0))
}

/// IS runs required at the target relative error, using a pilot run of
/// `pilot` samples to estimate the probability and the weighted-indicator
/// variance: `M* = ceil((C / (eps * P))^2 V*)`. Planning numbers are
/// pilot-based, so they inherit the pilot's sampling noise.
pub fn is_runs_required(
    cf: &CanonicalForm,
    gamma0: f64,
    spec: &AccuracySpec,
    pilot: u64,
    seed: u64,
) -> Result<f64, PlannerError> {
    assert!(pilot >= 1_000, "pilot must use at least 1000 samples");
    let r = sampler::importance_sampling(cf, gamma0, pilot, seed)?;
    if r.estimate <= 0.0 {
        return Err(PlannerError::ZeroEstimate);
    }
    let factor = (spec.confidence_c / (spec.epsilon * r.estimate)).powi(2);
    Ok((factor * r.variance).ceil().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::CanonicalForm;

    #[test]
    fn mc_runs_direct_formula() {
        let spec = AccuracySpec::default();
        assert_eq!(mc_runs_required(0.5, &spec).unwrap(), 1537.0);
        assert_eq!(mc_runs_required(0.99, &spec).unwrap(), 16.0);
    }

    #[test]
    fn mc_runs_rejects_degenerate() {
        let spec = AccuracySpec::default();
        for p in [0.0, 1.0, -0.1, 1.5] {
            assert!(matches!(
                mc_runs_required(p, &spec),
                Err(PlannerError::DegenerateProbability { .. })
            ));
        }
    }

    #[test]
    fn mc_runs_scale_inversely_with_probability() {
        let spec = AccuracySpec::default();
        let hi = mc_runs_required(1e-6, &spec).unwrap();
        let lo = mc_runs_required(1e-3, &spec).unwrap();
        assert!(hi > 900.0 * lo, "hi={hi} lo={lo}");
    }

    #[test]
    fn mc_runs_survive_deep_tail_probabilities() {
        // Planning quantities blow past every integer type in the tail.
        let spec = AccuracySpec::default();
        let runs = mc_runs_required(1e-40, &spec).unwrap();
        assert!(runs > 1e42 && runs.is_finite());
    }

    #[test]
    fn is_runs_finite_and_positive_on_d1() {
        let cf = CanonicalForm::from_parts(vec![1.0], vec![0.0]);
        let spec = AccuracySpec::default();
        let runs = is_runs_required(&cf, 0.01, &spec, 10_000, 21).unwrap();
        assert!(runs >= 1.0);
        assert!(runs < 1_000_000.0, "runs={runs}");
    }

    #[test]
    fn is_runs_stay_flat_as_threshold_shrinks() {
        // Bounded relative error: planned runs vary little while the
        // probability collapses by many orders of magnitude.
        let cf = CanonicalForm::from_parts(vec![1.0, 0.5], vec![1.0, -1.0]);
        let spec = AccuracySpec::default();
        let runs: Vec<f64> = [1.0, 0.1, 0.01, 0.001]
            .iter()
            .map(|&g| is_runs_required(&cf, g, &spec, 20_000, 5).unwrap())
            .collect();
        let max = runs.iter().cloned().fold(0.0f64, f64::max);
        let min = runs.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min <= 10.0, "runs {runs:?}");
    }
}
