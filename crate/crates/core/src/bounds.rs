//! Analytic lower bounds on the left-tail probability and the
//! bounded-relative-error constant of the IS estimator. Products over
//! coordinates are accumulated in log space so they survive `d ~ 100`.

use crate::canonical::CanonicalForm;
use crate::special::{self, SpecialError};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("zero-mean bound requires all offsets zero; alpha[{index}] = {alpha}")]
    NonZeroMean { index: usize, alpha: f64 },
    #[error(transparent)]
    Special(#[from] SpecialError),
}

/// Lower bound plus the relative-error constant, with a plain-text caveat.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub lower_bound: f64,
    pub bre_constant: Option<f64>,
    pub note: String,
}

/// Product lower bound through the Marcum-Q function:
/// `P >= prod_i [1 - Q_{1/2}(|alpha_i|, sqrt(gamma0 / (d lambda_i)))]`.
///
/// The bound restricts the event to the box where every coordinate
/// contributes at most `gamma0 / d`, so it never exceeds the true
/// probability. Tight at `d = 1`.
pub fn marcum_lower_bound(cf: &CanonicalForm, gamma0: f64) -> f64 {
    assert!(gamma0 > 0.0, "threshold must be positive");
    let d = cf.rank() as f64;
    let mut log_sum = 0.0;
    for (&l, &a) in cf.lambdas().iter().zip(cf.alphas()) {
        let b = (gamma0 / (d * l)).sqrt();
        let factor = special::marcum_q_half_complement(a.abs(), b);
        if factor <= 0.0 {
            return 0.0;
        }
        log_sum += factor.ln();
    }
    log_sum.exp().clamp(0.0, 1.0)
}

/// Zero-mean specialization of the lower bound:
/// `P >= pi^{-d/2} prod_i gamma(1/2, gamma0 / (2 d lambda_i))`.
///
/// Identical to [`marcum_lower_bound`] on zero-mean input through the
/// identity `gamma(1/2, x^2/2) / sqrt(pi) = 1 - Q_{1/2}(0, x)`.
pub fn zero_mean_lower_bound(cf: &CanonicalForm, gamma0: f64) -> Result<f64, BoundsError> {
    assert!(gamma0 > 0.0, "threshold must be positive");
    if let Some((index, &alpha)) = cf.alphas().iter().enumerate().find(|(_, &a)| a != 0.0) {
        return Err(BoundsError::NonZeroMean { index, alpha });
    }
    let d = cf.rank() as f64;
    let mut log_sum = -0.5 * d * std::f64::consts::PI.ln();
    for &l in cf.lambdas() {
        let g = special::lower_incomplete_gamma(0.5, gamma0 / (2.0 * d * l))?;
        if g <= 0.0 {
            return Ok(0.0);
        }
        log_sum += g.ln();
    }
    Ok(log_sum.exp().clamp(0.0, 1.0))
}

/// Constant bounding the limiting relative second moment of the IS
/// estimator: `prod_i pi e / alpha_i^2` when every offset is non-zero,
/// `(pi e / 2)^d` when every offset is zero, and `None` in the mixed case,
/// which neither formula covers.
pub fn bre_constant(cf: &CanonicalForm) -> Option<f64> {
    let pi_e = std::f64::consts::PI * std::f64::consts::E;
    let d = cf.rank() as f64;
    let zeros = cf.alphas().iter().filter(|&&a| a == 0.0).count();
    if zeros == cf.rank() {
        Some((d * (pi_e / 2.0).ln()).exp())
    } else if zeros == 0 {
        let log_sum: f64 = cf
            .alphas()
            .iter()
            .map(|&a| pi_e.ln() - 2.0 * a.abs().ln())
            .sum();
        Some(log_sum.exp())
    } else {
        None
    }
}

/// Assemble the full diagnostic report for a canonical form and threshold.
pub fn bound_report(cf: &CanonicalForm, gamma0: f64) -> BoundReport {
    let lower_bound = marcum_lower_bound(cf, gamma0);
    let bre = bre_constant(cf);
    let note = match bre {
        Some(_) => "bre_constant bounds the limiting second-moment ratio of the IS \
                    estimator; it is a proven bound, not an estimate, and grows \
                    exponentially with the rank, so it can be vacuous for large d."
            .to_string(),
        None => "bre_constant unavailable: offsets mix zero and non-zero entries, \
                 a case covered by neither the non-central nor the zero-mean bound."
            .to_string(),
    };
    BoundReport {
        lower_bound,
        bre_constant: bre,
        note,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::CanonicalForm;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn tight_at_rank_one() {
        // d=1: the bound is the non-central chi-square(1) CDF itself.
        for (alpha, gamma0) in [(0.0, 0.8), (1.0, 0.3), (2.5, 2.0)] {
            let cf = CanonicalForm::from_parts(vec![1.0], vec![alpha]);
            let bound = marcum_lower_bound(&cf, gamma0);
            let exact = special_oracle_noncentral_chi1_cdf(alpha, gamma0);
            assert_abs_diff_eq!(bound, exact, epsilon = 1e-10);
        }
    }

    /// Oracle: P((Z+a)^2 <= x) by the erf closed form.
    fn special_oracle_noncentral_chi1_cdf(a: f64, x: f64) -> f64 {
        let b = x.sqrt();
        let s = std::f64::consts::SQRT_2;
        0.5 * (libm::erf((b - a) / s) + libm::erf((b + a) / s))
    }

    #[test]
    fn central_rank_two_bound_is_below_truth() {
        let cf = CanonicalForm::from_parts(vec![1.0, 1.0], vec![0.0, 0.0]);
        let bound = marcum_lower_bound(&cf, 1.0);
        // Each factor is P(chi^2_1 <= 1/2) = erf(1/2); truth is the chi^2_2
        // CDF at 1.
        let factor = libm::erf(0.5);
        assert_relative_eq!(bound, factor * factor, max_relative = 1e-12);
        assert_abs_diff_eq!(bound, 0.270_920, epsilon = 1e-6);
        let truth = -(-0.5f64).exp_m1();
        assert_abs_diff_eq!(truth, 0.393_469, epsilon = 1e-6);
        assert!(bound < truth);
    }

    #[test]
    fn zero_mean_bound_matches_marcum_bound() {
        for d in [1usize, 2, 5, 30] {
            let lambdas: Vec<f64> = (0..d).map(|i| 1.0 + 0.25 * i as f64).collect();
            let cf = CanonicalForm::from_parts(lambdas, vec![0.0; d]);
            for gamma0 in [0.01, 0.5, 3.0] {
                let zm = zero_mean_lower_bound(&cf, gamma0).unwrap();
                let mq = marcum_lower_bound(&cf, gamma0);
                assert_abs_diff_eq!(zm, mq, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn zero_mean_bound_rejects_offsets() {
        let cf = CanonicalForm::from_parts(vec![1.0, 1.0], vec![0.0, 0.4]);
        assert!(matches!(
            zero_mean_lower_bound(&cf, 1.0),
            Err(BoundsError::NonZeroMean { .. })
        ));
    }

    #[test]
    fn zero_mean_bound_below_chi2_truth() {
        let cf = CanonicalForm::from_parts(vec![1.0, 1.0], vec![0.0, 0.0]);
        let bound = zero_mean_lower_bound(&cf, 1.0).unwrap();
        assert!(bound <= -(-0.5f64).exp_m1());
    }

    #[test]
    fn bound_is_monotone_in_threshold() {
        let cf = CanonicalForm::from_parts(vec![2.0, 1.0, 0.4], vec![1.0, 0.5, -0.2]);
        let mut prev = 0.0;
        for k in 1..=40 {
            let gamma0 = 0.05 * k as f64;
            let b = marcum_lower_bound(&cf, gamma0);
            assert!(b >= prev, "bound decreased at gamma0={gamma0}");
            prev = b;
        }
    }

    #[test]
    fn bre_constant_cases() {
        let one = CanonicalForm::from_parts(vec![1.0], vec![1.0]);
        let pi_e = std::f64::consts::PI * std::f64::consts::E;
        assert_relative_eq!(bre_constant(&one).unwrap(), pi_e, max_relative = 1e-12);
        assert_abs_diff_eq!(bre_constant(&one).unwrap(), 8.5397, epsilon = 1e-4);

        let zero2 = CanonicalForm::from_parts(vec![1.0, 1.0], vec![0.0, 0.0]);
        let expected = (pi_e / 2.0) * (pi_e / 2.0);
        assert_relative_eq!(bre_constant(&zero2).unwrap(), expected, max_relative = 1e-12);
        assert_abs_diff_eq!(bre_constant(&zero2).unwrap(), 18.23, epsilon = 0.01);

        let mixed = CanonicalForm::from_parts(vec![1.0, 1.0], vec![1.0, 0.0]);
        assert!(bre_constant(&mixed).is_none());
        let report = bound_report(&mixed, 1.0);
        assert!(report.bre_constant.is_none());
        assert!(report.note.contains("unavailable"));
    }

    #[test]
    fn bound_survives_large_rank() {
        let d = 100;
        let cf = CanonicalForm::from_parts(vec![1.0; d], vec![1.0; d]);
        let b = marcum_lower_bound(&cf, 0.5);
        assert!(b > 0.0);
        assert!(b < 1e-100, "bound {b} unexpectedly large");
    }
}
