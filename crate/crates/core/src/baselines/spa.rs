//! Lugannani-Rice saddle-point approximation of the left tail, with the
//! saddle point found by safeguarded Newton on the cumulant generating
//! function of the weighted non-central chi-square sum:
//!
//! `K(s) = sum_i [-(1/2) ln(1 - 2 s lambda_i) + s lambda_i alpha_i^2 / (1 - 2 s lambda_i)]`
//!
//! on `s < 1 / (2 lambda_max)`. For the left tail the saddle point is
//! negative and `K'` is strictly increasing, so a sign bracket `(s_lo, 0)`
//! always pins it down.

use super::BaselineError;
use crate::canonical::CanonicalForm;
use crate::special::{normal_cdf, normal_pdf};

/// Root-finding controls for [`spa_cdf`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaConfig {
    /// Convergence target on `|K'(s) - gamma0|`.
    pub newton_tol: f64,
    pub max_iter: usize,
    /// Geometric growth factor for the lower bracket search.
    pub bracket_expansion: f64,
}

impl Default for SpaConfig {
    fn default() -> Self {
        Self {
            newton_tol: 1e-11,
            max_iter: 200,
            bracket_expansion: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaOutcome {
    pub value: f64,
    /// Root of `K'(s) = gamma0`.
    pub saddle_point: f64,
    /// Residual `|K'(s) - gamma0|` at the root.
    pub kprime_residual: f64,
    pub iterations: usize,
}

struct Cgf<'a> {
    lambdas: &'a [f64],
    alphas: &'a [f64],
}

impl Cgf<'_> {
    fn k(&self, s: f64) -> f64 {
        let mut sum = 0.0;
        for (&l, &a) in self.lambdas.iter().zip(self.alphas) {
            let r = 1.0 - 2.0 * s * l;
            sum += -0.5 * r.ln() + s * l * a * a / r;
        }
        sum
    }

    fn k1(&self, s: f64) -> f64 {
        let mut sum = 0.0;
        for (&l, &a) in self.lambdas.iter().zip(self.alphas) {
            let r = 1.0 - 2.0 * s * l;
            sum += l / r + l * a * a / (r * r);
        }
        sum
    }

    fn k2(&self, s: f64) -> f64 {
        let mut sum = 0.0;
        for (&l, &a) in self.lambdas.iter().zip(self.alphas) {
            let r = 1.0 - 2.0 * s * l;
            sum += 2.0 * l * l / (r * r) + 4.0 * l * l * a * a / (r * r * r);
        }
        sum
    }
}

/// Saddle-point (Lugannani-Rice) approximation of `P(S_d <= gamma0)`.
/// Requires the threshold strictly below the mean `K'(0)`; the formula is
/// singular at the mean itself.
pub fn spa_cdf(
    cf: &CanonicalForm,
    gamma0: f64,
    cfg: &SpaConfig,
) -> Result<SpaOutcome, BaselineError> {
    assert!(gamma0 > 0.0, "threshold must be positive");
    assert!(cfg.newton_tol > 0.0, "newton_tol must be positive");
    let cgf = Cgf {
        lambdas: cf.lambdas(),
        alphas: cf.alphas(),
    };
    let mean = cf.mean();
    if (gamma0 - mean).abs() <= 1e-9 * mean {
        return Err(BaselineError::AtMeanSingularity { gamma0, mean });
    }
    if gamma0 > mean {
        return Err(BaselineError::ThresholdNotBelowMean { gamma0, mean });
    }

    let d = cf.rank() as f64;
    // Deep-tail asymptote K'(s) ~ -d/(2s) gives the starting guess.
    let mut s_lo = -0.5 * d / gamma0;
    let mut iterations = 0usize;
    while cgf.k1(s_lo) >= gamma0 {
        s_lo *= cfg.bracket_expansion;
        iterations += 1;
        if iterations >= cfg.max_iter || !s_lo.is_finite() {
            return Err(BaselineError::NoConvergence {
                iterations,
                residual: cgf.k1(s_lo) - gamma0,
            });
        }
    }
    let mut s_hi = 0.0f64; // K'(0) = mean > gamma0

    let mut s = (-0.5 * d / gamma0).clamp(s_lo, s_hi);
    let mut residual = cgf.k1(s) - gamma0;
    while residual.abs() > cfg.newton_tol {
        iterations += 1;
        if iterations >= cfg.max_iter {
            return Err(BaselineError::NoConvergence {
                iterations,
                residual,
            });
        }
        if residual > 0.0 {
            s_hi = s;
        } else {
            s_lo = s;
        }
        let k2 = cgf.k2(s);
        let newton = s - residual / k2;
        s = if newton > s_lo && newton < s_hi {
            newton
        } else {
            0.5 * (s_lo + s_hi)
        };
        if s_hi - s_lo <= f64::EPSILON * s_lo.abs() {
            // Bracket exhausted in double precision.
            residual = cgf.k1(s) - gamma0;
            if residual.abs() > cfg.newton_tol {
                return Err(BaselineError::NoConvergence {
                    iterations,
                    residual,
                });
            }
            break;
        }
        residual = cgf.k1(s) - gamma0;
    }

    let k2 = cgf.k2(s);
    debug_assert!(k2 > 0.0, "CGF must be strictly convex at the saddle point");
    let w = s.signum() * (2.0 * (s * gamma0 - cgf.k(s)).max(0.0)).sqrt();
    let v = s * k2.sqrt();
    let value = (normal_cdf(w) + normal_pdf(w) * (1.0 / w - 1.0 / v)).clamp(0.0, 1.0);
    Ok(SpaOutcome {
        value,
        saddle_point: s,
        kprime_residual: residual.abs(),
        iterations,
    })
}
