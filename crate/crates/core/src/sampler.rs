//! Naive Monte Carlo and importance-sampling estimators of the left-tail
//! probability `P(S_d <= gamma0)` over a canonical form.
//!
//! The IS proposal shifts each coordinate to mean `-alpha_i` and rescales it
//! to `sigma_i = sqrt(gamma0 / (d lambda_i))`, which centers the biased mean
//! of `S_d` exactly at the threshold. Likelihood ratios are accumulated in
//! log space and exponentiated once per sample.
//!
//! Sampling is chunked: every chunk of 2^14 samples draws from its own
//! counter-derived ChaCha stream and partial results are merged in chunk
//! order, so a fixed `(seed, m)` gives bitwise identical estimates no matter
//! how many worker threads run.

use crate::canonical::CanonicalForm;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::time::Instant;
use thiserror::Error;

/// Confidence multiplier used for half-widths and relative errors
/// (95% two-sided interval).
pub const DEFAULT_CONFIDENCE_C: f64 = 1.96;

/// Samples per RNG stream. Fixed so estimates are invariant to thread count.
const CHUNK_SAMPLES: u64 = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("non-finite importance weight encountered (log weight {log_weight})")]
    DegenerateWeight { log_weight: f64 },
}

/// Which estimator produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    NaiveMc,
    ImportanceSampling,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::NaiveMc => "naive_mc",
            Method::ImportanceSampling => "importance_sampling",
        }
    }
}

/// Per-coordinate parameters of the biased sampling density: coordinate `i`
/// is drawn as `N(means[i], scales[i]^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasedDensitySpec {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

/// Build the biased density for a canonical form and threshold:
/// `means[i] = -alpha_i`, `scales[i] = sqrt(gamma0 / (d lambda_i))`.
pub fn make_biased_spec(cf: &CanonicalForm, gamma0: f64) -> BiasedDensitySpec {
    assert!(gamma0 > 0.0, "threshold must be positive");
    let d = cf.rank() as f64;
    BiasedDensitySpec {
        means: cf.alphas().iter().map(|&a| -a).collect(),
        scales: cf
            .lambdas()
            .iter()
            .map(|&l| (gamma0 / (d * l)).sqrt())
            .collect(),
    }
}

/// Probability estimate together with its sampling diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    /// Estimated probability.
    pub estimate: f64,
    /// Sample variance of the per-sample estimator.
    pub variance: f64,
    /// `ci_halfwidth / estimate`; `None` when the estimate is zero.
    pub rel_error: Option<f64>,
    /// `C * sqrt(variance / samples)` with `C = 1.96`.
    pub ci_halfwidth: f64,
    pub samples: u64,
    pub seconds: f64,
    pub method: Method,
}

impl EstimateResult {
    fn finish(method: Method, estimate: f64, variance: f64, samples: u64, seconds: f64) -> Self {
        let ci_halfwidth = DEFAULT_CONFIDENCE_C * (variance / samples as f64).sqrt();
        let rel_error = (estimate > 0.0).then(|| ci_halfwidth / estimate);
        Self {
            estimate,
            variance,
            rel_error,
            ci_halfwidth,
            samples,
            seconds,
            method,
        }
    }
}

/// Naive Monte Carlo: draw `Z ~ N(0, I)` and average the indicator
/// `1{S_d <= gamma0}`. Variance uses the Bernoulli form
/// `p(1-p) M/(M-1)`.
pub fn naive_mc(cf: &CanonicalForm, gamma0: f64, m: u64, seed: u64) -> EstimateResult {
    assert!(m >= 1, "naive_mc requires at least one sample");
    let start = Instant::now();
    let lambdas = cf.lambdas();
    let alphas = cf.alphas();
    let counts = run_chunked(m, seed, |_, n, mut rng| {
        let mut hits = 0u64;
        for _ in 0..n {
            let mut s = 0.0;
            for (&l, &a) in lambdas.iter().zip(alphas) {
                let g: f64 = StandardNormal.sample(&mut rng);
                let t = g + a;
                s += l * t * t;
            }
            if s <= gamma0 {
                hits += 1;
            }
        }
        hits
    });
    let hits: u64 = counts.into_iter().sum();
    let mf = m as f64;
    let p = hits as f64 / mf;
    let variance = if m > 1 {
        p * (1.0 - p) * mf / (mf - 1.0)
    } else {
        0.0
    };
    EstimateResult::finish(Method::NaiveMc, p, variance, m, start.elapsed().as_secs_f64())
}

/// Importance sampling under the biased density of [`make_biased_spec`]:
/// averages `1{S_d <= gamma0} * L(Z)` where `L` is the Gaussian likelihood
/// ratio, with a streaming mean/variance accumulator.
pub fn importance_sampling(
    cf: &CanonicalForm,
    gamma0: f64,
    m_star: u64,
    seed: u64,
) -> Result<EstimateResult, SamplerError> {
    assert!(m_star >= 2, "importance_sampling requires at least two samples");
    let ctx = IsContext::new(cf, gamma0);
    let start = Instant::now();
    let chunks = run_chunked(m_star, seed, |_, n, mut rng| {
        let mut acc = Welford::default();
        for _ in 0..n {
            let weight = match ctx.draw(&mut rng) {
                Some(log_w) => {
                    let w = log_w.exp();
                    if !w.is_finite() {
                        return Err(log_w);
                    }
                    w
                }
                None => 0.0,
            };
            acc.push(weight);
        }
        Ok(acc)
    });
    let mut merged = Welford::default();
    for chunk in chunks {
        match chunk {
            Ok(w) => merged = merged.merge(&w),
            Err(log_weight) => return Err(SamplerError::DegenerateWeight { log_weight }),
        }
    }
    Ok(EstimateResult::finish(
        Method::ImportanceSampling,
        merged.mean,
        merged.sample_variance(),
        m_star,
        start.elapsed().as_secs_f64(),
    ))
}

/// Outcome of auditing the likelihood-ratio cap over accepted IS samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapAudit {
    /// Samples with indicator one.
    pub accepted: u64,
    /// Accepted samples whose log weight exceeded the cap.
    pub violations: u64,
    /// Largest accepted log weight seen.
    pub max_log_weight: f64,
    /// The cap `(d/2) ln(gamma0/d) - (1/2) sum ln lambda_i + d/2`.
    pub cap_log_weight: f64,
}

/// Re-run the IS sampling path and check every accepted sample against the
/// analytic weight cap. Diagnostic companion to [`importance_sampling`];
/// both share the same draw routine.
pub fn likelihood_cap_audit(cf: &CanonicalForm, gamma0: f64, m: u64, seed: u64) -> CapAudit {
    let ctx = IsContext::new(cf, gamma0);
    let cap = ctx.cap_log_weight();
    let chunks = run_chunked(m, seed, |_, n, mut rng| {
        let mut accepted = 0u64;
        let mut violations = 0u64;
        let mut max_log_w = f64::NEG_INFINITY;
        for _ in 0..n {
            if let Some(log_w) = ctx.draw(&mut rng) {
                accepted += 1;
                max_log_w = max_log_w.max(log_w);
                if log_w > cap {
                    violations += 1;
                }
            }
        }
        (accepted, violations, max_log_w)
    });
    let mut audit = CapAudit {
        accepted: 0,
        violations: 0,
        max_log_weight: f64::NEG_INFINITY,
        cap_log_weight: cap,
    };
    for (a, v, m) in chunks {
        audit.accepted += a;
        audit.violations += v;
        audit.max_log_weight = audit.max_log_weight.max(m);
    }
    audit
}

/// Shared per-sample IS computation.
struct IsContext<'a> {
    lambdas: &'a [f64],
    alphas: &'a [f64],
    scales: Vec<f64>,
    sum_ln_sigma: f64,
    gamma0: f64,
}

impl<'a> IsContext<'a> {
    fn new(cf: &'a CanonicalForm, gamma0: f64) -> Self {
        let spec = make_biased_spec(cf, gamma0);
        let sum_ln_sigma = spec.scales.iter().map(|s| s.ln()).sum();
        Self {
            lambdas: cf.lambdas(),
            alphas: cf.alphas(),
            scales: spec.scales,
            sum_ln_sigma,
            gamma0,
        }
    }

    /// Draw one biased sample; `Some(log_weight)` when the indicator is one.
    ///
    /// Coordinate `i` is `z_i = -alpha_i + sigma_i g_i`, so `(z_i + alpha_i)`
    /// is formed as `sigma_i g_i` directly and the log likelihood ratio is
    /// `sum ln sigma_i + (sum g_i^2 - sum z_i^2) / 2`.
    #[inline]
    fn draw(&self, rng: &mut ChaCha12Rng) -> Option<f64> {
        let mut s = 0.0;
        let mut g2 = 0.0;
        let mut z2 = 0.0;
        for i in 0..self.lambdas.len() {
            let g: f64 = StandardNormal.sample(rng);
            let t = self.scales[i] * g;
            s += self.lambdas[i] * t * t;
            g2 += g * g;
            let z = t - self.alphas[i];
            z2 += z * z;
        }
        if s <= self.gamma0 {
            let log_w = self.sum_ln_sigma + 0.5 * (g2 - z2);
            debug_assert!(
                log_w <= self.cap_log_weight() + 1e-9,
                "accepted weight {log_w} above cap {}",
                self.cap_log_weight()
            );
            Some(log_w)
        } else {
            None
        }
    }

    /// Analytic upper bound on accepted log weights:
    /// `sum ln sigma_i + d/2`.
    fn cap_log_weight(&self) -> f64 {
        self.sum_ln_sigma + 0.5 * self.lambdas.len() as f64
    }
}

/// Run `per_chunk` over fixed-size sample chunks in parallel. Chunk `c`
/// receives its own ChaCha stream derived from `(seed, c)`; results come back
/// in chunk order.
fn run_chunked<T, F>(total: u64, seed: u64, per_chunk: F) -> Vec<T>
where
    F: Fn(u64, u64, ChaCha12Rng) -> T + Sync,
    T: Send,
{
    let n_chunks = total.div_ceil(CHUNK_SAMPLES);
    (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK_SAMPLES;
            let count = CHUNK_SAMPLES.min(total - lo);
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(c);
            per_chunk(c, count, rng)
        })
        .collect()
}

/// Single-pass mean/variance accumulator with a parallel merge rule.
#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    #[inline]
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(&self, other: &Welford) -> Welford {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let nf = count as f64;
        Welford {
            count,
            mean: self.mean + delta * other.count as f64 / nf,
            m2: self.m2
                + other.m2
                + delta * delta * (self.count as f64) * (other.count as f64) / nf,
        }
    }

    fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::CanonicalForm;
    use crate::special::chi_square_cdf;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn central_form(d: usize) -> CanonicalForm {
        CanonicalForm::from_parts(vec![1.0; d], vec![0.0; d])
    }

    /// Invert the chi-square CDF by bisection (test oracle).
    fn chi_square_quantile(d: u32, p: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while chi_square_cdf(d, hi).unwrap() < p {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if chi_square_cdf(d, mid).unwrap() < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn biased_spec_direct_formula() {
        let cf = CanonicalForm::from_parts(vec![2.0], vec![0.3]);
        let spec = make_biased_spec(&cf, 2.0);
        assert_relative_eq!(spec.scales[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(spec.means[0], -0.3, epsilon = 1e-15);

        let cf = CanonicalForm::from_parts(vec![1.0; 4], vec![0.5; 4]);
        let spec = make_biased_spec(&cf, 4.0);
        for s in &spec.scales {
            assert_relative_eq!(*s, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn biased_mean_hits_threshold() {
        // Under the biased density E[sum lambda_i (Z_i + alpha_i)^2] = gamma0.
        use rand::SeedableRng;
        let cf = CanonicalForm::from_parts(vec![3.0, 1.0, 0.2], vec![1.0, -0.5, 2.0]);
        let gamma0 = 0.37;
        let spec = make_biased_spec(&cf, gamma0);
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let n = 1_000_000usize;
        let mut acc = Welford::default();
        for _ in 0..n {
            let mut s = 0.0;
            for i in 0..3 {
                let g: f64 = StandardNormal.sample(&mut rng);
                let z = spec.means[i] + spec.scales[i] * g;
                let t = z + cf.alphas()[i];
                s += cf.lambdas()[i] * t * t;
            }
            acc.push(s);
        }
        let se = (acc.sample_variance() / n as f64).sqrt();
        assert!(
            (acc.mean - gamma0).abs() <= 3.0 * se,
            "biased mean {} vs gamma0 {gamma0} (3se={})",
            acc.mean,
            3.0 * se
        );
    }

    #[test]
    fn naive_mc_full_mass() {
        let cf = CanonicalForm::from_parts(vec![2.0, 0.5], vec![1.0, -2.0]);
        let gamma0: f64 = cf
            .lambdas()
            .iter()
            .zip(cf.alphas())
            .map(|(&l, &a)| l * (a.abs() + 40.0).powi(2))
            .sum();
        let r = naive_mc(&cf, gamma0, 10_000, 1);
        assert_eq!(r.estimate, 1.0);
        assert_eq!(r.samples, 10_000);
    }

    #[test]
    fn naive_mc_chi_square_median() {
        // Median of chi^2_5 from the incomplete-gamma inversion oracle.
        let median = chi_square_quantile(5, 0.5);
        assert_abs_diff_eq!(median, 4.35146, epsilon = 1e-5);
        let r = naive_mc(&central_form(5), median, 1_000_000, 42);
        let se = (r.variance / r.samples as f64).sqrt();
        assert!((r.estimate - 0.5).abs() <= 3.0 * se);
    }

    #[test]
    fn is_matches_chi2_closed_form_small_threshold() {
        // d=2, central: P(chi^2_2 <= 0.1) = 1 - e^{-0.05}.
        let cf = central_form(2);
        let r = importance_sampling(&cf, 0.1, 100_000, 3).unwrap();
        let truth = -(-0.05f64).exp_m1();
        let se = (r.variance / r.samples as f64).sqrt();
        assert!(
            (r.estimate - truth).abs() <= 3.0 * se,
            "estimate {} truth {truth} 3se {}",
            r.estimate,
            3.0 * se
        );
    }

    #[test]
    fn is_zero_mean_matches_gamma_oracle() {
        // Remark-style zero-mean case: the same machinery estimates scaled
        // central chi-square tails for d = 1..3.
        for d in 1u32..=3 {
            let lambda = 0.7;
            let cf = CanonicalForm::from_parts(vec![lambda; d as usize], vec![0.0; d as usize]);
            let gamma0 = 0.05;
            let truth = chi_square_cdf(d, gamma0 / lambda).unwrap();
            let r = importance_sampling(&cf, gamma0, 200_000, 11).unwrap();
            let se = (r.variance / r.samples as f64).sqrt();
            assert!(
                (r.estimate - truth).abs() <= 3.0 * se,
                "d={d}: {} vs {truth} (3se {})",
                r.estimate,
                3.0 * se
            );
        }
    }

    #[test]
    fn is_and_mc_agree_in_moderate_regime() {
        let cf = CanonicalForm::from_parts(vec![1.5, 1.0, 0.5], vec![0.5, -0.3, 1.0]);
        let gamma0 = 1.2;
        let is = importance_sampling(&cf, gamma0, 100_000, 5).unwrap();
        let mc = naive_mc(&cf, gamma0, 1_000_000, 6);
        assert!(mc.estimate > 0.01 && mc.estimate < 0.5, "p={}", mc.estimate);
        let joint_se = (is.variance / is.samples as f64 + mc.variance / mc.samples as f64).sqrt();
        assert!(
            (is.estimate - mc.estimate).abs() <= 3.0 * joint_se,
            "is {} mc {} 3se {}",
            is.estimate,
            mc.estimate,
            3.0 * joint_se
        );
    }

    #[test]
    fn estimates_are_thread_count_invariant() {
        let cf = CanonicalForm::from_parts(vec![2.0, 1.0, 0.3], vec![1.0, 0.0, -0.7]);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                let is = importance_sampling(&cf, 0.4, 50_000, 99).unwrap();
                let mc = naive_mc(&cf, 0.4, 50_000, 99);
                (is.estimate.to_bits(), is.variance.to_bits(), mc.estimate.to_bits())
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn zero_estimate_has_undefined_rel_error() {
        // Deep tail at tiny M: naive MC sees no hits.
        let cf = central_form(10);
        let r = naive_mc(&cf, 1e-6, 1000, 7);
        assert_eq!(r.estimate, 0.0);
        assert!(r.rel_error.is_none());
    }

    #[test]
    fn cap_audit_sees_no_violations() {
        let cf = CanonicalForm::from_parts(vec![2.0, 0.8, 0.1], vec![1.0, -0.2, 0.5]);
        let audit = likelihood_cap_audit(&cf, 0.05, 200_000, 13);
        assert!(audit.accepted > 50_000, "accepted {}", audit.accepted);
        assert_eq!(audit.violations, 0);
        assert!(audit.max_log_weight <= audit.cap_log_weight);
    }

    #[test]
    fn welford_merge_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.01).collect();
        let mut whole = Welford::default();
        for &x in &xs {
            whole.push(x);
        }
        let (a, b) = xs.split_at(317);
        let mut wa = Welford::default();
        let mut wb = Welford::default();
        for &x in a {
            wa.push(x);
        }
        for &x in b {
            wb.push(x);
        }
        let merged = wa.merge(&wb);
        assert_relative_eq!(merged.mean, whole.mean, max_relative = 1e-12);
        assert_relative_eq!(merged.m2, whole.m2, max_relative = 1e-10);
        assert_eq!(merged.count, whole.count);
    }
}
