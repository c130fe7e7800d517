//! The canonical reduction must preserve the distribution: sampling X
//! directly and evaluating X^T S X has to match sampling the reduced sum
//! S_d = sum lambda_i (Z_i + alpha_i)^2, including under a common
//! permutation of the inputs.

use nalgebra::{DMatrix, DVector};
use qtail::canonical::{reduce_default, QuadFormProblem};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

const SAMPLES: usize = 1_000_000;

/// Wishart-style random SPD matrix `G G^T / n + ridge I`.
fn random_spd(rng: &mut ChaCha12Rng, n: usize, ridge: f64) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        let v: f64 = StandardNormal.sample(rng);
        v
    });
    &g * g.transpose() / n as f64 + DMatrix::identity(n, n) * ridge
}

/// Random PSD matrix of rank at most `k`.
fn random_psd(rng: &mut ChaCha12Rng, n: usize, k: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, k, |_, _| {
        let v: f64 = StandardNormal.sample(rng);
        v
    });
    &g * g.transpose() / k as f64
}

fn random_problem(rng: &mut ChaCha12Rng, n: usize) -> QuadFormProblem {
    let sigma_x = random_spd(rng, n, 0.3);
    let rank = rng.random_range(1..=n);
    let sigma = random_psd(rng, n, rank);
    let mu = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
    QuadFormProblem::new(mu, sigma_x, sigma, 1.0)
}

/// Draw `SAMPLES` realizations of X^T S X by sampling X through the
/// Cholesky factor of S_x.
fn direct_samples(p: &QuadFormProblem, seed: u64) -> Vec<f64> {
    let n = p.dim();
    let l = p.sigma_x.clone().cholesky().expect("SPD").l();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut z = DVector::zeros(n);
    (0..SAMPLES)
        .map(|_| {
            for i in 0..n {
                z[i] = StandardNormal.sample(&mut rng);
            }
            let x = &p.mu + &l * &z;
            (x.transpose() * &p.sigma * &x)[(0, 0)]
        })
        .collect()
}

/// Draw `SAMPLES` realizations of the reduced sum.
fn canonical_samples(p: &QuadFormProblem, seed: u64) -> Vec<f64> {
    let cf = reduce_default(p).expect("reduce");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..SAMPLES)
        .map(|_| {
            cf.lambdas()
                .iter()
                .zip(cf.alphas())
                .map(|(&l, &a)| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    l * (z + a) * (z + a)
                })
                .sum()
        })
        .collect()
}

/// Compare empirical CDFs at five pooled quantiles within three joint
/// binomial standard errors.
fn assert_same_distribution(a: &[f64], b: &[f64], label: &str) {
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    pooled.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for q in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let t = pooled[(q * (pooled.len() - 1) as f64) as usize];
        let fa = a.iter().filter(|&&v| v <= t).count() as f64 / a.len() as f64;
        let fb = b.iter().filter(|&&v| v <= t).count() as f64 / b.len() as f64;
        let p = 0.5 * (fa + fb);
        let se = (p * (1.0 - p) * (1.0 / a.len() as f64 + 1.0 / b.len() as f64)).sqrt();
        assert!(
            (fa - fb).abs() <= 3.0 * se,
            "{label}: CDFs differ at t={t}: {fa} vs {fb} (3se={})",
            3.0 * se
        );
    }
}

#[test]
fn reduced_sum_matches_direct_quadratic_form() {
    let mut rng = ChaCha12Rng::seed_from_u64(0xd15c0);
    for case in 0..4 {
        let n = 2 + (case % 5);
        let p = random_problem(&mut rng, n);
        let direct = direct_samples(&p, 100 + case as u64);
        let canon = canonical_samples(&p, 200 + case as u64);
        assert_same_distribution(&direct, &canon, &format!("case {case} (n={n})"));
    }
}

#[test]
fn reduction_invariant_under_common_permutation() {
    let mut rng = ChaCha12Rng::seed_from_u64(0x9e12);
    let n = 5;
    let p = random_problem(&mut rng, n);

    // Conjugate everything by the same permutation; the distribution of the
    // form cannot change, whatever the eigensolver does coordinate-wise.
    let perm = [3usize, 0, 4, 1, 2];
    let pm = DMatrix::from_fn(n, n, |i, j| if perm[i] == j { 1.0 } else { 0.0 });
    let permuted = QuadFormProblem::new(
        &pm * &p.mu,
        &pm * &p.sigma_x * pm.transpose(),
        &pm * &p.sigma * pm.transpose(),
        p.gamma0,
    );

    let cf_a = reduce_default(&p).unwrap();
    let cf_b = reduce_default(&permuted).unwrap();
    // Same eigenvalue multiset.
    assert_eq!(cf_a.rank(), cf_b.rank());
    for (la, lb) in cf_a.lambdas().iter().zip(cf_b.lambdas()) {
        assert!(
            (la - lb).abs() <= 1e-9 * la.abs().max(1.0),
            "eigenvalue mismatch {la} vs {lb}"
        );
    }
    let a = canonical_samples(&p, 77);
    let b = canonical_samples(&permuted, 78);
    assert_same_distribution(&a, &b, "permutation conjugation");
}

#[test]
fn toeplitz_reference_point_agrees_both_ways() {
    // Dense Toeplitz family at a moderate threshold: direct X-space sampling
    // and the reduced sum see the same left tail.
    let n = 10;
    let xi = 0.4;
    let rho = 0.8;
    let gamma0 = 10.0;
    let p = QuadFormProblem::new(
        qtail::genmat::constant_mean(n, 1.0),
        qtail::genmat::toeplitz_power(&qtail::genmat::ToeplitzPowerSpec { n, base: rho }).unwrap(),
        qtail::genmat::toeplitz_power(&qtail::genmat::ToeplitzPowerSpec { n, base: xi }).unwrap(),
        gamma0,
    );
    let direct = direct_samples(&p, 5);
    let canon = canonical_samples(&p, 6);
    let fa = direct.iter().filter(|&&v| v <= gamma0).count() as f64 / direct.len() as f64;
    let fb = canon.iter().filter(|&&v| v <= gamma0).count() as f64 / canon.len() as f64;
    let se = (fa * (1.0 - fa) * 2.0 / SAMPLES as f64).sqrt();
    assert!((fa - fb).abs() <= 3.0 * se, "{fa} vs {fb}");
    // and both sit near the known value for this configuration
    assert!((fa - 0.1925).abs() <= 4.0 * se + 1e-4, "fa={fa}");
}
