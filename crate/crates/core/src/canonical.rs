//! Problem validation and reduction of `X^T S X` (Gaussian `X`) to its
//! canonical form: a weighted sum of independent non-central chi-square(1)
//! variates `sum_i lambda_i (Z_i + alpha_i)^2`.
//!
//! The reduction diagonalizes `A = S_x^{1/2} S S_x^{1/2}` and carries the
//! whitened mean through the same rotation. Everything downstream (sampling,
//! bounds, baselines) works on the `(lambda, alpha)` pair only.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Default relative eigenvalue cutoff used for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

/// Relative tolerance on `max|A - A^T|` before an input matrix is rejected.
const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CanonicalError {
    #[error("matrix {name} is not symmetric: max|A - A^T| = {deviation:.3e} exceeds {tol:.3e}")]
    NonSymmetric {
        name: &'static str,
        deviation: f64,
        tol: f64,
    },
    #[error("covariance is not strictly positive definite (eigenvalue {eigenvalue:.3e})")]
    NotPositiveDefinite { eigenvalue: f64 },
    #[error("form matrix is not positive semi-definite (eigenvalue {eigenvalue:.3e})")]
    NotPsd { eigenvalue: f64 },
    #[error("threshold must be positive, got {gamma0}")]
    NonPositiveThreshold { gamma0: f64 },
    #[error("dimension mismatch: mu has length {mu_len}, sigma_x is {sx_rows}x{sx_cols}, sigma is {s_rows}x{s_cols}")]
    DimensionMismatch {
        mu_len: usize,
        sx_rows: usize,
        sx_cols: usize,
        s_rows: usize,
        s_cols: usize,
    },
}

/// A left-tail problem: `P(X^T sigma X <= gamma0)` with `X ~ N(mu, sigma_x)`.
#[derive(Debug, Clone)]
pub struct QuadFormProblem {
    pub mu: DVector<f64>,
    pub sigma_x: DMatrix<f64>,
    pub sigma: DMatrix<f64>,
    pub gamma0: f64,
}

impl QuadFormProblem {
    pub fn new(mu: DVector<f64>, sigma_x: DMatrix<f64>, sigma: DMatrix<f64>, gamma0: f64) -> Self {
        Self {
            mu,
            sigma_x,
            sigma,
            gamma0,
        }
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }
}

/// Canonical reduction output: eigenvalues (descending) and mean offsets of
/// the retained coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    lambdas: Vec<f64>,
    alphas: Vec<f64>,
    n_original: usize,
    dropped_mass: usize,
}

impl CanonicalForm {
    /// Build a canonical form directly from `(lambda, alpha)` pairs. Panics if
    /// lengths differ or any eigenvalue is non-positive; intended for problems
    /// already stated in diagonal form.
    pub fn from_parts(lambdas: Vec<f64>, alphas: Vec<f64>) -> Self {
        assert_eq!(lambdas.len(), alphas.len(), "lambda/alpha length mismatch");
        assert!(
            lambdas.iter().all(|&l| l > 0.0 && l.is_finite()),
            "eigenvalues must be positive and finite"
        );
        let n = lambdas.len();
        let mut pairs: Vec<(f64, f64)> = lambdas.into_iter().zip(alphas).collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        Self {
            lambdas: pairs.iter().map(|p| p.0).collect(),
            alphas: pairs.iter().map(|p| p.1).collect(),
            n_original: n,
            dropped_mass: 0,
        }
    }

    /// Retained eigenvalues, sorted descending.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Mean offsets aligned with `lambdas()`.
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Effective rank `d`.
    pub fn rank(&self) -> usize {
        self.lambdas.len()
    }

    /// Dimension of the original problem.
    pub fn n_original(&self) -> usize {
        self.n_original
    }

    /// Number of eigenvalues treated as zero and dropped.
    pub fn dropped_mass(&self) -> usize {
        self.dropped_mass
    }

    /// Mean of the canonical sum, `sum lambda_i (1 + alpha_i^2)`.
    pub fn mean(&self) -> f64 {
        self.lambdas
            .iter()
            .zip(&self.alphas)
            .map(|(&l, &a)| l * (1.0 + a * a))
            .sum()
    }
}

/// Check all problem invariants: matching dimensions, symmetric inputs,
/// strictly positive definite covariance, positive semi-definite form matrix,
/// positive threshold.
pub fn validate_problem(p: &QuadFormProblem) -> Result<(), CanonicalError> {
    let n = p.mu.len();
    if p.sigma_x.nrows() != n
        || p.sigma_x.ncols() != n
        || p.sigma.nrows() != n
        || p.sigma.ncols() != n
    {
        return Err(CanonicalError::DimensionMismatch {
            mu_len: n,
            sx_rows: p.sigma_x.nrows(),
            sx_cols: p.sigma_x.ncols(),
            s_rows: p.sigma.nrows(),
            s_cols: p.sigma.ncols(),
        });
    }
    if !(p.gamma0 > 0.0) {
        return Err(CanonicalError::NonPositiveThreshold { gamma0: p.gamma0 });
    }
    let sx = checked_symmetrize(&p.sigma_x, "sigma_x")?;
    let s = checked_symmetrize(&p.sigma, "sigma")?;

    let sx_eigs = sx.symmetric_eigenvalues();
    let sx_max = sx_eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sx_min = sx_eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(sx_max > 0.0) || sx_min <= DEFAULT_RANK_TOL * sx_max {
        return Err(CanonicalError::NotPositiveDefinite { eigenvalue: sx_min });
    }

    let s_eigs = s.symmetric_eigenvalues();
    let s_abs_max = s_eigs.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
    let s_min = s_eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    if s_min < -DEFAULT_RANK_TOL * s_abs_max {
        return Err(CanonicalError::NotPsd { eigenvalue: s_min });
    }
    Ok(())
}

/// Symmetric square root of a symmetric positive definite matrix via spectral
/// decomposition. The result `R` satisfies `R R = m` and is itself symmetric.
pub fn symmetric_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>, CanonicalError> {
    let sym = checked_symmetrize(m, "matrix")?;
    let eig = sym.symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    if let Some(&bad) = eig
        .eigenvalues
        .iter()
        .find(|&&l| l <= DEFAULT_RANK_TOL * max || max <= 0.0)
    {
        return Err(CanonicalError::NotPositiveDefinite { eigenvalue: bad });
    }
    let sqrt_vals = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| l.sqrt()),
    );
    Ok(scaled_outer(&eig.eigenvectors, &sqrt_vals))
}

/// Reduce a validated problem to canonical form. Eigenvalues of
/// `A = S_x^{1/2} S S_x^{1/2}` at or below `rank_tol * lambda_max` are
/// dropped; the survivors come out sorted descending with ties broken by
/// the eigensolver's original ordering, so identical inputs give bitwise
/// identical output.
pub fn reduce(p: &QuadFormProblem, rank_tol: f64) -> Result<CanonicalForm, CanonicalError> {
    validate_problem(p)?;
    let n = p.dim();
    let sx = symmetrize(&p.sigma_x);
    let s = symmetrize(&p.sigma);

    let eig_sx = sx.symmetric_eigen();
    let sqrt_vals = DVector::from_iterator(n, eig_sx.eigenvalues.iter().map(|&l| l.sqrt()));
    let inv_sqrt_vals = DVector::from_iterator(n, eig_sx.eigenvalues.iter().map(|&l| 1.0 / l.sqrt()));
    let sx_sqrt = scaled_outer(&eig_sx.eigenvectors, &sqrt_vals);
    let sx_inv_sqrt = scaled_outer(&eig_sx.eigenvectors, &inv_sqrt_vals);

    let a = symmetrize(&(&sx_sqrt * &s * &sx_sqrt));
    let eig_a = a.symmetric_eigen();

    // alpha_full_i = w_i . (S_x^{-1/2} mu), w_i the i-th eigenvector of A.
    let whitened_mean = &sx_inv_sqrt * &p.mu;
    let alpha_full = eig_a.eigenvectors.transpose() * whitened_mean;

    let lambda_max = eig_a.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let threshold = rank_tol * lambda_max;
    let mut retained: Vec<(f64, f64, usize)> = eig_a
        .eigenvalues
        .iter()
        .zip(alpha_full.iter())
        .enumerate()
        .filter(|(_, (&l, _))| l > threshold && lambda_max > 0.0)
        .map(|(i, (&l, &al))| (l, al, i))
        .collect();
    retained.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.2.cmp(&b.2)));

    let d = retained.len();
    Ok(CanonicalForm {
        lambdas: retained.iter().map(|t| t.0).collect(),
        alphas: retained.iter().map(|t| t.1).collect(),
        n_original: n,
        dropped_mass: n - d,
    })
}

/// Reduce with the default rank tolerance.
pub fn reduce_default(p: &QuadFormProblem) -> Result<CanonicalForm, CanonicalError> {
    reduce(p, DEFAULT_RANK_TOL)
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()))
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn checked_symmetrize(m: &DMatrix<f64>, name: &'static str) -> Result<DMatrix<f64>, CanonicalError> {
    let dev = max_abs(&(m - m.transpose()));
    let tol = SYMMETRY_TOL * max_abs(m);
    if !(dev <= tol) {
        return Err(CanonicalError::NonSymmetric {
            name,
            deviation: dev,
            tol,
        });
    }
    Ok(symmetrize(m))
}

/// `V diag(vals) V^T` for orthonormal columns `V`.
fn scaled_outer(vectors: &DMatrix<f64>, vals: &DVector<f64>) -> DMatrix<f64> {
    let mut scaled = vectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= vals[j];
    }
    &scaled * vectors.transpose()
}
