//! Test-problem generators: Toeplitz power matrices `M[i][j] = base^|i-j|`
//! and constant mean vectors. Generated matrices enter estimation through the
//! same validated path as user-supplied ones.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenmatError {
    #[error("toeplitz base must lie in (0, 1), got {base}")]
    BaseOutOfRange { base: f64 },
}

/// Parameters of a Toeplitz power matrix. Any `base` in (0, 1) yields a
/// strictly positive definite matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToeplitzPowerSpec {
    pub n: usize,
    pub base: f64,
}

/// Build the symmetric Toeplitz matrix with entries `base^|i-j|`.
pub fn toeplitz_power(spec: &ToeplitzPowerSpec) -> Result<DMatrix<f64>, GenmatError> {
    if !(spec.base > 0.0 && spec.base < 1.0) {
        return Err(GenmatError::BaseOutOfRange { base: spec.base });
    }
    Ok(DMatrix::from_fn(spec.n, spec.n, |i, j| {
        spec.base.powi((i as i32 - j as i32).abs())
    }))
}

/// Vector of `n` copies of `value`.
pub fn constant_mean(n: usize, value: f64) -> DVector<f64> {
    DVector::from_element(n, value)
}
