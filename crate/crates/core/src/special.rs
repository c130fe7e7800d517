//! Scalar special functions: standard normal CDF, the generalized Marcum-Q
//! function of order 1/2, and the lower incomplete gamma function.
//!
//! Only the order-1/2 Marcum-Q is provided; it reduces to differences of
//! normal CDFs, which keeps the deep tail accurate relative to series
//! evaluations of the general order.

use thiserror::Error;

/// Hard cap on series / continued-fraction iterations.
const MAX_GAMMA_ITER: usize = 500;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialError {
    #[error("incomplete gamma did not converge within {iterations} iterations (s={s}, x={x})")]
    IterationLimit { iterations: usize, s: f64, x: f64 },
}

/// Standard normal CDF. Evaluated through `erfc` so both tails keep
/// full relative accuracy.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal survival function `1 - Phi(x)`.
#[inline]
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Generalized Marcum-Q function of order 1/2:
/// `Q_{1/2}(a, b) = P((Z + a)^2 > b^2)` for standard normal `Z`.
///
/// Clamped to `[0, 1]` to absorb last-ulp excursions.
#[inline]
pub fn marcum_q_half(a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0);
    (1.0 - marcum_q_half_complement(a, b)).clamp(0.0, 1.0)
}

/// Complement `1 - Q_{1/2}(a, b) = P((Z + a)^2 <= b^2)`, i.e. the CDF of a
/// non-central chi-square with one degree of freedom and non-centrality `a^2`
/// evaluated at `b^2`.
///
/// Written as a difference of survival functions, `Phi_c(a-b) - Phi_c(a+b)`,
/// so the result stays accurate when `a` is large and both tails are tiny.
#[inline]
pub fn marcum_q_half_complement(a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0);
    (normal_sf(a - b) - normal_sf(a + b)).clamp(0.0, 1.0)
}

/// Lower incomplete gamma function `gamma(s, x) = int_0^x t^{s-1} e^{-t} dt`
/// (unnormalized). Series expansion for `x < s + 1`, Lentz continued fraction
/// otherwise.
pub fn lower_incomplete_gamma(s: f64, x: f64) -> Result<f64, SpecialError> {
    assert!(s > 0.0, "lower_incomplete_gamma requires s > 0, got {s}");
    assert!(x >= 0.0, "lower_incomplete_gamma requires x >= 0, got {x}");
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < s + 1.0 {
        // gamma(s, x) = x^s e^{-x} sum_n x^n / (s (s+1) ... (s+n))
        let mut term = 1.0 / s;
        let mut sum = term;
        for n in 1..=MAX_GAMMA_ITER {
            term *= x / (s + n as f64);
            sum += term;
            if term.abs() < sum.abs() * f64::EPSILON {
                return Ok(sum * (s * x.ln() - x).exp());
            }
        }
        Err(SpecialError::IterationLimit {
            iterations: MAX_GAMMA_ITER,
            s,
            x,
        })
    } else {
        // Upper fraction first: Gamma(s, x) = x^s e^{-x} / CF, then subtract.
        let q = upper_gamma_cf(s, x)?;
        Ok(libm::exp(libm::lgamma(s)) - q)
    }
}

/// Regularized lower incomplete gamma `P(s, x) = gamma(s, x) / Gamma(s)`,
/// the chi-square CDF building block.
pub fn regularized_lower_gamma(s: f64, x: f64) -> Result<f64, SpecialError> {
    assert!(s > 0.0 && x >= 0.0);
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < s + 1.0 {
        let g = lower_incomplete_gamma(s, x)?;
        Ok((g * (-libm::lgamma(s)).exp()).clamp(0.0, 1.0))
    } else {
        let q = upper_gamma_cf(s, x)?;
        Ok((1.0 - q * (-libm::lgamma(s)).exp()).clamp(0.0, 1.0))
    }
}

/// CDF of a central chi-square with `d` degrees of freedom.
pub fn chi_square_cdf(d: u32, x: f64) -> Result<f64, SpecialError> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    regularized_lower_gamma(f64::from(d) / 2.0, x / 2.0)
}

/// Unnormalized upper incomplete gamma by modified Lentz continued fraction;
/// valid for x >= s + 1 where it converges quickly.
fn upper_gamma_cf(s: f64, x: f64) -> Result<f64, SpecialError> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_GAMMA_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            return Ok((s * x.ln() - x).exp() * h);
        }
    }
    Err(SpecialError::IterationLimit {
        iterations: MAX_GAMMA_ITER,
        s,
        x,
    })
}
