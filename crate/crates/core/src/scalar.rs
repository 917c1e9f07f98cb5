//! Exact and floating-point scalar building blocks: harmonic numbers, the
//! logarithmic constant `beta_{p,d}`, rising factorials, integer digamma
//! differences and the `chi -> eta` change of variable.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// `H_j = sum_{i=1}^{j} 1/i`, with `H_0 = 0`.
pub fn harmonic(j: u64) -> Rational {
    let mut acc = Rational::zero();
    for i in 1..=j {
        acc += Rational::new(BigInt::one(), BigInt::from(i));
    }
    acc
}

/// `beta_{p,d} = (H_p + H_{d/2+p-1} - H_{d/2-1}) / 2` for even `d >= 2`.
pub fn beta_pd(p: u64, d: u64) -> Result<Rational> {
    if d < 2 || !d.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "beta_pd needs an even dimension d >= 2, got {d}"
        )));
    }
    let half = d / 2;
    let sum = harmonic(p) + harmonic(half + p - 1) - harmonic(half - 1);
    Ok(sum / Rational::from_integer(BigInt::from(2)))
}

/// Rising factorial `(z)_n = z (z+1) ... (z+n-1)`; `(z)_0 = 1`.
pub fn pochhammer(z: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (z + i as f64))
}

/// `psi(a) - psi(b) = H_{a-1} - H_{b-1}` for positive integers.
///
/// Euler's constant cancels, so the result is an exact rational.
pub fn digamma_diff(a: u64, b: u64) -> Result<Rational> {
    if a == 0 || b == 0 {
        return Err(Error::Domain(format!(
            "digamma_diff needs positive integers, got ({a}, {b})"
        )));
    }
    let (lo, hi, sign) = if a >= b { (b, a, 1) } else { (a, b, -1) };
    let mut acc = Rational::zero();
    for i in lo..hi {
        acc += Rational::new(BigInt::one(), BigInt::from(i));
    }
    Ok(if sign < 0 { -acc } else { acc })
}

/// Inverse hyperbolic cosine for `chi > 1`, written so that `chi -> 1+`
/// loses no digits: `eta = log1p((chi-1) + sqrt((chi-1)(chi+1)))`.
pub fn eta_from_chi(chi: f64) -> Result<f64> {
    if !(chi > 1.0) || !chi.is_finite() {
        return Err(Error::Domain(format!(
            "toroidal parameter must satisfy chi > 1, got {chi}"
        )));
    }
    let t = chi - 1.0;
    Ok((t + (t * (chi + 1.0)).sqrt()).ln_1p())
}

/// Neumann factor: 1 for `n = 0`, 2 otherwise.
pub fn neumann(n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        2.0
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `n!` in floating point (infinite beyond 170).
pub fn factorial_f64(n: u64) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Correctly rounded conversion of an exact rational to `f64`.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
pub(crate) fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_small_values() {
        assert_eq!(harmonic(0), Rational::zero());
        assert_eq!(harmonic(1), Rational::one());
        assert_eq!(harmonic(3), rational(11, 6));
        for j in 1..30 {
            assert_eq!(harmonic(j) - harmonic(j - 1), rational(1, j as i64));
        }
    }

    #[test]
    fn beta_values() {
        for d in (2..=12).step_by(2) {
            assert_eq!(beta_pd(0, d).unwrap(), Rational::zero());
        }
        assert_eq!(beta_pd(1, 2).unwrap(), Rational::one());
        assert_eq!(beta_pd(1, 4).unwrap(), rational(3, 4));
        assert!(beta_pd(1, 3).is_err());
        assert!(beta_pd(1, 0).is_err());
    }

    #[test]
    fn beta_identity() {
        let two = Rational::from_integer(BigInt::from(2));
        for d in (2..=10u64).step_by(2) {
            for p in 0..10u64 {
                let lhs = two.clone() * beta_pd(p, d).unwrap() + harmonic(d / 2 - 1);
                assert_eq!(lhs, harmonic(p) + harmonic(d / 2 + p - 1));
            }
        }
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(0.37, 0), 1.0);
        assert_eq!(pochhammer(1.0, 4), 24.0);
        assert_eq!(pochhammer(-3.0, 5), 0.0);
        for &z in &[-2.5, -0.3, 0.0, 0.5, 3.25] {
            for n in 0..12 {
                let a = pochhammer(z, n + 1);
                let b = pochhammer(z, n) * (z + n as f64);
                assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn digamma_differences() {
        for n in 1..8 {
            assert_eq!(digamma_diff(n, n).unwrap(), Rational::zero());
        }
        assert_eq!(digamma_diff(2, 1).unwrap(), Rational::one());
        assert_eq!(digamma_diff(5, 3).unwrap(), rational(7, 12));
        assert_eq!(digamma_diff(3, 5).unwrap(), rational(-7, 12));
        assert!(digamma_diff(0, 3).is_err());
    }

    #[test]
    fn eta_round_trip() {
        assert!((eta_from_chi(1.0f64.cosh()).unwrap() - 1.0).abs() < 1e-14);
        let expected = (2.0 + 3.0f64.sqrt()).ln();
        assert!((eta_from_chi(2.0).unwrap() - expected).abs() < 1e-15);
        assert!(eta_from_chi(1.0).is_err());
        assert!(eta_from_chi(0.5).is_err());
        assert!(eta_from_chi(f64::NAN).is_err());
        let mut last = f64::INFINITY;
        for e in 1..15 {
            let eta = eta_from_chi(1.0 + 10f64.powi(-e)).unwrap();
            assert!(eta > 0.0 && eta < last);
            last = eta;
        }
    }
}
