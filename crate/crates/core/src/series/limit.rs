//! Closed-form power and inverse-power series, and the parameter-derivative
//! ("limit") route to the log series.
//!
//! All Legendre functions here are evaluated in the variable
//! `w = (coth eta - 1)/2 = 1/(e^{2 eta} - 1)`, in which every polynomial
//! coefficient is positive, and the `sinh^p` / `e^{-n eta}` prefactors are
//! combined in log space so that no intermediate overflows for large `chi`.

use std::f64::consts::LN_2;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::legendre::{neg_order_sum, positive_order_poly, LegendreArg};
use crate::scalar::{digamma_diff, eta_from_chi, factorial, neumann, to_f64, Rational};
use crate::series::{FourierCoeffTable, Kernel, Method};

/// `ln sinh(eta)`, accurate for small and large `eta`.
pub(crate) fn ln_sinh(eta: f64) -> f64 {
    eta + (-(-2.0 * eta).exp_m1()).ln() - LN_2
}

fn parity(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `sinh^a(eta) P_j^m(coth eta)` for `0 <= m <= j`.
fn sinh_pow_times_p(a: usize, j: usize, m: usize, arg: &LegendreArg) -> f64 {
    let scale = (a as f64 - m as f64) * ln_sinh(arg.eta()) - m as f64 * LN_2;
    scale.exp() * positive_order_poly(j, m, arg.w())
}

/// `p!/(p+n)!` as a float.
fn falling_ratio(p: usize, n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc / (p + i) as f64)
}

/// Coefficient `eps_n (-1)^n p!/(p+n)! sinh^p(eta) P_p^n(coth eta)` of
/// `cos(n psi)` in `(cosh eta - cos psi)^p`; zero for `n > p`.
pub(crate) fn power_coeff(p: usize, n: usize, arg: &LegendreArg) -> f64 {
    if n > p {
        return 0.0;
    }
    neumann(n) * parity(n) * falling_ratio(p, n) * sinh_pow_times_p(p, p, n, arg)
}

/// Fourier coefficients of `(chi - cos psi)^p`, `n = 0..=p`.
pub fn power_series(p: usize, chi: f64) -> Result<FourierCoeffTable> {
    let arg = LegendreArg::from_chi(chi)?;
    let coeffs = (0..=p).map(|n| power_coeff(p, n, &arg)).collect();
    Ok(FourierCoeffTable::new(
        Kernel::Power,
        p,
        chi,
        arg.eta(),
        Method::ClosedForm,
        coeffs,
    ))
}

/// Coefficient of `cos(n psi)` in `(cosh eta - cos psi)^{-q}`:
/// `eps_n sinh^{-q} C(n+q-1, n) e^{-n eta} m! e^{m eta} P_{q-1}^{-n}` with `m = n`.
pub(crate) fn inverse_power_coeff(q: usize, n: usize, arg: &LegendreArg) -> f64 {
    let eta = arg.eta();
    let ln_binom: f64 = (1..q).map(|i| ((n + i) as f64 / i as f64).ln()).sum();
    let scale = -(q as f64) * ln_sinh(eta) - n as f64 * eta + ln_binom;
    neumann(n) * scale.exp() * neg_order_sum(q - 1, n, arg.w())
}

/// Fourier coefficients of `(chi - cos psi)^{-q}`, `n = 0..=nmax`.
pub fn inverse_power_series(q: usize, chi: f64, nmax: usize) -> Result<FourierCoeffTable> {
    if q == 0 {
        return Err(Error::Domain("inverse power series needs q >= 1".into()));
    }
    let arg = LegendreArg::from_chi(chi)?;
    let coeffs = (0..=nmax).map(|n| inverse_power_coeff(q, n, &arg)).collect();
    Ok(FourierCoeffTable::new(
        Kernel::InversePower,
        q,
        chi,
        arg.eta(),
        Method::ClosedForm,
        coeffs,
    ))
}

/// Tail coefficient of the log series, `n >= p + 1`:
/// `2 (-1)^{p+1} p! (n-p-1)! sinh^p(eta) P_p^{-n}(coth eta)`.
pub(crate) fn tail_coeff(p: usize, n: usize, arg: &LegendreArg) -> f64 {
    scaled_tail(p, n, arg, -(n as f64) * arg.eta())
}

/// `(-1)^{p+1} p! (n-p-1)! e^{n eta} sinh^p(eta) P_p^{-n}(coth eta)`: the
/// tail coefficient with its `2 e^{-n eta}` factor removed.
pub(crate) fn tail_identity_rhs(p: usize, n: usize, arg: &LegendreArg) -> f64 {
    0.5 * scaled_tail(p, n, arg, 0.0)
}

fn scaled_tail(p: usize, n: usize, arg: &LegendreArg, ln_extra: f64) -> f64 {
    debug_assert!(n > p);
    // p! (n-p-1)! / n! = (1/n) prod_{i=1}^{p} i/(n-i)
    let ratio = (1..=p).fold(1.0 / n as f64, |acc, i| acc * i as f64 / (n - i) as f64);
    let scale = p as f64 * ln_sinh(arg.eta()) + ln_extra;
    -2.0 * parity(p) * ratio * scale.exp() * neg_order_sum(p, n, arg.w())
}

/// Band coefficient of the log series, `0 <= n <= p`, without the
/// `(eta - log 2)` power part.
pub(crate) fn band_coeff(p: usize, n: usize, arg: &LegendreArg) -> f64 {
    let pu = p as u64;
    let nu = n as u64;
    let eta = arg.eta();

    // digamma-weighted P_p^n term
    let digamma = digamma_diff(2 * pu + 1, pu + 1 + nu).unwrap() + digamma_diff(2 * pu + 1, pu + 1 - nu).unwrap();
    let mut value = to_f64(&digamma) * power_coeff(p, n, arg);

    // P_{n+k}^n sum, 0 <= n <= p-1
    if n < p {
        let fact_pn = factorial(pu + nu);
        let fact_p_minus_n = factorial(pu - nu);
        let mut sum = 0.0;
        for k in 0..(p - n) {
            let ku = k as u64;
            let bracket =
                Rational::one() + Rational::new(factorial(ku) * &fact_pn, factorial(ku + 2 * nu) * &fact_p_minus_n);
            let weight = bracket * Rational::from_integer(BigInt::from(2 * n + 2 * k + 1))
                / Rational::from_integer(BigInt::from((p - n - k) * (p + n + k + 1)));
            sum += parity(k) * to_f64(&weight) * sinh_pow_times_p(p, n + k, n, arg);
        }
        value += parity(p) * neumann(n) * falling_ratio(p, n) * sum;
    }

    // P_k^{-n} sum, 1 <= n <= p
    if n >= 1 {
        let mut sum = 0.0;
        for k in 0..n {
            let weight = (2 * k + 1) as f64 / ((p - k) * (p + k + 1)) as f64;
            sum += parity(k) * weight * neg_order_sum(k, n, arg.w());
        }
        // p!/((p-n)! n!) folds the 1/n! of P_k^{-n}
        let binom = to_f64(&Rational::new(factorial(pu), factorial(pu - nu) * factorial(nu)));
        let scale = (p as f64 * ln_sinh(eta) - n as f64 * eta).exp();
        value += 2.0 * parity(p + n) * binom * scale * sum;
    }
    value
}

/// Log-series coefficient `c_n` by the parameter-derivative route.
pub(crate) fn log_coeff_limit(p: usize, n: usize, arg: &LegendreArg) -> f64 {
    if n > p {
        tail_coeff(p, n, arg)
    } else {
        (arg.eta() - LN_2) * power_coeff(p, n, arg) + band_coeff(p, n, arg)
    }
}

/// Fourier coefficients of `(chi - cos psi)^p log(chi - cos psi)`,
/// `n = 0..=nmax`, by differentiating the power series in its exponent.
pub fn log_series_limit(p: usize, chi: f64, nmax: usize) -> Result<FourierCoeffTable> {
    if nmax < p + 1 {
        return Err(Error::IndexRange(format!(
            "need nmax >= p + 1, got nmax = {nmax}, p = {p}"
        )));
    }
    let eta = eta_from_chi(chi)?;
    let arg = LegendreArg::from_eta(eta)?;
    let coeffs = (0..=nmax).map(|n| log_coeff_limit(p, n, &arg)).collect();
    Ok(FourierCoeffTable::new(Kernel::Log, p, chi, eta, Method::Limit, coeffs))
}

/// The axisymmetric Legendre sum
/// `(-1)^p sum_{k=0}^{p-1} (-1)^k (2k+1)/((p-k)(p+k+1)) sinh^p P_k(coth eta)`.
pub(crate) fn axisymmetric_legendre_sum(p: usize, arg: &LegendreArg) -> f64 {
    let mut sum = 0.0;
    for k in 0..p {
        let weight = (2 * k + 1) as f64 / ((p - k) * (p + k + 1)) as f64;
        sum += parity(k) * weight * sinh_pow_times_p(p, k, 0, arg);
    }
    parity(p) * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn power_series_low_orders() {
        let t = power_series(0, 3.0).unwrap();
        assert_eq!(t.coeffs, vec![1.0]);
        for &chi in &[1.05, 2.0, 1e6] {
            let t = power_series(1, chi).unwrap();
            assert!(rel(t.coeffs[0], chi) < 1e-14);
            assert!(rel(t.coeffs[1], -1.0) < 1e-14);
            let t = power_series(2, chi).unwrap();
            assert!(rel(t.coeffs[0], chi * chi + 0.5) < 1e-14);
            assert!(rel(t.coeffs[1], -2.0 * chi) < 1e-14);
            assert!(rel(t.coeffs[2], 0.5) < 1e-13);
        }
    }

    #[test]
    fn inverse_power_low_orders() {
        for &chi in &[1.1, 2.0, 50.0] {
            let eta = eta_from_chi(chi).unwrap();
            let (s, c) = (eta.sinh(), eta.cosh());
            let t1 = inverse_power_series(1, chi, 20).unwrap();
            let t2 = inverse_power_series(2, chi, 20).unwrap();
            let t3 = inverse_power_series(3, chi, 20).unwrap();
            for n in 0..=20 {
                let nf = n as f64;
                let e = neumann(n) * (-nf * eta).exp();
                assert!(rel(t1.coeffs[n], e / s) < 1e-13);
                assert!(rel(t2.coeffs[n], e * (c + nf * s) / s.powi(3)) < 1e-13);
                let q3 = e * ((nf * nf - 1.0) * s * s + 3.0 * nf * s * c + 3.0 * c * c) / (2.0 * s.powi(5));
                assert!(rel(t3.coeffs[n], q3) < 1e-12, "chi={chi} n={n}");
            }
        }
        assert!(inverse_power_series(0, 2.0, 5).is_err());
    }

    #[test]
    fn limit_route_p0_and_p1() {
        for &chi in &[1.05, 2.0, 100.0] {
            let eta = eta_from_chi(chi).unwrap();
            let t = log_series_limit(0, chi, 10).unwrap();
            assert_eq!(t.coeffs[0], eta - LN_2);
            for n in 1..=10 {
                assert!(rel(t.coeffs[n], -2.0 * (-(n as f64) * eta).exp() / n as f64) < 1e-14);
            }
            let t = log_series_limit(1, chi, 10).unwrap();
            let expected = (1.0 + eta - LN_2) * eta.cosh() - eta.sinh();
            assert!(rel(t.coeffs[0], expected) < 1e-12);
            assert!(rel(t.coeffs[1], LN_2 - 1.0 - eta - 0.5 * (-2.0 * eta).exp()) < 1e-12);
        }
    }

    #[test]
    fn ln_sinh_extremes() {
        assert!(rel(ln_sinh(1e-8), (1e-8f64).ln()) < 1e-12);
        assert!(rel(ln_sinh(1.0), 1.0f64.sinh().ln()) < 1e-15);
        assert!(rel(ln_sinh(800.0), 800.0 - LN_2) < 1e-15);
    }
}
