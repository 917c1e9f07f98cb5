//! Associated Legendre functions of the first kind `P_p^m(z)` for real
//! `z > 1`, integer degree and integer order, and their derivative with
//! respect to the degree at integer degree.
//!
//! Both orders are evaluated in the variable `w = (z - 1)/2`, in which the
//! terminating hypergeometric sums have only positive terms:
//!
//! ```text
//! P_p^m(z)  = (w(w+1))^{m/2} sum_{j=m}^{p} C(p+j,j) C(p,j) j!/(j-m)! w^{j-m}   (0 <= m <= p)
//! P_p^-m(z) = ((w/(w+1))^{m/2} / m!) sum_{j=0}^{p} (p+j)!/((p-j)! j! (m+1)_j) w^j (m >= 0)
//! ```
//!
//! With `z = coth(eta)` one has `w/(w+1) = e^{-2 eta}` and
//! `w(w+1) = 1/(4 sinh^2 eta)`, which is how the prefactors are formed.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::{digamma_diff, eta_from_chi, factorial, harmonic, to_f64, Rational};

/// A Legendre argument `z > 1` together with the auxiliary variables used to
/// evaluate prefactors without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendreArg {
    z: f64,
    eta: f64,
    w: f64,
    chi: Option<f64>,
}

impl LegendreArg {
    pub fn from_z(z: f64) -> Result<Self> {
        if !(z > 1.0) || !z.is_finite() {
            return Err(Error::Domain(format!("Legendre argument must exceed 1, got {z}")));
        }
        let w = (z - 1.0) / 2.0;
        Ok(LegendreArg {
            z,
            eta: 0.5 * (1.0 / w).ln_1p(),
            w,
            chi: None,
        })
    }

    /// `z = coth(eta)`.
    pub fn from_eta(eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::Domain(format!("eta must be positive, got {eta}")));
        }
        let w = 1.0 / (2.0 * eta).exp_m1();
        Ok(LegendreArg {
            z: 1.0 + 2.0 * w,
            eta,
            w,
            chi: None,
        })
    }

    /// `z = chi / sqrt(chi^2 - 1) = coth(eta)` with `chi = cosh(eta)`.
    pub fn from_chi(chi: f64) -> Result<Self> {
        let eta = eta_from_chi(chi)?;
        let mut arg = Self::from_eta(eta)?;
        arg.chi = Some(chi);
        Ok(arg)
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn chi(&self) -> Option<f64> {
        self.chi
    }

    /// `(z - 1)/2`.
    pub fn w(&self) -> f64 {
        self.w
    }

    /// `log((z+1)/2) = log1p(w)`.
    pub fn log_half_z_plus_one(&self) -> f64 {
        self.w.ln_1p()
    }
}

type CoeffTable = RwLock<HashMap<(usize, usize), Arc<Vec<f64>>>>;

fn coeff_table() -> &'static CoeffTable {
    static TABLE: OnceLock<CoeffTable> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Exact coefficients of the Legendre polynomial `P_p` in powers of
/// `w = (z-1)/2`: `P_p = sum_j C(p+j, j) C(p, j) w^j`.
pub fn legendre_poly_w(p: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(p + 1);
    let mut c = BigInt::one();
    out.push(c.clone());
    for j in 0..p {
        // C(p+j+1, j+1) C(p, j+1) from C(p+j, j) C(p, j)
        c = c * BigInt::from((p + j + 1) * (p - j)) / BigInt::from((j + 1) * (j + 1));
        out.push(c.clone());
    }
    out
}

/// Coefficients of `d^m P_p / dz^m` scaled by `2^m`, in powers of `w`,
/// memoized; concurrent first writers insert identical values.
fn derivative_coeffs(p: usize, m: usize) -> Arc<Vec<f64>> {
    if let Some(c) = coeff_table().read().expect("poisoned").get(&(p, m)) {
        return c.clone();
    }
    let poly = legendre_poly_w(p);
    let coeffs: Vec<f64> = (m..=p)
        .map(|j| {
            let falling: BigInt = ((j - m + 1)..=j).fold(BigInt::one(), |acc, i| acc * i);
            let exact = Rational::from_integer(&poly[j] * falling);
            to_f64(&exact)
        })
        .collect();
    let coeffs = Arc::new(coeffs);
    coeff_table()
        .write()
        .expect("poisoned")
        .entry((p, m))
        .or_insert(coeffs)
        .clone()
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `P_p^m(z) / (w (w+1))^{m/2}` for `0 <= m <= p`: the polynomial part of the
/// positive-order function, with `(w (w+1))^{1/2} = 1 / (2 sinh eta)`.
pub(crate) fn positive_order_poly(p: usize, m: usize, w: f64) -> f64 {
    horner(&derivative_coeffs(p, m), w)
}

/// `ln m!` by direct summation.
pub(crate) fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|i| (i as f64).ln()).sum()
}

/// `m! e^{m eta} P_p^{-m}(z)`: the bare hypergeometric sum of the
/// negative-order function, free of the exponentially small prefactor.
pub(crate) fn neg_order_sum(p: usize, m: usize, w: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 0..p {
        term *= ((p - j) * (p + j + 1)) as f64 / ((j + 1) * (m + j + 1)) as f64 * w;
        sum += term;
    }
    sum
}

/// `P_p^m(z)` for integer order of either sign, evaluated at a prepared
/// argument. Exactly zero for `m >= p + 1`.
pub fn legendre_p_arg(p: usize, m: i64, arg: &LegendreArg) -> f64 {
    if m >= 0 {
        let m = m as usize;
        if m > p {
            return 0.0;
        }
        let poly = horner(&derivative_coeffs(p, m), arg.w);
        if m == 0 {
            return poly;
        }
        let w = arg.w;
        let prefactor = (0.5 * m as f64 * (w.ln() + w.ln_1p())).exp();
        prefactor * poly
    } else {
        let m = m.unsigned_abs() as usize;
        let prefactor = (-(m as f64) * arg.eta - ln_factorial(m)).exp();
        prefactor * neg_order_sum(p, m, arg.w)
    }
}

/// Associated Legendre function of the first kind `P_p^m(z)`, `z > 1`.
pub fn legendre_p(p: usize, m: i64, z: f64) -> Result<f64> {
    let arg = LegendreArg::from_z(z)?;
    Ok(legendre_p_arg(p, m, &arg))
}

/// Maximum number of Gauss-series terms before `legendre_p_nu` gives up.
pub const MAX_SERIES_TERMS: usize = 1_000_000;

/// `P_nu^m(z)` for real degree and non-positive order by the Gauss series
/// `((z+1)/(z-1))^{m/2} / Gamma(1-m) * 2F1(-nu, nu+1; 1-m; (1-z)/2)`.
///
/// Restricted to `1 < z < 3`, where the series converges; intended as a
/// finite-difference oracle for the degree derivative.
pub fn legendre_p_nu(nu: f64, m: i64, z: f64) -> Result<f64> {
    if m > 0 {
        return Err(Error::Domain(format!(
            "legendre_p_nu supports non-positive order only, got m = {m}"
        )));
    }
    if !(z > 1.0 && z < 3.0) {
        return Err(Error::Domain(format!("legendre_p_nu needs 1 < z < 3, got {z}")));
    }
    let mm = m.unsigned_abs() as f64;
    let x = (1.0 - z) / 2.0;
    let c = 1.0 + mm;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut converged = false;
    for j in 0..MAX_SERIES_TERMS {
        let jf = j as f64;
        term *= (jf - nu) * (jf + nu + 1.0) / ((jf + 1.0) * (c + jf)) * x;
        sum += term;
        if term == 0.0 {
            converged = true;
            break;
        }
        // every later ratio is bounded by |x| in magnitude
        let tail = term.abs() * x.abs() / (1.0 - x.abs());
        if tail <= 1e-17 * sum.abs() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: format!("Gauss series for P_{nu}^{m}({z})"),
            iterations: MAX_SERIES_TERMS,
        });
    }
    // ((z+1)/(z-1))^{m/2} / (-m)!
    let prefactor = (0.5 * -mm * ((z + 1.0) / (z - 1.0)).ln() - ln_factorial(mm as usize)).exp();
    Ok(prefactor * sum)
}

fn rational_f64(num: &BigInt, den: &BigInt) -> f64 {
    to_f64(&Rational::new(num.clone(), den.clone()))
}

/// Degree derivative `[d P_nu^m(z) / d nu]_{nu = p}` at integer degree `p`
/// and non-negative integer order `m`.
pub fn legendre_deg_deriv(p: usize, m: usize, z: f64) -> Result<f64> {
    let arg = LegendreArg::from_z(z)?;
    Ok(deg_deriv_arg(p, m, &arg))
}

pub fn deg_deriv_arg(p: usize, m: usize, arg: &LegendreArg) -> f64 {
    if m > p {
        // (-1)^{p+m+1} (p+m)! (m-p-1)! P_p^{-m}(z)
        let sign = if (p + m + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        // (p+m)!(m-p-1)!/m! folded into the bare negative-order sum
        let ratio = rational_f64(
            &(factorial((p + m) as u64) * factorial((m - p - 1) as u64)),
            &factorial(m as u64),
        );
        let scale = (-(m as f64) * arg.eta).exp();
        return sign * ratio * scale * neg_order_sum(p, m, arg.w);
    }
    let pm = legendre_p_arg(p, m as i64, arg);
    let pu = p as u64;
    let mu = m as u64;
    let digamma = digamma_diff(2 * pu + 1, pu + 1).unwrap() + digamma_diff(2 * pu + 1, pu - mu + 1).unwrap();
    let mut value = pm * arg.log_half_z_plus_one() + to_f64(&digamma) * pm;

    let fact_pm = factorial(pu + mu);
    let fact_p_minus_m = factorial(pu - mu);
    let mut first = 0.0;
    for k in 0..(p - m) {
        let ku = k as u64;
        let bracket =
            Rational::one() + Rational::new(factorial(ku) * &fact_pm, factorial(ku + 2 * mu) * &fact_p_minus_m);
        let weight = bracket * Rational::from_integer(BigInt::from(2 * k + 2 * m + 1))
            / Rational::from_integer(BigInt::from((p - m - k) * (p + m + k + 1)));
        let term = to_f64(&weight) * legendre_p_arg(k + m, m as i64, arg);
        first += if k % 2 == 0 { term } else { -term };
    }
    if (p + m) % 2 == 1 {
        first = -first;
    }
    value += first;

    let mut second = 0.0;
    for k in 0..m {
        let weight = (2 * k + 1) as f64 / ((p - k) * (p + k + 1)) as f64;
        let term = weight * legendre_p_arg(k, -(m as i64), arg);
        second += if k % 2 == 0 { term } else { -term };
    }
    let ratio = rational_f64(&fact_pm, &fact_p_minus_m);
    if p % 2 == 1 {
        second = -second;
    }
    value + ratio * second
}

/// Euler's constant to 30 digits.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

/// Closed forms of the degree derivative in the special orders `m = 0`,
/// `m = p` and `m = p = 0`, kept separate from the general formula so the
/// two can be checked against each other.
pub mod special {
    use super::*;

    fn alternating_legendre_sum(p: usize, order: i64, arg: &LegendreArg) -> f64 {
        let mut sum = 0.0;
        for k in 0..p {
            let weight = (2 * k + 1) as f64 / ((p - k) * (p + k + 1)) as f64;
            let term = weight * legendre_p_arg(k, order, arg);
            sum += if k % 2 == 0 { term } else { -term };
        }
        if p % 2 == 1 {
            -sum
        } else {
            sum
        }
    }

    /// `m = 0`: `P_p log((z+1)/2) + 2[psi(2p+1) - psi(p+1)] P_p + 2(-1)^p sum ...`.
    pub fn deg_deriv_order_zero(p: usize, arg: &LegendreArg) -> f64 {
        let pp = legendre_p_arg(p, 0, arg);
        let dg = to_f64(&digamma_diff(2 * p as u64 + 1, p as u64 + 1).unwrap());
        pp * arg.log_half_z_plus_one() + 2.0 * dg * pp + 2.0 * alternating_legendre_sum(p, 0, arg)
    }

    /// `psi(n) = H_{n-1} - gamma` at a positive integer.
    pub fn digamma_int(n: u64) -> f64 {
        to_f64(&harmonic(n - 1)) - EULER_GAMMA
    }

    /// `m = p`: uses Euler's constant explicitly through `psi(1) = -gamma`.
    pub fn deg_deriv_order_equal(p: usize, arg: &LegendreArg) -> f64 {
        let pp = legendre_p_arg(p, p as i64, arg);
        let pu = p as u64;
        let bracket = 2.0 * digamma_int(2 * pu + 1) - digamma_int(pu + 1) + EULER_GAMMA;
        let fact_2p = to_f64(&Rational::from_integer(factorial(2 * pu)));
        pp * arg.log_half_z_plus_one() + bracket * pp + fact_2p * alternating_legendre_sum(p, -(p as i64), arg)
    }

    /// `m = p = 0`: `log((z+1)/2)`.
    pub fn deg_deriv_degree_zero(arg: &LegendreArg) -> f64 {
        arg.log_half_z_plus_one()
    }
}
