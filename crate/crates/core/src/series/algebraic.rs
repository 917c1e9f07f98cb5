//! Algebraic route to the Fourier series of
//! `(cosh eta - cos psi)^p log(cosh eta - cos psi)`.
//!
//! Every coefficient is a finite combination
//! `sum_i c_i e^{a_i eta} R_p^{k_i}(cosh eta)` with exact rational `c_i`.
//! The combinations cancel heavily (by roughly `n^{2p}` in the tail), so they
//! are evaluated in multiprecision at a working precision that is raised
//! until enough bits survive, and rounded to `f64` once.

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hp::{self, Accumulator, Mp};
use crate::legendre::LegendreArg;
use crate::logpoly::logpoly_row;
use crate::scalar::{eta_from_chi, factorial, Rational};
use crate::series::limit::power_coeff;
use crate::series::{FourierCoeffTable, Kernel, Method};

/// One term `coeff * e^{exp * eta} * R_p^k(cosh eta)`.
#[derive(Debug, Clone)]
pub(crate) struct Term {
    pub k: i64,
    pub exp: i64,
    pub coeff: Rational,
}

/// `R_p^k(cosh eta)` and powers of `e^eta` at one working precision.
struct Combiner {
    mp: Mp,
    t: BigFloat,
    t_inv: BigFloat,
    r_vals: Vec<BigFloat>,
}

impl Combiner {
    fn new(p: usize, eta: f64, prec: usize) -> Self {
        let mut mp = Mp::new(prec);
        let t = mp.exp(&mp.f(eta));
        let t_inv = mp.div(&mp.int(1), &t);
        let x = mp.div_int(&mp.add(&t, &t_inv), 2);
        let r_vals = logpoly_row(p)
            .into_iter()
            .skip(p) // k = 0..=p; R_p^k is even in k
            .map(|poly| mp.poly(poly.coeffs(), &x))
            .collect();
        Combiner { mp, t, t_inv, r_vals }
    }

    fn exp_pow(&self, e: i64) -> BigFloat {
        if e >= 0 {
            self.mp.powi(&self.t, e as usize)
        } else {
            self.mp.powi(&self.t_inv, e.unsigned_abs() as usize)
        }
    }

    fn eval(&self, terms: &[Term]) -> (BigFloat, usize) {
        let mut acc = Accumulator::new(&self.mp);
        for term in terms {
            if term.coeff.is_zero() {
                continue;
            }
            let r = &self.r_vals[term.k.unsigned_abs() as usize];
            let v = self
                .mp
                .mul(&self.mp.mul(r, &self.exp_pow(term.exp)), &self.mp.rational(&term.coeff));
            acc.push(&self.mp, &v);
        }
        let lost = acc.lost_bits();
        (acc.into_value(), lost)
    }
}

/// Evaluates several combinations for one `(p, eta)`, raising the working
/// precision only for the combinations that need it.
pub(crate) fn evaluate_many(p: usize, eta: f64, combos: &[Vec<Term>]) -> Vec<f64> {
    let mut out = vec![f64::NAN; combos.len()];
    let mut pending: Vec<usize> = (0..combos.len()).collect();
    let mut prec = hp::BASE_PRECISION;
    while !pending.is_empty() {
        let combiner = Combiner::new(p, eta, prec);
        let mut retry = Vec::new();
        let mut needed = prec;
        for &i in &pending {
            let (v, lost) = combiner.eval(&combos[i]);
            let exact_zero = lost == usize::MAX;
            if exact_zero && prec >= 4096 {
                out[i] = 0.0;
            } else if !exact_zero && (lost + hp::GUARD_BITS <= prec || prec >= 1 << 15) {
                out[i] = hp::to_f64(&v);
            } else {
                retry.push(i);
                needed = needed.max(if exact_zero {
                    2 * prec
                } else {
                    lost + hp::GUARD_BITS + 64
                });
            }
        }
        pending = retry;
        prec = needed.max(prec + 64);
    }
    out
}

pub(crate) fn evaluate(p: usize, eta: f64, terms: Vec<Term>) -> f64 {
    evaluate_many(p, eta, &[terms])[0]
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Domain(format!("eta must be positive, got {eta}")));
    }
    Ok(())
}

fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Terms of `scale * e^{shift eta} * r_{n,p}^{k1,k2}`, where
/// `r_{n,p}^{k1,k2} = 2 sum_{k=k1}^{k2} (-1)^{k+1} e^{k eta} R_p^k / (n - k)`.
fn r_frak_terms(n: i64, k1: i64, k2: i64, shift: i64, scale: &Rational) -> Vec<Term> {
    (k1..=k2)
        .map(|k| Term {
            k,
            exp: k + shift,
            coeff: scale * Rational::new(BigInt::from(-2 * sign(k)), BigInt::from(n - k)),
        })
        .collect()
}

fn check_r_frak(n: i64, p: usize, k1: i64, k2: i64) -> Result<()> {
    let pi = p as i64;
    if !(-pi <= k1 && k1 <= k2 && k2 <= pi) {
        return Err(Error::IndexRange(format!(
            "r_frak needs -p <= k1 <= k2 <= p, got p = {p}, k1 = {k1}, k2 = {k2}"
        )));
    }
    if (k1..=k2).contains(&n) {
        return Err(Error::VanishingDenominator { n, k: n });
    }
    Ok(())
}

/// `r_{n,p}^{k1,k2}(cosh eta) = 2 sum_{k=k1}^{k2} (-1)^{k+1} e^{k eta} R_p^k(cosh eta) / (n - k)`.
pub fn r_frak(n: i64, p: usize, k1: i64, k2: i64, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    check_r_frak(n, p, k1, k2)?;
    Ok(evaluate(p, eta, r_frak_terms(n, k1, k2, 0, &Rational::one())))
}

/// `(n+p)!/(n-p-1)!`, i.e. `n prod_{j=1}^{p} (n^2 - j^2)`.
fn tail_ratio(n: usize, p: usize) -> BigInt {
    factorial((n + p) as u64) / factorial((n - p - 1) as u64)
}

/// `Re_{n,p}(cosh eta) = (n+p)!/(n-p-1)! r_{n,p}^{-p,p}(cosh eta)` for `n >= p + 1`.
pub fn re_frak(n: usize, p: usize, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    if n < p + 1 {
        return Err(Error::IndexRange(format!(
            "Re_{{n,p}} needs n >= p + 1, got n = {n}, p = {p}"
        )));
    }
    let pi = p as i64;
    let scale = Rational::from_integer(tail_ratio(n, p));
    Ok(evaluate(p, eta, r_frak_terms(n as i64, -pi, pi, 0, &scale)))
}

/// Terms of the piecewise coefficient `P_{n,p}(cosh eta)`.
pub(crate) fn p_frak_terms(n: usize, p: usize) -> Vec<Term> {
    let pi = p as i64;
    let ni = n as i64;
    let one = Rational::one();
    if n == 0 {
        if p == 0 {
            return Vec::new();
        }
        return r_frak_terms(0, -pi, -1, 0, &one);
    }
    if n < p {
        // D_{n,p} vanishes for p in {0, 1}; E_{n,p} vanishes for p = 0
        let mut terms = Vec::new();
        if p >= 2 {
            terms.extend(r_frak_terms(-ni, -pi, -ni - 1, ni, &one));
        }
        if p >= 1 {
            terms.extend(r_frak_terms(ni, -pi, ni - 1, -ni, &one));
        }
        return terms;
    }
    if n == p {
        return r_frak_terms(pi, -pi, pi - 1, -pi, &one);
    }
    // e^{-n eta} Re_{n,p} / (n (n^2-1) ... (n^2-p^2))
    let denom = (1..=p).fold(BigInt::from(n), |acc, j| acc * BigInt::from(n * n - j * j));
    let scale = Rational::new(tail_ratio(n, p), denom);
    r_frak_terms(ni, -pi, pi, -ni, &scale)
}

/// The piecewise coefficient `P_{n,p}(cosh eta)`: the `cos(n psi)`
/// coefficient of the log kernel with the `(eta - log 2)` power part removed.
pub fn p_frak(n: usize, p: usize, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok(evaluate(p, eta, p_frak_terms(n, p)))
}

/// `Q_{n,p} = P_{n,p} + eps_n (-p)_n (p-n)!/(p+n)! (eta - log 2) sinh^p(eta) P_p^n(coth eta)`.
pub fn q_frak(n: usize, p: usize, eta: f64) -> Result<f64> {
    let arg = LegendreArg::from_eta(eta)?;
    let base = p_frak(n, p, eta)?;
    Ok(base + (eta - std::f64::consts::LN_2) * power_coeff(p, n, &arg))
}

/// Fourier coefficients `c_n = Q_{n,p}(cosh eta)`, `n = 0..=nmax`, of
/// `(chi - cos psi)^p log(chi - cos psi)` by the algebraic route.
pub fn log_series_algebraic(p: usize, chi: f64, nmax: usize) -> Result<FourierCoeffTable> {
    if nmax < p + 1 {
        return Err(Error::IndexRange(format!(
            "need nmax >= p + 1, got nmax = {nmax}, p = {p}"
        )));
    }
    let eta = eta_from_chi(chi)?;
    let arg = LegendreArg::from_eta(eta)?;
    let combos: Vec<Vec<Term>> = (0..=nmax).map(|n| p_frak_terms(n, p)).collect();
    let bases = evaluate_many(p, eta, &combos);
    let shift = eta - std::f64::consts::LN_2;
    let coeffs = bases
        .into_iter()
        .enumerate()
        .map(|(n, b)| b + shift * power_coeff(p, n, &arg))
        .collect();
    Ok(FourierCoeffTable::new(
        Kernel::Log,
        p,
        chi,
        eta,
        Method::Algebraic,
        coeffs,
    ))
}

/// `sum_{k=1}^{p} (-1)^{k+1} e^{-k eta} R_p^k(cosh eta) / k`, the logarithmic
/// polynomial side of the axisymmetric (`n = 0`) coefficient.
pub fn axisymmetric_logpoly_sum(p: usize, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    let terms = (1..=p as i64)
        .map(|k| Term {
            k,
            exp: -k,
            coeff: Rational::new(BigInt::from(-sign(k)), BigInt::from(k)),
        })
        .collect();
    Ok(evaluate(p, eta, terms))
}

/// Left side of the middle-band identity (`1 <= n <= p-1`):
/// `sum_{k=-p}^{n-1} (-1)^{k+1} e^{k eta} R_p^k/(n-k) + e^{2n eta} sum_{k=-p}^{-n-1} (-1)^k e^{k eta} R_p^k/(n+k)`.
pub(crate) fn middle_band_sum(n: usize, p: usize, eta: f64) -> f64 {
    let pi = p as i64;
    let ni = n as i64;
    let mut terms: Vec<Term> = (-pi..ni)
        .map(|k| Term {
            k,
            exp: k,
            coeff: Rational::new(BigInt::from(-sign(k)), BigInt::from(ni - k)),
        })
        .collect();
    terms.extend((-pi..=(-ni - 1)).map(|k| Term {
        k,
        exp: k + 2 * ni,
        coeff: Rational::new(BigInt::from(sign(k)), BigInt::from(ni + k)),
    }));
    evaluate(p, eta, terms)
}

/// `sum_{k=k1}^{k2} (-1)^{k+1} e^{k eta} R_p^k / (n - k)`, half of `r_frak`.
pub(crate) fn half_r_frak(n: i64, p: usize, k1: i64, k2: i64, eta: f64) -> f64 {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    evaluate(p, eta, r_frak_terms(n, k1, k2, 0, &half))
}
