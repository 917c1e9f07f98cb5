//! The logarithmic polynomials `R_p^k(x)`, `|k| <= p`, in exact rational
//! arithmetic.
//!
//! They are defined by `R_0^0 = 1` and
//! `R_p^k = R_{p-1}^{k-1}/2 + x R_{p-1}^k + R_{p-1}^{k+1}/2`, equivalently as
//! the `y^k` coefficients of `(x + (y + 1/y)/2)^p`. Three generators are
//! provided: the recurrence (production path, memoized), the diagonal
//! difference system, and multinomial extraction from the generating
//! function (reference path).

use std::fmt::Write as _;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{factorial, to_f64, Rational};

/// `R_p^k` with its coefficients in the monomial basis: `coeffs[i]`
/// multiplies `x^i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogPolynomial {
    p: usize,
    k: i64,
    coeffs: Vec<Rational>,
}

/// One monomial of a [`LogPolynomial`] as it is emitted in tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonomialRow {
    pub p: usize,
    pub k: i64,
    pub degree: usize,
    pub numerator: String,
    pub denominator: String,
}

fn check_index(p: usize, k: i64) -> Result<()> {
    if k.unsigned_abs() as usize > p {
        return Err(Error::IndexRange(format!(
            "R_p^k is only defined for |k| <= p, got p = {p}, k = {k}"
        )));
    }
    Ok(())
}

fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

impl LogPolynomial {
    fn new(p: usize, k: i64, coeffs: Vec<Rational>) -> Self {
        LogPolynomial {
            p,
            k,
            coeffs: trim(coeffs),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &Rational {
        self.coeffs.last().expect("non-empty")
    }

    /// Horner evaluation in floating point.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    /// Exact derivative coefficients.
    pub fn derivative(&self) -> Vec<Rational> {
        if self.coeffs.len() == 1 {
            return vec![Rational::zero()];
        }
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
            .collect()
    }

    pub fn monomials(&self) -> Vec<MonomialRow> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| MonomialRow {
                p: self.p,
                k: self.k,
                degree: i,
                numerator: c.numer().to_string(),
                denominator: c.denom().to_string(),
            })
            .collect()
    }

    pub fn to_latex(&self) -> String {
        let mut out = format!("R_{{{}}}^{{{}}}(x) = ", self.p, self.k);
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if !first {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            first = false;
            let a = c.abs();
            let unit = a.is_one();
            if !(unit && i > 0) {
                if a.denom().is_one() {
                    let _ = write!(out, "{}", a.numer());
                } else {
                    let _ = write!(out, "\\frac{{{}}}{{{}}}", a.numer(), a.denom());
                }
            }
            match i {
                0 => {}
                1 => out.push('x'),
                _ => {
                    let _ = write!(out, "x^{{{i}}}");
                }
            }
        }
        if first {
            out.push('0');
        }
        out
    }
}

fn add_into(acc: &mut Vec<Rational>, other: &[Rational], scale: &Rational, shift: usize) {
    if acc.len() < other.len() + shift {
        acc.resize(other.len() + shift, Rational::zero());
    }
    for (i, c) in other.iter().enumerate() {
        acc[i + shift] += c * scale;
    }
}

fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

/// Rows of the recurrence table: `rows[p][|k|]`.
type Rows = RwLock<Vec<Arc<Vec<Vec<Rational>>>>>;

fn rows() -> &'static Rows {
    static ROWS: OnceLock<Rows> = OnceLock::new();
    ROWS.get_or_init(|| RwLock::new(vec![Arc::new(vec![vec![Rational::one()]])]))
}

fn next_row(prev: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let p = prev.len(); // new row index
    let h = half();
    let one = Rational::one();
    let get = |k: i64| -> Option<&Vec<Rational>> {
        let a = k.unsigned_abs() as usize;
        prev.get(a)
    };
    (0..=p as i64)
        .map(|k| {
            let mut acc = vec![Rational::zero()];
            if let Some(r) = get(k - 1) {
                add_into(&mut acc, r, &h, 0);
            }
            if let Some(r) = get(k) {
                add_into(&mut acc, r, &one, 1);
            }
            if let Some(r) = get(k + 1) {
                add_into(&mut acc, r, &h, 0);
            }
            trim(acc)
        })
        .collect()
}

fn recurrence_row(p: usize) -> Arc<Vec<Vec<Rational>>> {
    if let Some(row) = rows().read().expect("poisoned").get(p) {
        return row.clone();
    }
    let mut table = rows().write().expect("poisoned");
    while table.len() <= p {
        let next = next_row(table.last().expect("seeded"));
        table.push(Arc::new(next));
    }
    table[p].clone()
}

/// `R_p^k` by the three-term recurrence, memoized on `(p, |k|)`.
pub fn logpoly_recurrence(p: usize, k: i64) -> Result<LogPolynomial> {
    check_index(p, k)?;
    let row = recurrence_row(p);
    Ok(LogPolynomial::new(p, k, row[k.unsigned_abs() as usize].clone()))
}

/// All of `R_p^{-p}, ..., R_p^p` by solving the diagonal difference system
/// `a_n(q) = a_n(q-1)/2 + x a_{n-1}(q-1) + a_{n-2}(q-1)/2` with boundary
/// values `a_n(n) = x a_{n-1}(n-1) + a_{n-2}(n-1)`, `a_0(0) = 1`, and reading
/// `R_p^k = a_{p-|k|}(p)`.
pub fn logpoly_difference_algorithm(p: usize) -> Vec<LogPolynomial> {
    let h = half();
    let one = Rational::one();
    // table[q][n] = a_n(q), 0 <= n <= q
    let mut table: Vec<Vec<Vec<Rational>>> = vec![vec![vec![Rational::one()]]];
    for q in 1..=p {
        let prev = &table[q - 1];
        let mut row = Vec::with_capacity(q + 1);
        for n in 0..=q {
            let mut acc = vec![Rational::zero()];
            if n < q {
                add_into(&mut acc, &prev[n], &h, 0);
                if n >= 1 {
                    add_into(&mut acc, &prev[n - 1], &one, 1);
                }
                if n >= 2 {
                    add_into(&mut acc, &prev[n - 2], &h, 0);
                }
            } else {
                add_into(&mut acc, &prev[n - 1], &one, 1);
                if n >= 2 {
                    add_into(&mut acc, &prev[n - 2], &one, 0);
                }
            }
            row.push(trim(acc));
        }
        table.push(row);
    }
    let last = &table[p];
    (-(p as i64)..=p as i64)
        .map(|k| {
            let n = p - k.unsigned_abs() as usize;
            LogPolynomial::new(p, k, last[n].clone())
        })
        .collect()
}

/// `R_p^k` as the `y^k` coefficient of `(x + (y + 1/y)/2)^p`:
/// the sum over `a + b + c = p`, `b - c = k` of `p!/(a! b! c!) x^a / 2^{b+c}`.
pub fn logpoly_from_genfun(p: usize, k: i64) -> Result<LogPolynomial> {
    check_index(p, k)?;
    let pf = factorial(p as u64);
    let mut coeffs = vec![Rational::zero(); p + 1];
    let ka = k.unsigned_abs() as usize;
    // c ranges so that b = c + k >= 0 and a = p - b - c >= 0
    let mut c = if k < 0 { ka } else { 0 };
    loop {
        let b = (c as i64 + k) as usize;
        if b + c > p {
            break;
        }
        let a = p - b - c;
        let denom = factorial(a as u64) * factorial(b as u64) * factorial(c as u64) * (BigInt::one() << (b + c));
        coeffs[a] += Rational::new(pf.clone(), denom);
        c += 1;
    }
    Ok(LogPolynomial::new(p, k, coeffs))
}

/// Horner evaluation of `poly` at `x`.
pub fn logpoly_eval(poly: &LogPolynomial, x: f64) -> f64 {
    poly.eval(x)
}

/// The full row `R_p^{-p} .. R_p^p` from the production path.
pub fn logpoly_row(p: usize) -> Vec<LogPolynomial> {
    (-(p as i64)..=p as i64)
        .map(|k| logpoly_recurrence(p, k).expect("in range"))
        .collect()
}
