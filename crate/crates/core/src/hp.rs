//! Thin multiprecision layer over `astro-float` for the sums whose terms
//! cancel far beyond what `f64` can resolve.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigInt;
use num_traits::Zero;

use crate::scalar::Rational;

const RM: RoundingMode = RoundingMode::ToEven;

/// Working precision floor, in bits.
pub const BASE_PRECISION: usize = 192;

/// Minimum number of bits that must survive cancellation in a sum.
pub const GUARD_BITS: usize = 80;

/// A multiprecision evaluation context at a fixed binary precision.
pub struct Mp {
    prec: usize,
    consts: Consts,
}

impl Mp {
    pub fn new(prec: usize) -> Self {
        Mp {
            prec: prec.max(64),
            consts: Consts::new().expect("astro-float constant cache"),
        }
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn f(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.prec)
    }

    pub fn int(&self, n: i64) -> BigFloat {
        BigFloat::from_i64(n, self.prec)
    }

    pub fn big_int(&self, n: &BigInt) -> BigFloat {
        let (sign, digits) = n.to_u64_digits();
        let radix = BigFloat::from_f64(18446744073709551616.0, self.prec);
        let mut acc = BigFloat::from_u64(0, self.prec);
        for d in digits.iter().rev() {
            acc = acc.mul(&radix, self.prec, RM);
            acc = acc.add(&BigFloat::from_u64(*d, self.prec), self.prec, RM);
        }
        if sign == num_bigint::Sign::Minus {
            acc.inv_sign();
        }
        acc
    }

    pub fn rational(&self, r: &Rational) -> BigFloat {
        let num = self.big_int(r.numer());
        if r.denom() == &BigInt::from(1) {
            return num;
        }
        num.div(&self.big_int(r.denom()), self.prec, RM)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.prec, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.prec, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.prec, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.prec, RM)
    }

    pub fn div_int(&self, a: &BigFloat, n: i64) -> BigFloat {
        a.div(&self.int(n), self.prec, RM)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.prec, RM, &mut self.consts)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.prec, RM, &mut self.consts)
    }

    pub fn powi(&self, a: &BigFloat, n: usize) -> BigFloat {
        a.powi(n, self.prec, RM)
    }

    /// Horner evaluation of a polynomial with exact rational coefficients.
    pub fn poly(&self, coeffs: &[Rational], x: &BigFloat) -> BigFloat {
        let mut acc = self.int(0);
        for c in coeffs.iter().rev() {
            acc = self.mul(&acc, x);
            if !c.is_zero() {
                acc = self.add(&acc, &self.rational(c));
            }
        }
        acc
    }
}

/// Binary exponent of `x` (`value = m * 2^e` with `m` in `[1/2, 1)`), or
/// `None` for zero.
pub fn exponent(x: &BigFloat) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        x.exponent().map(i64::from)
    }
}

/// Round to the nearest `f64` (ties to even), with gradual underflow.
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let mut y = x.clone();
    if y.set_precision(53, RM).is_err() {
        return f64::NAN;
    }
    let Some((words, _, sign, e, _)) = y.as_raw_parts() else {
        return f64::NAN;
    };
    let top = *words.last().unwrap_or(&0);
    let mant = (top >> 11) as f64; // exact: 53 significant bits
    let shift = i64::from(e) - 53;
    let v = scale2(mant, shift);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

fn scale2(mut v: f64, mut shift: i64) -> f64 {
    // Apply 2^shift in bounded steps so intermediate values do not overflow
    // or underflow prematurely.
    while shift > 1000 {
        v *= 2f64.powi(1000);
        shift -= 1000;
        if v.is_infinite() {
            return v;
        }
    }
    while shift < -1000 {
        v *= 2f64.powi(-1000);
        shift += 1000;
        if v == 0.0 {
            return v;
        }
    }
    v * 2f64.powi(shift as i32)
}

/// Sum of signed multiprecision terms that records how much cancellation
/// took place, so callers can tell whether the working precision sufficed.
pub struct Accumulator {
    sum: BigFloat,
    max_exp: Option<i64>,
}

impl Accumulator {
    pub fn new(mp: &Mp) -> Self {
        Accumulator {
            sum: mp.int(0),
            max_exp: None,
        }
    }

    pub fn push(&mut self, mp: &Mp, term: &BigFloat) {
        if let Some(e) = exponent(term) {
            self.max_exp = Some(self.max_exp.map_or(e, |m| m.max(e)));
        }
        self.sum = mp.add(&self.sum, term);
    }

    /// Bits lost to cancellation: exponent of the largest term minus the
    /// exponent of the result.
    pub fn lost_bits(&self) -> usize {
        match (self.max_exp, exponent(&self.sum)) {
            (Some(m), Some(s)) if m > s => (m - s) as usize,
            (Some(_), None) => usize::MAX,
            _ => 0,
        }
    }

    pub fn value(&self) -> &BigFloat {
        &self.sum
    }

    pub fn into_value(self) -> BigFloat {
        self.sum
    }
}

/// Runs `eval` at increasing precision until the reported cancellation
/// leaves at least [`GUARD_BITS`] significant bits.
pub fn adaptive<F>(start: usize, mut eval: F) -> BigFloat
where
    F: FnMut(&mut Mp) -> (BigFloat, usize),
{
    let mut prec = start.max(BASE_PRECISION);
    loop {
        let mut mp = Mp::new(prec);
        let (value, lost) = eval(&mut mp);
        if lost == usize::MAX {
            // exact cancellation to zero; more precision cannot help past this
            if prec >= 4096 {
                return value;
            }
            prec *= 2;
            continue;
        }
        if lost + GUARD_BITS <= prec || prec >= 1 << 15 {
            return value;
        }
        prec = lost + GUARD_BITS + 64;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn f64_round_trip() {
        let mp = Mp::new(256);
        for &v in &[
            1.0,
            -0.75,
            std::f64::consts::PI,
            1e-300,
            1.7976931348623157e308,
            123_456_789.125,
            2.2250738585072014e-308,
        ] {
            assert_eq!(to_f64(&mp.f(v)), v, "{v}");
        }
        assert_eq!(to_f64(&mp.int(0)), 0.0);
        // smallest subnormal, built exactly (from_f64 flushes subnormals)
        let tiny = mp.powi(&mp.f(0.5), 1074);
        assert_eq!(to_f64(&tiny), 5e-324);
        assert_eq!(to_f64(&mp.powi(&mp.f(0.5), 1080)), 0.0);
    }

    #[test]
    fn rounding_is_to_nearest() {
        let mp = Mp::new(256);
        let third = mp.div_int(&mp.int(1), 3);
        assert_eq!(to_f64(&third), 1.0 / 3.0);
        let x = mp.div(&mp.int(-22), &mp.int(7));
        assert_eq!(to_f64(&x), -22.0 / 7.0);
    }

    #[test]
    fn big_integers_and_rationals() {
        let mp = Mp::new(512);
        let n = crate::scalar::factorial(40);
        let v = to_f64(&mp.big_int(&n));
        assert!((v - 8.159152832478977e47).abs() / v < 1e-15);
        let r = Rational::new(BigInt::from(-5), BigInt::from(8));
        assert_eq!(to_f64(&mp.rational(&r)), -0.625);
        let one = Rational::one();
        assert_eq!(to_f64(&mp.rational(&one)), 1.0);
    }

    #[test]
    fn exp_matches_std() {
        let mut mp = Mp::new(256);
        for &x in &[0.2, 1.0, 5.0, -3.0] {
            let e = to_f64(&mp.exp(&mp.f(x)));
            assert!((e - x.exp()).abs() <= 2.0 * f64::EPSILON * x.exp());
        }
    }

    #[test]
    fn accumulator_tracks_cancellation() {
        let mp = Mp::new(256);
        let mut acc = Accumulator::new(&mp);
        acc.push(&mp, &mp.f(1.0e20));
        acc.push(&mp, &mp.f(1.0));
        acc.push(&mp, &mp.f(-1.0e20));
        assert_eq!(to_f64(acc.value()), 1.0);
        assert!(acc.lost_bits() >= 66);
    }
}
