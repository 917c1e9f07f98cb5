//! Fundamental solutions of `(-Delta)^k` in `R^d` and their azimuthal
//! Fourier expansions about the `x_1 x_2` plane.
//!
//! Points are written in cylindrical form `(R cos phi, R sin phi, x_3, ..., x_d)`,
//! so that `|x - x'|^2 = 2 R R' (chi - cos(phi - phi'))` with the toroidal
//! parameter `chi = (R^2 + R'^2 + sum_{i>=3} (x_i - x'_i)^2) / (2 R R')`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::legendre::LegendreArg;
use crate::scalar::{beta_pd, digamma_diff, eta_from_chi, factorial_f64, to_f64};
use crate::series::algebraic::axisymmetric_logpoly_sum;
use crate::series::limit::{axisymmetric_legendre_sum, power_coeff};
use crate::series::{
    inverse_power_series, log_series_algebraic, log_series_limit, power_series, FourierCoeffTable, Kernel, Method,
};

/// Which closed form of the fundamental solution applies to `(d, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Even `d`, `k >= d/2`: `|x - x'|^{2p} (log|x - x'| - beta_{p,d})`, `p = k - d/2`.
    Log { p: usize },
    /// Even `d`, `k < d/2`: `|x - x'|^{-2q} = (2RR'(chi - cos))^{-q}`, `q = d/2 - k`.
    Power { q: usize },
    /// Odd `d`: a pure (half-integer) power of the distance.
    OddDimension,
}

/// The operator `(-Delta)^k` on `R^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolutionParams {
    pub d: usize,
    pub k: usize,
}

impl SolutionParams {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        if d == 0 || k == 0 {
            return Err(Error::Domain(format!("need d >= 1 and k >= 1, got d = {d}, k = {k}")));
        }
        Ok(SolutionParams { d, k })
    }

    pub fn regime(&self) -> Regime {
        if self.d % 2 == 1 {
            Regime::OddDimension
        } else if self.k >= self.d / 2 {
            Regime::Log { p: self.k - self.d / 2 }
        } else {
            Regime::Power { q: self.d / 2 - self.k }
        }
    }

    /// Exponent `2k - d` of the distance.
    pub fn distance_exponent(&self) -> i64 {
        2 * self.k as i64 - self.d as i64
    }

    fn log_p(&self) -> Result<usize> {
        match self.regime() {
            Regime::Log { p } => Ok(p),
            _ => Err(Error::WrongRegime {
                d: self.d,
                k: self.k,
                expected: "logarithmic (even d, k >= d/2)",
            }),
        }
    }

    fn power_q(&self) -> Result<usize> {
        match self.regime() {
            Regime::Power { q } => Ok(q),
            _ => Err(Error::WrongRegime {
                d: self.d,
                k: self.k,
                expected: "power law (even d, k < d/2)",
            }),
        }
    }
}

/// Relative position of two points in cylindrical form.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub d: usize,
    pub r: f64,
    pub rprime: f64,
    pub perp_diff_sq: f64,
    pub phi: f64,
    pub phiprime: f64,
    chi: f64,
    eta: f64,
}

impl Geometry {
    pub fn new(d: usize, r: f64, rprime: f64, perp_diff_sq: f64, phi: f64, phiprime: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("azimuthal expansions need d >= 2, got {d}")));
        }
        if d == 2 && perp_diff_sq != 0.0 {
            return Err(Error::Domain("d = 2 has no transverse coordinates".into()));
        }
        if !(r > 0.0 && rprime > 0.0) || !r.is_finite() || !rprime.is_finite() {
            return Err(Error::DegenerateGeometry(format!(
                "both points must lie off the axis, got R = {r}, R' = {rprime}"
            )));
        }
        if !(perp_diff_sq >= 0.0) || !perp_diff_sq.is_finite() {
            return Err(Error::Domain(format!(
                "transverse separation must be >= 0, got {perp_diff_sq}"
            )));
        }
        // chi - 1 without cancellation
        let chi_minus_one = ((r - rprime).powi(2) + perp_diff_sq) / (2.0 * r * rprime);
        if chi_minus_one <= 0.0 {
            return Err(Error::DegenerateGeometry(
                "points on a common circle about the axis (chi = 1)".into(),
            ));
        }
        let chi = 1.0 + chi_minus_one;
        let eta = eta_from_chi(chi).map_err(|_| Error::DegenerateGeometry(format!("chi = {chi} is not > 1")))?;
        Ok(Geometry {
            d,
            r,
            rprime,
            perp_diff_sq,
            phi,
            phiprime,
            chi,
            eta,
        })
    }

    /// Builds the geometry of two Cartesian points of equal dimension.
    pub fn from_points(x: &[f64], xprime: &[f64]) -> Result<Self> {
        check_points(x, xprime)?;
        let perp: f64 = x[2..].iter().zip(&xprime[2..]).map(|(a, b)| (a - b).powi(2)).sum();
        Geometry::new(
            x.len(),
            x[0].hypot(x[1]),
            xprime[0].hypot(xprime[1]),
            perp,
            x[1].atan2(x[0]),
            xprime[1].atan2(xprime[0]),
        )
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn delta_phi(&self) -> f64 {
        self.phi - self.phiprime
    }

    /// `|x - x'|^2 = 2 R R' (chi - cos(phi - phi'))`, with `chi - cos`
    /// formed as `(chi - 1) + 2 sin^2(dphi/2)`.
    pub fn distance_sq(&self) -> f64 {
        let half = (0.5 * self.delta_phi()).sin();
        2.0 * self.r * self.rprime * ((self.chi - 1.0) + 2.0 * half * half)
    }
}

fn check_points(x: &[f64], xprime: &[f64]) -> Result<()> {
    if x.len() != xprime.len() {
        return Err(Error::Domain(format!(
            "points have different dimensions {} and {}",
            x.len(),
            xprime.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Domain(format!("need dimension >= 2, got {}", x.len())));
    }
    Ok(())
}

fn distance_sq(params: &SolutionParams, x: &[f64], xprime: &[f64]) -> Result<f64> {
    if x.len() != params.d || xprime.len() != params.d {
        return Err(Error::Domain(format!(
            "points must have dimension d = {}, got {} and {}",
            params.d,
            x.len(),
            xprime.len()
        )));
    }
    let r2: f64 = x.iter().zip(xprime).map(|(a, b)| (a - b).powi(2)).sum();
    if r2 == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(r2)
}

/// `Gamma(m/2)` for an integer `m` that is not a non-positive even number.
fn gamma_half(m: i64) -> f64 {
    debug_assert!(m > 0 || m % 2 != 0);
    let (mut x, mut g) = if m % 2 == 0 { (2i64, 1.0) } else { (1i64, PI.sqrt()) };
    while x < m {
        g *= x as f64 / 2.0;
        x += 2;
    }
    while x > m {
        x -= 2;
        g /= x as f64 / 2.0;
    }
    g
}

/// Normalized fundamental solution `G_k^d(x, x')` of `(-Delta)^k`.
pub fn greens_eval(params: &SolutionParams, x: &[f64], xprime: &[f64]) -> Result<f64> {
    let r2 = distance_sq(params, x, xprime)?;
    let (d, k) = (params.d, params.k);
    let half_d = d as f64 / 2.0;
    let power = (0.5 * params.distance_exponent() as f64 * r2.ln()).exp();
    let pi_pow = PI.powf(half_d);
    match params.regime() {
        Regime::Log { p } => {
            let sign = if (k + d / 2 + 1) % 2 == 0 { 1.0 } else { -1.0 };
            let denom = factorial_f64(k as u64 - 1) * factorial_f64(p as u64) * 2f64.powi(2 * k as i32 - 1) * pi_pow;
            let beta = to_f64(&beta_pd(p as u64, d as u64)?);
            Ok(sign * power / denom * (0.5 * r2.ln() - beta))
        }
        Regime::Power { .. } | Regime::OddDimension => {
            let gamma = gamma_half(d as i64 - 2 * k as i64);
            Ok(gamma * power / (factorial_f64(k as u64 - 1) * 2f64.powi(2 * k as i32) * pi_pow))
        }
    }
}

/// `li_k^d = |x - x'|^{2p} (log|x - x'| - beta_{p,d})` in the logarithmic regime.
pub fn li_direct(params: &SolutionParams, x: &[f64], xprime: &[f64]) -> Result<f64> {
    let p = params.log_p()?;
    let r2 = distance_sq(params, x, xprime)?;
    li_from_distance_sq(p, params.d, r2)
}

pub(crate) fn li_from_distance_sq(p: usize, d: usize, r2: f64) -> Result<f64> {
    let beta = to_f64(&beta_pd(p as u64, d as u64)?);
    Ok(r2.powi(p as i32) * (0.5 * r2.ln() - beta))
}

/// `hii_k^d = |x - x'|^{2k-d}` in the power regime.
pub fn hii_direct(params: &SolutionParams, x: &[f64], xprime: &[f64]) -> Result<f64> {
    let q = params.power_q()?;
    let r2 = distance_sq(params, x, xprime)?;
    Ok(r2.powi(-(q as i32)))
}

/// The two closed forms of the axisymmetric (`n = 0`) coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisymForm {
    /// Associated Legendre functions with a digamma difference.
    Legendre,
    /// Logarithmic polynomials `R_p^k(chi)`.
    Logpoly,
}

fn check_dimension(params: &SolutionParams, geom: &Geometry) -> Result<()> {
    if params.d != geom.d {
        return Err(Error::Domain(format!(
            "geometry has dimension {}, parameters have d = {}",
            geom.d, params.d
        )));
    }
    Ok(())
}

/// Azimuthal average `a_0` of `li_k^d`.
pub fn axisym_component(params: &SolutionParams, geom: &Geometry, form: AxisymForm) -> Result<f64> {
    let p = params.log_p()?;
    check_dimension(params, geom)?;
    let eta = geom.eta();
    let arg = LegendreArg::from_eta(eta)?;
    let beta = to_f64(&beta_pd(p as u64, params.d as u64)?);
    let base = 0.5 * (geom.r * geom.rprime).ln() + 0.5 * eta - beta;
    // sinh^p(eta) P_p(coth eta) is the n = 0 power-series coefficient
    let power0 = power_coeff(p, 0, &arg);
    let inner = match form {
        AxisymForm::Legendre => {
            let pu = p as u64;
            let digamma = to_f64(&digamma_diff(2 * pu + 1, pu + 1)?);
            (base + digamma) * power0 + axisymmetric_legendre_sum(p, &arg)
        }
        AxisymForm::Logpoly => base * power0 + axisymmetric_logpoly_sum(p, eta)?,
    };
    Ok((2.0 * geom.r * geom.rprime).powi(p as i32) * inner)
}

/// Azimuthal Fourier coefficients of `li_k^d`:
/// `a_n = (2RR')^p { [log(2RR')/2 - beta_{p,d}] f_n + g_n / 2 }` with `f_n`, `g_n`
/// the power and log series of `chi - cos`. `a_0` is produced by
/// [`axisym_component`] in the form matching `method`.
pub fn li_expansion(
    params: &SolutionParams,
    geom: &Geometry,
    nmax: usize,
    method: Method,
) -> Result<FourierCoeffTable> {
    let p = params.log_p()?;
    check_dimension(params, geom)?;
    let nmax = nmax.max(p + 1);
    let chi = geom.chi();
    let (log_table, form) = match method {
        Method::Algebraic => (log_series_algebraic(p, chi, nmax)?, AxisymForm::Logpoly),
        Method::Limit => (log_series_limit(p, chi, nmax)?, AxisymForm::Legendre),
        other => {
            return Err(Error::Domain(format!(
                "li_expansion supports the algebraic and limit routes, got {other}"
            )))
        }
    };
    let power = power_series(p, chi)?;
    let two_rr = 2.0 * geom.r * geom.rprime;
    let scale = two_rr.powi(p as i32);
    let beta = to_f64(&beta_pd(p as u64, params.d as u64)?);
    let shift = 0.5 * two_rr.ln() - beta;
    let mut coeffs: Vec<f64> = log_table
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, g)| {
            let f = power.coeffs.get(n).copied().unwrap_or(0.0);
            scale * (shift * f + 0.5 * g)
        })
        .collect();
    coeffs[0] = axisym_component(params, geom, form)?;
    Ok(FourierCoeffTable::new(Kernel::Log, p, chi, geom.eta(), method, coeffs))
}

/// Azimuthal Fourier coefficients of `hii_k^d = (2RR')^{-q} (chi - cos)^{-q}`,
/// `q = d/2 - k`.
pub fn hii_expansion(params: &SolutionParams, geom: &Geometry, nmax: usize) -> Result<FourierCoeffTable> {
    let q = params.power_q()?;
    check_dimension(params, geom)?;
    let mut table = inverse_power_series(q, geom.chi(), nmax)?;
    let scale = (2.0 * geom.r * geom.rprime).powi(-(q as i32));
    for c in &mut table.coeffs {
        *c *= scale;
    }
    Ok(table)
}
