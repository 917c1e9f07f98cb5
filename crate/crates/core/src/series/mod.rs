//! Fourier cosine tables for the three kernels
//!
//! * power:         `f(psi) = (chi - cos psi)^p`
//! * inverse power: `h(psi) = (chi - cos psi)^{-q}`
//! * log:           `g(psi) = (chi - cos psi)^p log(chi - cos psi)`
//!
//! `c_n` is the coefficient of `cos(n psi)`.

use serde::Serialize;

pub mod algebraic;
pub mod limit;

pub use algebraic::{log_series_algebraic, p_frak, q_frak, r_frak, re_frak};
pub use limit::{inverse_power_series, log_series_limit, power_series};

/// Below this `eta` (`chi < cosh 0.2 ~ 1.0201`) tables are flagged as
/// ill-conditioned.
pub const CONDITIONING_ETA: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Power,
    InversePower,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Algebraic,
    Limit,
    Oracle,
    ClosedForm,
}

impl std::fmt::Display for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kernel::Power => "power",
            Kernel::InversePower => "inverse_power",
            Kernel::Log => "log",
        })
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Algebraic => "algebraic",
            Method::Limit => "limit",
            Method::Oracle => "oracle",
            Method::ClosedForm => "closed_form",
        })
    }
}

/// A truncated cosine series `sum_{n=0}^{N} c_n cos(n psi)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierCoeffTable {
    pub kernel: Kernel,
    /// `p` for the power and log kernels, `q` for the inverse power kernel.
    pub param: usize,
    pub chi: f64,
    pub eta: f64,
    pub method: Method,
    pub coeffs: Vec<f64>,
    /// Set when `eta < 0.2`, where double precision results degrade.
    pub ill_conditioned: bool,
}

impl FourierCoeffTable {
    pub fn new(kernel: Kernel, param: usize, chi: f64, eta: f64, method: Method, coeffs: Vec<f64>) -> Self {
        FourierCoeffTable {
            kernel,
            param,
            chi,
            eta,
            method,
            coeffs,
            ill_conditioned: eta < CONDITIONING_ETA,
        }
    }

    pub fn nmax(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Partial sum at angle `psi`.
    pub fn evaluate(&self, psi: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * (n as f64 * psi).cos())
            .sum()
    }

    /// Checks `|c_{n+1}/c_n| <= e^{-eta}(1 + 10/n)` for `n >= max(2 param, 10)`
    /// on the infinite kernels; the power kernel must vanish past `param`.
    pub fn decay_ok(&self) -> bool {
        match self.kernel {
            Kernel::Power => self.coeffs.iter().skip(self.param + 1).all(|c| *c == 0.0),
            Kernel::InversePower | Kernel::Log => {
                let start = (2 * self.param).max(10);
                let bound = (-self.eta).exp();
                self.coeffs
                    .windows(2)
                    .enumerate()
                    .skip(start)
                    .filter(|(_, w)| w[0] != 0.0 && w[1] != 0.0 && w[0].is_normal() && w[1].is_normal())
                    .all(|(n, w)| (w[1] / w[0]).abs() <= bound * (1.0 + 10.0 / n as f64))
            }
        }
    }
}

/// Truncation order for the infinite series: the smallest `N >= p + 1` past
/// the peak of `e^{-N eta} N^{2p}` at which that bound drops below `tol`.
pub fn auto_truncation(p: usize, eta: f64, tol: f64) -> usize {
    let two_p = 2.0 * p as f64;
    let log_tol = tol.ln();
    let start = ((two_p / eta).ceil() as usize).max(p + 1).max(1);
    let mut n = start;
    loop {
        let nf = n as f64;
        if -nf * eta + two_p * nf.ln() < log_tol {
            return n;
        }
        n += 1;
    }
}
