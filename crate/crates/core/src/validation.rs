//! Independent checks: trapezoid quadrature of Fourier coefficients, the
//! coefficient-equating identities between the two log-series routes, and a
//! grid runner that collects them into [`ValidationReport`]s.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::greens::{axisym_component, AxisymForm, Geometry, SolutionParams};
use crate::legendre::{neg_order_sum, LegendreArg};
use crate::scalar::{factorial, neumann, to_f64, Rational};
use crate::series::algebraic::{axisymmetric_logpoly_sum, half_r_frak, middle_band_sum, re_frak};
use crate::series::limit::{band_coeff, inverse_power_coeff, ln_sinh, tail_identity_rhs};
use crate::series::{
    inverse_power_series, log_series_algebraic, log_series_limit, power_series, FourierCoeffTable, Kernel,
};

/// Which relation a report checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    N0,
    Mid,
    Np,
    Tail,
    CrossRoute,
    OracleQuad,
    ReClosedForm,
    AxisymDual,
}

impl std::fmt::Display for IdentityId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IdentityId::N0 => "n0",
            IdentityId::Mid => "mid",
            IdentityId::Np => "np",
            IdentityId::Tail => "tail",
            IdentityId::CrossRoute => "cross_route",
            IdentityId::OracleQuad => "oracle_quad",
            IdentityId::ReClosedForm => "re_closed_form",
            IdentityId::AxisymDual => "axisym_dual",
        })
    }
}

/// One comparison of two independently computed values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub identity_id: IdentityId,
    pub p: i64,
    pub n: i64,
    pub eta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub floor: f64,
    pub pass: bool,
}

impl ValidationReport {
    /// Passes when `abs_err <= floor` or `rel_err <= tol`.
    #[allow(clippy::too_many_arguments)]
    pub fn compare(
        identity_id: IdentityId,
        p: i64,
        n: i64,
        eta: f64,
        lhs: f64,
        rhs: f64,
        tol: f64,
        floor: f64,
    ) -> Self {
        let abs_err = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs());
        let rel_err = if scale > 0.0 { abs_err / scale } else { 0.0 };
        let pass = abs_err.is_finite() && (abs_err <= floor || rel_err <= tol);
        ValidationReport {
            identity_id,
            p,
            n,
            eta,
            lhs,
            rhs,
            abs_err,
            rel_err,
            tol,
            floor,
            pass,
        }
    }
}

/// Default relative tolerance of the identity suite.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default absolute floor.
pub const DEFAULT_FLOOR: f64 = 1e-12;

/// A kernel `psi -> K(chi - cos psi)` with known cosine series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadKernel {
    Power { p: usize, chi: f64 },
    InversePower { q: usize, chi: f64 },
    Log { p: usize, chi: f64 },
}

impl QuadKernel {
    fn chi(&self) -> f64 {
        match *self {
            QuadKernel::Power { chi, .. } | QuadKernel::InversePower { chi, .. } | QuadKernel::Log { chi, .. } => chi,
        }
    }

    fn check(&self) -> Result<()> {
        let chi = self.chi();
        if !(chi > 1.0) || !chi.is_finite() {
            return Err(Error::Domain(format!("chi must be > 1, got {chi}")));
        }
        if let QuadKernel::InversePower { q: 0, .. } = self {
            return Err(Error::Domain("inverse power kernel needs q >= 1".into()));
        }
        Ok(())
    }

    /// Kernel value at `psi`, with `chi - cos psi = (chi - 1) + 2 sin^2(psi/2)`.
    pub fn eval(&self, psi: f64) -> f64 {
        let s = (0.5 * psi).sin();
        let base = (self.chi() - 1.0) + 2.0 * s * s;
        match *self {
            QuadKernel::Power { p, .. } => base.powi(p as i32),
            QuadKernel::InversePower { q, .. } => base.powi(-(q as i32)),
            QuadKernel::Log { p, .. } => base.powi(p as i32) * base.ln(),
        }
    }
}

/// Largest node count tried by the quadrature before giving up.
pub const MAX_QUAD_NODES: usize = 1 << 20;

/// Trapezoid estimates of `c_n = eps_n/(2 pi) int_0^{2 pi} K(psi) cos(n psi) dpsi`
/// for `n = 0..=nmax`, doubling the node count from `nodes` until every
/// coefficient moves by less than `1e-12 max(1, sup|K|)`.
pub fn quad_fourier_table(kernel: QuadKernel, nmax: usize, nodes: usize) -> Result<Vec<f64>> {
    kernel.check()?;
    if nodes < 64 {
        return Err(Error::Domain(format!(
            "quadrature needs at least 64 nodes, got {nodes}"
        )));
    }
    // enough nodes to resolve cos(n psi) before comparing estimates
    let mut count = nodes.max((4 * (nmax + 1)).next_power_of_two());
    let mut sums = vec![0.0; nmax + 1];
    let mut sup = 0.0f64;
    let add_nodes = |sums: &mut Vec<f64>, sup: &mut f64, count: usize, start: usize, step: usize| {
        for j in (start..count).step_by(step) {
            let psi = 2.0 * PI * j as f64 / count as f64;
            let f = kernel.eval(psi);
            *sup = sup.max(f.abs());
            for (n, s) in sums.iter_mut().enumerate() {
                *s += f * (n as f64 * psi).cos();
            }
        }
    };
    add_nodes(&mut sums, &mut sup, count, 0, 1);
    let estimate = |sums: &[f64], count: usize| -> Vec<f64> {
        sums.iter()
            .enumerate()
            .map(|(n, s)| neumann(n) * s / count as f64)
            .collect()
    };
    let mut current = estimate(&sums, count);
    let mut doublings = 0;
    while count < MAX_QUAD_NODES {
        doublings += 1;
        let doubled = 2 * count;
        add_nodes(&mut sums, &mut sup, doubled, 1, 2);
        count = doubled;
        let next = estimate(&sums, count);
        let change = current
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        current = next;
        if change < 1e-12 * sup.max(1.0) {
            return Ok(current);
        }
    }
    Err(Error::NonConvergence {
        what: format!("trapezoid quadrature of {kernel:?} with {count} nodes"),
        iterations: doublings,
    })
}

/// Single-coefficient form of [`quad_fourier_table`].
pub fn quad_fourier_coeff(kernel: QuadKernel, n: usize, nodes: usize) -> Result<f64> {
    Ok(quad_fourier_table(kernel, n, nodes)?[n])
}

/// `sup |K|` over the circle, attained at `psi = 0` or `psi = pi`.
pub fn kernel_scale(kernel: QuadKernel) -> f64 {
    kernel.eval(0.0).abs().max(kernel.eval(PI).abs())
}

fn check_eta(eta: f64) -> Result<LegendreArg> {
    LegendreArg::from_eta(eta)
}

/// `n = 0`: `sum_{k=1}^{p} (-1)^{k+1} e^{-k eta} R_p^k / k` against
/// `[psi(2p+1) - psi(p+1)] sinh^p P_p + (-1)^p sum_k (-1)^k (2k+1)/((p-k)(p+k+1)) sinh^p P_k`.
pub fn verify_identity_n0(p: usize, eta: f64, tol: f64) -> Result<ValidationReport> {
    if p == 0 {
        return Err(Error::IndexRange("n = 0 identity needs p >= 1".into()));
    }
    let arg = check_eta(eta)?;
    let lhs = axisymmetric_logpoly_sum(p, eta)?;
    let rhs = 0.5 * band_coeff(p, 0, &arg);
    Ok(ValidationReport::compare(
        IdentityId::N0,
        p as i64,
        0,
        eta,
        lhs,
        rhs,
        tol,
        DEFAULT_FLOOR,
    ))
}

/// `1 <= n <= p-1`: the two `r`-type sums against the three Legendre sums.
pub fn verify_identity_mid(p: usize, n: usize, eta: f64, tol: f64) -> Result<ValidationReport> {
    if p < 2 || n == 0 || n >= p {
        return Err(Error::IndexRange(format!(
            "middle-band identity needs p >= 2, 1 <= n <= p-1; got p = {p}, n = {n}"
        )));
    }
    let arg = check_eta(eta)?;
    let lhs = middle_band_sum(n, p, eta);
    let rhs = 0.5 * (n as f64 * eta).exp() * band_coeff(p, n, &arg);
    Ok(ValidationReport::compare(
        IdentityId::Mid,
        p as i64,
        n as i64,
        eta,
        lhs,
        rhs,
        tol,
        DEFAULT_FLOOR,
    ))
}

/// `n = p`: `sum_{k=-p}^{p-1} (-1)^{k+1} e^{k eta} R_p^k/(p-k)` against its
/// Legendre side.
pub fn verify_identity_np(p: usize, eta: f64, tol: f64) -> Result<ValidationReport> {
    if p == 0 {
        return Err(Error::IndexRange("n = p identity needs p >= 1".into()));
    }
    let arg = check_eta(eta)?;
    let pi = p as i64;
    let lhs = half_r_frak(pi, p, -pi, pi - 1, eta);
    let rhs = 0.5 * (p as f64 * eta).exp() * band_coeff(p, p, &arg);
    Ok(ValidationReport::compare(
        IdentityId::Np,
        pi,
        pi,
        eta,
        lhs,
        rhs,
        tol,
        DEFAULT_FLOOR,
    ))
}

/// `n >= p+1`: `sum_{k=-p}^{p} (-1)^{k+1} e^{k eta} R_p^k/(n-k)` against
/// `(-1)^{p+1} p! (n-p-1)! e^{n eta} sinh^p P_p^{-n}(coth eta)`.
pub fn verify_identity_tail(p: usize, n: usize, eta: f64, tol: f64) -> Result<ValidationReport> {
    if n < p + 1 {
        return Err(Error::IndexRange(format!(
            "tail identity needs n >= p + 1, got n = {n}, p = {p}"
        )));
    }
    let arg = check_eta(eta)?;
    let pi = p as i64;
    let lhs = half_r_frak(n as i64, p, -pi, pi, eta);
    let rhs = tail_identity_rhs(p, n, &arg);
    Ok(ValidationReport::compare(
        IdentityId::Tail,
        pi,
        n as i64,
        eta,
        lhs,
        rhs,
        tol,
        DEFAULT_FLOOR,
    ))
}

/// `Re_{n,p}` against `2 (-1)^{p+1} p! (p+n)! e^{n eta} sinh^p P_p^{-n}(coth eta)`.
pub fn verify_re_closed_form(p: usize, n: usize, eta: f64, tol: f64) -> Result<ValidationReport> {
    let arg = check_eta(eta)?;
    let lhs = re_frak(n, p, eta)?;
    let sign = if p % 2 == 1 { 1.0 } else { -1.0 };
    let ratio = to_f64(&Rational::new(
        factorial(p as u64) * factorial((p + n) as u64),
        factorial(n as u64),
    ));
    let rhs = 2.0 * sign * ratio * (p as f64 * ln_sinh(eta)).exp() * neg_order_sum(p, n, arg.w());
    Ok(ValidationReport::compare(
        IdentityId::ReClosedForm,
        p as i64,
        n as i64,
        eta,
        lhs,
        rhs,
        tol,
        DEFAULT_FLOOR,
    ))
}

/// The inverse-power series rewritten through `Re`:
/// `c_n = (-1)^q eps_n e^{-n eta} Re_{n,q-1} / (2 [(q-1)!]^2 sinh^{2q-1})` for `n >= q`,
/// against the Legendre closed form. Reported under the tail identity.
pub fn verify_inverse_power_rewriting(q: usize, n: usize, eta: f64, tol: f64) -> Result<ValidationReport> {
    if q == 0 || n < q {
        return Err(Error::IndexRange(format!(
            "rewriting needs q >= 1 and n >= q, got q = {q}, n = {n}"
        )));
    }
    let arg = check_eta(eta)?;
    let re = re_frak(n, q - 1, eta)?;
    let sign = if q.is_multiple_of(2) { 1.0 } else { -1.0 };
    let fq = to_f64(&Rational::from_integer(factorial(q as u64 - 1)));
    let ln_scale = -(n as f64) * eta - (2 * q - 1) as f64 * ln_sinh(eta);
    let lhs = sign * neumann(n) * re * ln_scale.exp() / (2.0 * fq * fq);
    let rhs = inverse_power_coeff(q, n, &arg);
    Ok(ValidationReport::compare(
        IdentityId::Tail,
        q as i64 - 1,
        n as i64,
        eta,
        lhs,
        rhs,
        tol,
        DEFAULT_FLOOR,
    ))
}

/// Both routes of the log series, coefficient by coefficient.
pub fn verify_cross_route(p: usize, eta: f64, nmax: usize, tol: f64, floor: f64) -> Result<Vec<ValidationReport>> {
    let chi = eta.cosh();
    let a = log_series_algebraic(p, chi, nmax.max(p + 1))?;
    let l = log_series_limit(p, chi, nmax.max(p + 1))?;
    Ok((0..=nmax)
        .map(|n| {
            ValidationReport::compare(
                IdentityId::CrossRoute,
                p as i64,
                n as i64,
                a.eta,
                a.coeffs[n],
                l.coeffs[n],
                tol,
                floor,
            )
        })
        .collect())
}

/// The two axisymmetric forms at `R = R' = 1` with `chi = cosh(eta)`.
pub fn verify_axisym_dual(p: usize, eta: f64, tol: f64) -> Result<ValidationReport> {
    let params = SolutionParams::new(2, p + 1)?;
    // d = 2 has no transverse gap; take R' so that chi = cosh(eta) with R = 1
    let geom = Geometry::new(2, 1.0, eta.exp(), 0.0, 0.0, 0.0)?;
    let lhs = axisym_component(&params, &geom, AxisymForm::Legendre)?;
    let rhs = axisym_component(&params, &geom, AxisymForm::Logpoly)?;
    Ok(ValidationReport::compare(
        IdentityId::AxisymDual,
        p as i64,
        0,
        eta,
        lhs,
        rhs,
        tol,
        DEFAULT_FLOOR,
    ))
}

/// Compares a table with quadrature of its kernel. The floor scales with
/// `sup |K|`: the quadrature itself cannot resolve coefficients below the
/// rounding level of the kernel samples.
pub fn verify_against_quadrature(table: &FourierCoeffTable, tol: f64) -> Result<Vec<ValidationReport>> {
    let kernel = match table.kernel {
        Kernel::Power => QuadKernel::Power {
            p: table.param,
            chi: table.chi,
        },
        Kernel::InversePower => QuadKernel::InversePower {
            q: table.param,
            chi: table.chi,
        },
        Kernel::Log => QuadKernel::Log {
            p: table.param,
            chi: table.chi,
        },
    };
    let quad = quad_fourier_table(kernel, table.nmax(), 64)?;
    let floor = DEFAULT_FLOOR * kernel_scale(kernel).max(1.0);
    Ok(table
        .coeffs
        .iter()
        .zip(&quad)
        .enumerate()
        .map(|(n, (c, q))| {
            ValidationReport::compare(
                IdentityId::OracleQuad,
                table.param as i64,
                n as i64,
                table.eta,
                *c,
                *q,
                tol,
                floor,
            )
        })
        .collect())
}

/// Parameters of the full validation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub pmax: usize,
    pub etas: Vec<f64>,
    /// Largest `n` for the identity and cross-route checks.
    pub nmax: usize,
    /// Relative tolerance for `eta >= 0.5`.
    pub tol: f64,
    /// Relative tolerance for `eta < 0.5`.
    pub small_eta_tol: f64,
    /// Largest `p`, `q` and `n` for the quadrature checks.
    pub quad_pmax: usize,
    pub quad_nmax: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            pmax: 10,
            etas: vec![0.2, 0.5, 1.0, 2.0, 5.0],
            nmax: 50,
            tol: DEFAULT_TOL,
            small_eta_tol: 1e-8,
            quad_pmax: 5,
            quad_nmax: 40,
        }
    }
}

fn grid_cell(p: usize, eta: f64, cfg: &GridConfig) -> Result<Vec<ValidationReport>> {
    let tol = if eta < 0.5 { cfg.small_eta_tol } else { cfg.tol };
    let mut out = Vec::new();
    if p >= 1 {
        out.push(verify_identity_n0(p, eta, tol)?);
        for n in 1..p {
            out.push(verify_identity_mid(p, n, eta, tol)?);
        }
        out.push(verify_identity_np(p, eta, tol)?);
    }
    for n in (p + 1)..=cfg.nmax.max(p + 1) {
        out.push(verify_identity_tail(p, n, eta, tol)?);
        out.push(verify_re_closed_form(p, n, eta, tol)?);
        out.push(verify_inverse_power_rewriting(p + 1, n, eta, tol)?);
    }
    out.extend(verify_cross_route(p, eta, cfg.nmax.max(p + 1), tol, DEFAULT_FLOOR)?);
    out.push(verify_axisym_dual(p, eta, tol.max(1e-10))?);
    if p <= cfg.quad_pmax {
        let chi = eta.cosh();
        let quad_tol = if eta < 0.5 { 1e-6 } else { 1e-8 };
        let nq = cfg.quad_nmax.max(p + 1);
        let mut tables = vec![
            power_series(p, chi)?,
            log_series_algebraic(p, chi, nq)?,
            log_series_limit(p, chi, nq)?,
        ];
        if p >= 1 {
            tables.push(inverse_power_series(p, chi, nq)?);
        }
        for t in &tables {
            out.extend(verify_against_quadrature(t, quad_tol)?);
        }
    }
    Ok(out)
}

/// Runs every check over `p = 0..=pmax` and the listed `eta`, in parallel,
/// returning the reports in a fixed `(p, eta, check)` order.
pub fn run_grid(cfg: &GridConfig) -> Result<Vec<ValidationReport>> {
    let cells: Vec<(usize, f64)> = (0..=cfg.pmax)
        .flat_map(|p| cfg.etas.iter().map(move |&eta| (p, eta)))
        .collect();
    let results: Vec<Result<Vec<ValidationReport>>> =
        cells.par_iter().map(|&(p, eta)| grid_cell(p, eta, cfg)).collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_examples() {
        let chi = 2.0f64;
        let eta = crate::scalar::eta_from_chi(chi).unwrap();
        let c = quad_fourier_coeff(QuadKernel::Power { p: 1, chi }, 0, 64).unwrap();
        assert!((c - chi).abs() < 1e-14);
        let c = quad_fourier_coeff(QuadKernel::Log { p: 0, chi }, 2, 64).unwrap();
        assert!((c + (-2.0 * eta).exp()).abs() < 1e-13);
        let c = quad_fourier_coeff(QuadKernel::InversePower { q: 1, chi }, 1, 64).unwrap();
        assert!((c - 2.0 * (-eta).exp() / eta.sinh()).abs() < 1e-13);
        assert!(quad_fourier_coeff(QuadKernel::Power { p: 1, chi }, 0, 32).is_err());
        assert!(quad_fourier_coeff(QuadKernel::Power { p: 1, chi: 1.0 }, 0, 64).is_err());
    }

    #[test]
    fn quadrature_reports_non_convergence() {
        // eta ~ 1e-6: the kernel is too peaked to resolve within the cap
        let chi = 1.0 + 5e-13;
        let r = quad_fourier_coeff(QuadKernel::InversePower { q: 2, chi }, 0, 64);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn identity_examples() {
        assert!(verify_identity_n0(1, 1.0, 1e-11).unwrap().pass);
        assert!(verify_identity_n0(10, 0.5, 1e-9).unwrap().pass);
        assert!(verify_identity_mid(2, 1, 1.0, 1e-11).unwrap().pass);
        assert!(verify_identity_mid(10, 5, 1.0, 1e-9).unwrap().pass);
        assert!(verify_identity_mid(3, 2, 0.2, 1e-8).unwrap().pass);
        assert!(verify_identity_np(1, 1.0, 1e-11).unwrap().pass);
        assert!(verify_identity_np(10, 1.0, 1e-9).unwrap().pass);
        assert!(verify_identity_np(4, 0.2, 1e-8).unwrap().pass);
        for n in 1..6 {
            let r = verify_identity_tail(0, n, 0.7, 0.0).unwrap();
            assert!(r.abs_err <= 1e-15 * r.lhs.abs(), "{r:?}");
        }
        assert!(verify_identity_tail(1, 2, 1.0, 1e-12).unwrap().pass);
        for n in 11..=30 {
            assert!(verify_identity_tail(10, n, 1.0, 1e-9).unwrap().pass);
        }
        assert!(verify_identity_mid(2, 2, 1.0, 1e-9).is_err());
        assert!(verify_identity_n0(0, 1.0, 1e-9).is_err());
        assert!(verify_identity_tail(3, 3, 1.0, 1e-9).is_err());
    }

    #[test]
    fn n0_identity_large_eta_ratio() {
        // the Legendre side is (cosh - sinh)/2 for p = 1 and cancels by e^{2 eta}
        for &eta in &[5.0, 10.0, 15.0] {
            let r = verify_identity_n0(1, eta, 1e-9).unwrap();
            let bound = 8.0 * f64::EPSILON * (2.0 * eta).exp();
            assert!((r.lhs / r.rhs - 1.0).abs() < bound, "{r:?}");
        }
    }

    #[test]
    fn report_pass_rule() {
        let r = ValidationReport::compare(IdentityId::Mid, 2, 1, 1.0, 1.0, 1.0 + 1e-10, 1e-9, 1e-12);
        assert!(r.pass);
        let r = ValidationReport::compare(IdentityId::Mid, 2, 1, 1.0, 1e-13, 3e-13, 1e-9, 1e-12);
        assert!(r.pass && r.rel_err > 0.5);
        let r = ValidationReport::compare(IdentityId::Mid, 2, 1, 1.0, 1.0, 1.1, 1e-9, 1e-12);
        assert!(!r.pass);
        let r = ValidationReport::compare(IdentityId::Mid, 2, 1, 1.0, f64::NAN, 1.0, 1e-9, 1e-12);
        assert!(!r.pass);
    }

    #[test]
    fn small_grid_passes() {
        let cfg = GridConfig {
            pmax: 3,
            etas: vec![0.5, 2.0],
            nmax: 12,
            quad_nmax: 12,
            ..GridConfig::default()
        };
        let reports = run_grid(&cfg).unwrap();
        let failures: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
        assert!(failures.is_empty(), "{failures:#?}");
        assert_eq!(reports, run_grid(&cfg).unwrap());
    }
}
