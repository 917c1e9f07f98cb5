//! Independent oracles for the series and Legendre code paths.

use std::f64::consts::{LN_2, PI};

use polyfourier::legendre::{legendre_deg_deriv, legendre_p, legendre_p_nu};
use polyfourier::logpoly::{logpoly_eval, logpoly_recurrence};
use polyfourier::scalar::{neumann, pochhammer};
use polyfourier::series::{log_series_algebraic, log_series_limit, power_series};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// `(chi - cos psi)^p log(chi - cos psi)` as the raw double sum
/// `(eta - log 2) f + 2 sum_k (-1)^{k+1} R_p^k sum_{n=1}^{M} e^{-n eta}/n cos((n+k) psi)`,
/// collected into cosine coefficients by brute force.
fn brute_force_log_series(p: usize, eta: f64, m: usize, nmax: usize) -> Vec<f64> {
    let chi = eta.cosh();
    let mut c = vec![0.0; nmax + 1];
    let power = power_series(p, chi).unwrap();
    for (n, f) in power.coeffs.iter().enumerate() {
        c[n] += (eta - LN_2) * f;
    }
    let pi = p as i64;
    for k in -pi..=pi {
        let r = logpoly_eval(&logpoly_recurrence(p, k).unwrap(), chi);
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        for n in 1..=m {
            let idx = (n as i64 + k).unsigned_abs() as usize;
            if idx <= nmax {
                c[idx] += 2.0 * sign * r * (-(n as f64) * eta).exp() / n as f64;
            }
        }
    }
    c
}

#[test]
fn reindexing_matches_brute_force_double_sum() {
    for p in 0..=4 {
        for &eta in &[0.5, 1.0, 2.0] {
            let brute = brute_force_log_series(p, eta, 400, 30);
            let table = log_series_algebraic(p, eta.cosh(), 30).unwrap();
            for (n, (b, t)) in brute.iter().zip(&table.coeffs).enumerate() {
                assert!((b - t).abs() <= 1e-10, "p={p} eta={eta} n={n}: {b} vs {t}");
            }
        }
    }
}

/// `P_nu^m(z)` for positive integer order and real degree, from the
/// negative-order Gauss series: `P_nu^m = (nu-m+1)_{2m} P_nu^{-m}`.
fn p_nu_positive_order(nu: f64, m: usize, z: f64) -> f64 {
    pochhammer(nu - m as f64 + 1.0, 2 * m as u32) * legendre_p_nu(nu, -(m as i64), z).unwrap()
}

#[test]
fn degree_derivative_matches_finite_difference() {
    let z = 2.0;
    let h = 1e-5;
    for p in 0..=4usize {
        for m in 0..=4usize {
            let fd = (p_nu_positive_order(p as f64 + h, m, z) - p_nu_positive_order(p as f64 - h, m, z)) / (2.0 * h);
            let exact = legendre_deg_deriv(p, m, z).unwrap();
            assert!(rel(fd, exact) < 1e-6, "p={p} m={m}: fd {fd} vs {exact}");
        }
    }
}

#[test]
fn log_series_limit_matches_nu_derivative() {
    // coth(eta) = 2
    let z = 2.0f64;
    let eta = (1.0 / z).atanh();
    let chi = eta.cosh();
    let h = 1e-5;
    let coeff = |nu: f64, n: usize| {
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        eta.sinh().powf(nu) * sign * neumann(n) / pochhammer(nu + 1.0, n as u32) * p_nu_positive_order(nu, n, z)
    };
    for p in 0..=3usize {
        let table = log_series_limit(p, chi, 10).unwrap();
        for n in 0..=10 {
            let pf = p as f64;
            let fd = (coeff(pf + h, n) - coeff(pf - h, n)) / (2.0 * h);
            assert!(
                rel(fd, table.coeffs[n]) < 1e-6,
                "p={p} n={n}: fd {fd} vs {}",
                table.coeffs[n]
            );
        }
    }
}

#[test]
fn legendre_matches_laplace_integral() {
    // P_p^m(z) = (p+1)_m / (2 pi) int_0^{2 pi} (z + sqrt(z^2-1) cos t)^p cos(m t) dt,
    // exact for the trapezoid rule with more than p + m nodes
    let nodes = 64;
    for &z in &[1.01, 1.5, 2.0, 5.0, 50.0] {
        let s = ((z - 1.0) * (z + 1.0f64)).sqrt();
        for p in 0..=12usize {
            for m in 0..=(p + 2) {
                let integral: f64 = (0..nodes)
                    .map(|j| {
                        let t = 2.0 * PI * j as f64 / nodes as f64;
                        (z + s * t.cos()).powi(p as i32) * (m as f64 * t).cos()
                    })
                    .sum::<f64>()
                    / nodes as f64;
                let oracle = pochhammer(p as f64 + 1.0, m as u32) * integral;
                let value = legendre_p(p, m as i64, z).unwrap();
                let scale = pochhammer(p as f64 + 1.0, m as u32) * (z + s).powi(p as i32);
                assert!(
                    (value - oracle).abs() <= 1e-13 * scale,
                    "p={p} m={m} z={z}: {value} vs {oracle}"
                );
            }
        }
    }
}

#[test]
fn negative_order_matches_gauss_series() {
    for &z in &[1.05, 1.5, 2.0, 2.9] {
        for p in 0..=8usize {
            for m in 0..=12usize {
                let a = legendre_p(p, -(m as i64), z).unwrap();
                let b = legendre_p_nu(p as f64, -(m as i64), z).unwrap();
                assert!(rel(a, b) < 1e-12, "p={p} m={m} z={z}");
            }
        }
    }
}

fn sup_error(p: usize, eta: f64, nmax: usize) -> f64 {
    let chi = eta.cosh();
    let table = log_series_limit(p, chi, nmax).unwrap();
    (0..128)
        .map(|j| {
            let psi = PI * j as f64 / 127.0;
            let half = (0.5 * psi).sin();
            let base = (chi - 1.0) + 2.0 * half * half;
            (table.evaluate(psi) - base.powi(p as i32) * base.ln()).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn partial_sums_converge_at_rate_e_minus_eta() {
    // with eta = log(2)/2, two more terms should halve the error
    let eta = LN_2 / 2.0;
    for p in 0..=2 {
        for nmax in [30, 40] {
            let ratio = sup_error(p, eta, nmax) / sup_error(p, eta, nmax + 2);
            assert!((1.6..2.6).contains(&ratio), "p={p} N={nmax}: ratio {ratio}");
        }
    }
}
