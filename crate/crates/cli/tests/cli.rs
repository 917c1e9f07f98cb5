use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyfourier"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// `(n, coefficient)` rows of a CSV table.
fn csv_table(text: &str) -> Vec<(String, f64)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,coefficient"));
    lines
        .map(|l| {
            let (n, c) = l.split_once(',').unwrap();
            (n.to_string(), c.parse().unwrap())
        })
        .collect()
}

#[test]
fn logpoly_csv_contains_known_coefficient() {
    let out = run(&["logpoly", "--p", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("p,k,degree,numerator,denominator\n"));
    assert!(text.lines().any(|l| l == "3,1,2,3,2"));
    assert!(text.lines().any(|l| l == "3,-1,0,3,8"));
}

#[test]
fn logpoly_json_for_p_zero() {
    let out = run(&["logpoly", "--p", "0", "--format", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 1);
    assert_eq!(entries[0]["coeffs"], serde_json::json!(["1"]));
}

#[test]
fn logpoly_p12_and_latex() {
    let out = run(&["logpoly", "--p", "12"]);
    assert!(out.status.success());
    let out = run(&["logpoly", "--p", "2", "--format", "latex"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 5);
}

#[test]
fn log_coefficient_zero_at_chi_two() {
    let out = run(&[
        "coeffs", "--kernel", "log", "--p", "0", "--chi", "2", "--nmax", "5", "--method", "limit",
    ]);
    assert!(out.status.success());
    let rows = csv_table(&stdout(&out));
    assert_eq!(rows.len(), 6);
    let eta = (2.0f64 + 3f64.sqrt()).ln();
    assert!((rows[0].1 - (eta - 2f64.ln())).abs() < 1e-15);
}

#[test]
fn inverse_power_closed_form() {
    let out = run(&[
        "coeffs", "--kernel", "inverse", "--q", "1", "--chi", "2", "--nmax", "5", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let eta = v["eta"].as_f64().unwrap();
    for (n, c) in v["coeffs"].as_array().unwrap().iter().enumerate() {
        let eps = if n == 0 { 1.0 } else { 2.0 };
        let expected = eps * (-(n as f64) * eta).exp() / eta.sinh();
        assert!(
            (c.as_f64().unwrap() - expected).abs() <= 1e-15 * expected.max(1.0),
            "n={n}"
        );
    }
    for key in ["kernel", "p", "chi", "eta", "method", "coeffs"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn algebraic_and_limit_agree() {
    let args = |m: &'static str| {
        [
            "coeffs", "--kernel", "log", "--p", "3", "--chi", "1.7", "--nmax", "30", "--method", m,
        ]
    };
    let a = csv_table(&stdout(&run(&args("algebraic"))));
    let l = csv_table(&stdout(&run(&args("limit"))));
    let o = csv_table(&stdout(&run(&args("oracle"))));
    assert_eq!(a.len(), l.len());
    for ((x, y), z) in a.iter().zip(&l).zip(&o) {
        assert_eq!(x.0, y.0);
        assert!((x.1 - y.1).abs() <= 1e-9 * x.1.abs().max(1e-3), "n={}", x.0);
        assert!((x.1 - z.1).abs() <= 1e-8 * x.1.abs().max(1e-3), "n={}", x.0);
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["coeffs", "--kernel", "power", "--p", "4", "--chi", "3", "--nmax", "8"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn greens_unit_distance_in_the_plane() {
    let out = run(&["greens", "--d", "2", "--k", "1", "--x", "1,0", "--xp", "0,0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "value,0.0000000000000000e0"), "{text}");
    assert!(text.lines().any(|l| l == "distance,1.0000000000000000e0"));
}

#[test]
fn greens_reconstruction_within_tolerance() {
    for (d, k, x, xp) in [
        ("2", "2", "2,1", "-1,0.5"),
        ("4", "2", "1,0,0.3,0", "0,2,0,0.1"),
        ("6", "1", "1,0,0,0,0,0", "0,3,0,0,1,0"),
    ] {
        let out = run(&[
            "greens", "--d", d, "--k", k, "--x", x, "--xp", xp, "--tol", "1e-10", "--format", "json",
        ]);
        assert!(
            out.status.success(),
            "d={d} k={k}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert!(v["reconstruction_error"].as_f64().unwrap() <= 1e-10);
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["coeffs", "--kernel", "log", "--q", "1", "--chi", "2"][..],
        &["coeffs", "--kernel", "inverse", "--p", "1", "--chi", "2"],
        &["coeffs", "--kernel", "log", "--p", "1", "--chi", "0.5"],
        &["coeffs", "--kernel", "log", "--p", "1"],
        &["greens", "--d", "2", "--k", "0", "--x", "1,0", "--xp", "0,1"],
        &["greens", "--d", "3", "--k", "1", "--x", "1,0", "--xp", "0,1"],
        &["validate", "--pmax", "13"],
        &["logpoly", "--p", "-1"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn validate_exit_codes() {
    let out = run(&["validate", "--pmax", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("identity,p,n,eta,abs_err,rel_err,pass\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));

    let out = run(&["validate", "--pmax", "3", "--eta", "0.2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));

    // an unreachable tolerance fails, with the reports still emitted
    let out = run(&["validate", "--pmax", "2", "--eta", "1", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).lines().any(|l| l.ends_with(",false")));
}

#[test]
fn oracle_non_convergence_exits_three() {
    let out = run(&[
        "coeffs",
        "--kernel",
        "log",
        "--p",
        "0",
        "--chi",
        "1.0000000001",
        "--nmax",
        "5",
        "--method",
        "oracle",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}
