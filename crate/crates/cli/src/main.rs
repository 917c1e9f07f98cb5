// `!(x > a)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Number, Value};

use polyfourier::greens::{greens_eval, hii_direct, hii_expansion, li_direct, li_expansion};
use polyfourier::logpoly::{logpoly_difference_algorithm, logpoly_from_genfun, logpoly_recurrence};
use polyfourier::series::{
    auto_truncation, inverse_power_series, log_series_algebraic, log_series_limit, power_series,
};
use polyfourier::validation::{quad_fourier_table, run_grid, GridConfig, QuadKernel, ValidationReport};
use polyfourier::{Error, FourierCoeffTable, Geometry, Kernel, LogPolynomial, Method, Regime, SolutionParams};

#[derive(Parser)]
#[command(
    name = "polyfourier",
    version,
    about = "Azimuthal Fourier expansions of polyharmonic fundamental solutions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the logarithmic polynomials R_p^k for k = -p..=p.
    Logpoly {
        #[arg(long)]
        p: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Cosine coefficients of (chi - cos psi)^p, (chi - cos psi)^-q or (chi - cos psi)^p log(chi - cos psi).
    Coeffs {
        #[arg(long, value_enum)]
        kernel: KernelArg,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        chi: f64,
        #[arg(long, default_value_t = 20)]
        nmax: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Limit)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Evaluate a fundamental solution and its azimuthal expansion.
    Greens {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        /// Field point, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        /// Source point, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        xp: Vec<f64>,
        /// Truncation order; chosen from --tol when omitted.
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Algebraic)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run the identity, cross-route and quadrature checks.
    Validate {
        #[arg(long, default_value_t = 10)]
        pmax: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eta: Option<Vec<f64>>,
        #[arg(long, default_value_t = polyfourier::validation::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Latex,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    Power,
    Inverse,
    Log,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Algebraic,
    Limit,
    Oracle,
}

const MAX_VALIDATE_P: usize = 12;

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Outcome of a command that ran to completion: the text to emit and
/// whether the result passed its own checks.
struct Emission {
    text: String,
    ok: bool,
}

fn num(x: f64) -> String {
    // + 0.0 folds -0 into 0
    format!("{:.16e}", x + 0.0)
}

fn json_num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(num(x).parse::<Number>().expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn cmd_logpoly(p: usize, format: Format) -> Result<Emission, Failure> {
    let row = logpoly_difference_algorithm(p);
    let pi = p as i64;
    for (poly, k) in row.iter().zip(-pi..=pi) {
        let rec = logpoly_recurrence(p, k)?;
        let gen = logpoly_from_genfun(p, k)?;
        if rec.coeffs() != poly.coeffs() || gen.coeffs() != poly.coeffs() {
            return Err(Failure {
                code: 1,
                message: format!("construction paths disagree for R_{p}^{k}"),
            });
        }
    }
    let text = match format {
        Format::Csv => {
            let mut s = String::from("p,k,degree,numerator,denominator\n");
            for m in row.iter().flat_map(LogPolynomial::monomials) {
                let _ = writeln!(s, "{},{},{},{},{}", m.p, m.k, m.degree, m.numerator, m.denominator);
            }
            s
        }
        Format::Json => {
            let entries: Vec<Value> = row
                .iter()
                .map(|poly| {
                    let coeffs: Vec<String> = poly.coeffs().iter().map(|c| c.to_string()).collect();
                    json!({"p": poly.p(), "k": poly.k(), "coeffs": coeffs})
                })
                .collect();
            render_json(&Value::Array(entries))
        }
        Format::Latex => row.iter().map(|poly| poly.to_latex() + "\n").collect(),
    };
    Ok(Emission { text, ok: true })
}

fn coeff_table(
    kernel: KernelArg,
    p: Option<usize>,
    q: Option<usize>,
    chi: f64,
    nmax: usize,
    method: MethodArg,
) -> Result<FourierCoeffTable, Failure> {
    let param = match (kernel, p, q) {
        (KernelArg::Inverse, None, Some(q)) => {
            if q == 0 {
                return Err(Failure::usage("--q must be at least 1"));
            }
            q
        }
        (KernelArg::Inverse, _, _) => return Err(Failure::usage("the inverse kernel takes --q (and not --p)")),
        (_, Some(p), None) => p,
        (_, _, _) => return Err(Failure::usage("the power and log kernels take --p (and not --q)")),
    };
    if !(chi > 1.0) || !chi.is_finite() {
        return Err(Failure::usage(format!("--chi must be a finite number > 1, got {chi}")));
    }

    let mut table = if method == MethodArg::Oracle {
        let (qk, kind) = match kernel {
            KernelArg::Power => (QuadKernel::Power { p: param, chi }, Kernel::Power),
            KernelArg::Inverse => (QuadKernel::InversePower { q: param, chi }, Kernel::InversePower),
            KernelArg::Log => (QuadKernel::Log { p: param, chi }, Kernel::Log),
        };
        let coeffs = quad_fourier_table(qk, nmax, 64)?;
        let eta = polyfourier::scalar::eta_from_chi(chi)?;
        FourierCoeffTable::new(kind, param, chi, eta, Method::Oracle, coeffs)
    } else {
        match kernel {
            KernelArg::Power => power_series(param, chi)?,
            KernelArg::Inverse => inverse_power_series(param, chi, nmax)?,
            KernelArg::Log => {
                let n = nmax.max(param + 1);
                if method == MethodArg::Algebraic {
                    log_series_algebraic(param, chi, n)?
                } else {
                    log_series_limit(param, chi, n)?
                }
            }
        }
    };
    // the power kernel's coefficients vanish past n = p
    table.coeffs.resize(nmax + 1, 0.0);
    Ok(table)
}

fn table_json(table: &FourierCoeffTable) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("kernel".into(), json!(table.kernel.to_string()));
    m.insert("p".into(), json!(table.param));
    m.insert("chi".into(), json_num(table.chi));
    m.insert("eta".into(), json_num(table.eta));
    m.insert("method".into(), json!(table.method.to_string()));
    m.insert(
        "coeffs".into(),
        Value::Array(table.coeffs.iter().map(|&c| json_num(c)).collect()),
    );
    m
}

fn table_csv(table: &FourierCoeffTable) -> String {
    let mut s = String::from("n,coefficient\n");
    for (n, c) in table.coeffs.iter().enumerate() {
        let _ = writeln!(s, "{n},{}", num(*c));
    }
    s
}

fn cmd_coeffs(
    kernel: KernelArg,
    p: Option<usize>,
    q: Option<usize>,
    chi: f64,
    nmax: usize,
    method: MethodArg,
    format: Format,
) -> Result<Emission, Failure> {
    let table = coeff_table(kernel, p, q, chi, nmax, method)?;
    if table.ill_conditioned {
        eprintln!("warning: eta = {} is below 0.2; expect reduced accuracy", table.eta);
    }
    let text = match format {
        Format::Csv => table_csv(&table),
        Format::Json => render_json(&Value::Object(table_json(&table))),
        Format::Latex => return Err(Failure::usage("coeffs supports csv and json output")),
    };
    Ok(Emission { text, ok: true })
}

struct Expansion {
    table: FourierCoeffTable,
    reconstruction_error: f64,
    auto: bool,
}

/// `None` when no azimuthal expansion exists: odd dimension, or a point on
/// the axis.
fn expand(
    params: &SolutionParams,
    x: &[f64],
    xp: &[f64],
    nmax: Option<usize>,
    tol: f64,
    method: MethodArg,
) -> Result<Option<Expansion>, Failure> {
    let geom = match Geometry::from_points(x, xp) {
        Ok(g) => g,
        Err(e @ Error::DegenerateGeometry(_)) => {
            eprintln!("note: no azimuthal expansion: {e}");
            return Ok(None);
        }
        Err(e) => return Err(e.into()),
    };
    let (table, direct) = match params.regime() {
        Regime::Log { p } => {
            let method = match method {
                MethodArg::Algebraic => Method::Algebraic,
                MethodArg::Limit => Method::Limit,
                MethodArg::Oracle => return Err(Failure::usage("greens expands with the algebraic or limit method")),
            };
            let n = nmax.unwrap_or_else(|| auto_truncation(p, geom.eta(), tol));
            (li_expansion(params, &geom, n, method)?, li_direct(params, x, xp)?)
        }
        Regime::Power { q } => {
            let n = nmax.unwrap_or_else(|| auto_truncation(q, geom.eta(), tol));
            (hii_expansion(params, &geom, n)?, hii_direct(params, x, xp)?)
        }
        Regime::OddDimension => {
            eprintln!("note: no azimuthal expansion in odd dimension {}", params.d);
            return Ok(None);
        }
    };
    let series = table.evaluate(geom.delta_phi());
    // relative to the size of the summed terms, since li changes sign
    let scale = direct.abs().max(table.coeffs.iter().map(|c| c.abs()).sum::<f64>());
    let reconstruction_error = if scale > 0.0 {
        (series - direct).abs() / scale
    } else {
        0.0
    };
    Ok(Some(Expansion {
        table,
        reconstruction_error,
        auto: nmax.is_none(),
    }))
}

#[allow(clippy::too_many_arguments)]
fn cmd_greens(
    d: usize,
    k: usize,
    x: &[f64],
    xp: &[f64],
    nmax: Option<usize>,
    tol: f64,
    method: MethodArg,
    format: Format,
) -> Result<Emission, Failure> {
    if x.len() != d || xp.len() != d {
        return Err(Failure::usage(format!("--x and --xp need {d} components each")));
    }
    if !(tol > 0.0) {
        return Err(Failure::usage("--tol must be positive"));
    }
    let params = SolutionParams::new(d, k)?;
    let value = greens_eval(&params, x, xp)?;
    let distance = x.iter().zip(xp).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();

    let expansion = expand(&params, x, xp, nmax, tol, method)?;
    let mut ok = true;
    if let Some(e) = &expansion {
        if e.reconstruction_error > tol {
            eprintln!(
                "warning: reconstruction error {:e} exceeds --tol {tol:e}",
                e.reconstruction_error
            );
            ok = !e.auto;
        }
    }

    let text = match format {
        Format::Csv => {
            let mut s = String::from("field,value\n");
            let _ = writeln!(s, "value,{}", num(value));
            let _ = writeln!(s, "distance,{}", num(distance));
            if let Some(e) = &expansion {
                let _ = writeln!(s, "chi,{}", num(e.table.chi));
                let _ = writeln!(s, "eta,{}", num(e.table.eta));
                let _ = writeln!(s, "nmax,{}", e.table.nmax());
                let _ = writeln!(s, "reconstruction_error,{}", num(e.reconstruction_error));
                s.push('\n');
                s.push_str(&table_csv(&e.table));
            }
            s
        }
        Format::Json => {
            let mut m = Map::new();
            m.insert("d".into(), json!(d));
            m.insert("k".into(), json!(k));
            m.insert("value".into(), json_num(value));
            m.insert("distance".into(), json_num(distance));
            match &expansion {
                Some(e) => {
                    m.insert("table".into(), Value::Object(table_json(&e.table)));
                    m.insert("reconstruction_error".into(), json_num(e.reconstruction_error));
                }
                None => {
                    m.insert("table".into(), Value::Null);
                    m.insert("reconstruction_error".into(), Value::Null);
                }
            }
            render_json(&Value::Object(m))
        }
        Format::Latex => return Err(Failure::usage("greens supports csv and json output")),
    };
    Ok(Emission { text, ok })
}

fn cmd_validate(pmax: usize, etas: Option<Vec<f64>>, tol: f64, format: Format) -> Result<Emission, Failure> {
    if pmax > MAX_VALIDATE_P {
        return Err(Failure::usage(format!("--pmax is limited to {MAX_VALIDATE_P}")));
    }
    let mut cfg = GridConfig {
        pmax,
        tol,
        ..GridConfig::default()
    };
    if let Some(etas) = etas {
        if etas.is_empty() || etas.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
            return Err(Failure::usage("--eta values must be positive and finite"));
        }
        cfg.etas = etas;
    }
    let reports = run_grid(&cfg)?;
    let failures = reports.iter().filter(|r| !r.pass).count();
    if failures > 0 {
        eprintln!("{failures} of {} checks failed", reports.len());
    }
    let text = match format {
        Format::Csv => {
            let mut s = String::from("identity,p,n,eta,abs_err,rel_err,pass\n");
            for r in &reports {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    r.identity_id,
                    r.p,
                    r.n,
                    num(r.eta),
                    num(r.abs_err),
                    num(r.rel_err),
                    r.pass
                );
            }
            s
        }
        Format::Json => render_json(&Value::Array(reports.iter().map(report_json).collect())),
        Format::Latex => return Err(Failure::usage("validate supports csv and json output")),
    };
    Ok(Emission {
        text,
        ok: failures == 0,
    })
}

fn report_json(r: &ValidationReport) -> Value {
    json!({
        "identity": r.identity_id.to_string(),
        "p": r.p,
        "n": r.n,
        "eta": json_num(r.eta),
        "lhs": json_num(r.lhs),
        "rhs": json_num(r.rhs),
        "abs_err": json_num(r.abs_err),
        "rel_err": json_num(r.rel_err),
        "tol": json_num(r.tol),
        "pass": r.pass,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Logpoly { p, format } => cmd_logpoly(p, format),
        Command::Coeffs {
            kernel,
            p,
            q,
            chi,
            nmax,
            method,
            format,
        } => cmd_coeffs(kernel, p, q, chi, nmax, method, format),
        Command::Greens {
            d,
            k,
            x,
            xp,
            nmax,
            tol,
            method,
            format,
        } => cmd_greens(d, k, &x, &xp, nmax, tol, method, format),
        Command::Validate { pmax, eta, tol, format } => cmd_validate(pmax, eta, tol, format),
    };
    match result {
        Ok(emission) => {
            print!("{}", emission.text);
            if emission.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
