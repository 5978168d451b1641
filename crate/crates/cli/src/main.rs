mod config;

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use asymtop::lambda_rep::delta_j;
use asymtop::spectra::{lambda_eigenbasis, spectrum};
use asymtop::verify::{run_check, Check, CheckReport, VerifyConfig};
use asymtop::wavefunctions::{kernel_eval, psi_eval_state};
use asymtop::{ComplexQ, EnergyLevel, EulerAngles, Route};
use clap::{value_parser, Arg, ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use config::{tol_flag, Format, RunConfig, Settings};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_DISAGREEMENT: u8 = 2;
const EXIT_INVALID: u8 = 3;

/// Energy levels and wavefunctions of the quantum asymmetric top.
#[derive(Parser, Debug)]
#[command(name = "asymtop", version)]
struct Cli {
    #[command(flatten)]
    shared: Shared,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Shared {
    /// Largest rotational constant.
    #[arg(long = "A", id = "A", global = true)]
    a: Option<f64>,
    /// Middle rotational constant.
    #[arg(long = "B", id = "B", global = true)]
    b: Option<f64>,
    /// Smallest rotational constant.
    #[arg(long = "C", id = "C", global = true)]
    c: Option<f64>,
    /// Largest j [default: 4].
    #[arg(long, global = true)]
    jmax: Option<u32>,
    /// Comma-separated subset of wigner,lambda,lame [default: all].
    #[arg(long, global = true)]
    routes: Option<String>,
    /// Output format [default: csv].
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Seed for sampled checks [default: 42].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sets every tolerance.
    #[arg(long = "tol-all", id = "tol_all", value_name = "TOL", global = true)]
    tol_all: Option<f64>,
    /// key=value file with the same names as the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Level table for every j up to jmax, one column per route.
    Levels,
    /// Wavefunction on a grid_n^3 Euler-angle grid.
    Wave {
        #[arg(long)]
        j: u32,
        #[arg(long, allow_negative_numbers = true)]
        s: i32,
        #[arg(long = "q-re", allow_negative_numbers = true)]
        q_re: f64,
        #[arg(long = "q-im", allow_negative_numbers = true, default_value_t = 0.0)]
        q_im: f64,
        #[arg(long = "grid-n", default_value_t = 8)]
        grid_n: usize,
    },
    /// Runs the verification checks.
    Verify,
    /// Kernel value at one point.
    Kernel {
        #[arg(long)]
        j: u32,
        #[arg(long = "q-re", allow_negative_numbers = true)]
        q_re: f64,
        #[arg(long = "q-im", allow_negative_numbers = true, default_value_t = 0.0)]
        q_im: f64,
        #[arg(long = "qp-re", allow_negative_numbers = true)]
        qp_re: f64,
        #[arg(long = "qp-im", allow_negative_numbers = true, default_value_t = 0.0)]
        qp_im: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        phi: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        psi: f64,
        /// Also print the value at the identity next to delta_j.
        #[arg(long)]
        check_identity: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INVALID, message: message.into() }
    }
}

fn command() -> clap::Command {
    let mut cmd = Cli::command();
    for check in Check::ALL {
        cmd = cmd.arg(
            Arg::new(check.name())
                .long(tol_flag(check))
                .global(true)
                .value_name("TOL")
                .value_parser(value_parser!(f64))
                .help(format!("Tolerance for {check} [default: {:e}]", check.default_tolerance())),
        );
    }
    cmd
}

fn main() -> ExitCode {
    let matches = match command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INVALID) } else { ExitCode::SUCCESS };
        }
    };
    match run(&matches) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(matches: &ArgMatches) -> Result<u8, Failure> {
    let cli = Cli::from_arg_matches(matches).map_err(|e| Failure::invalid(e.to_string()))?;
    let sub = matches.subcommand().map(|(_, m)| m).unwrap_or(matches);
    let file = match &cli.shared.config {
        Some(path) => Settings::from_file(path).map_err(Failure::invalid)?,
        None => Settings::default(),
    };
    let cfg = Settings::resolve(file, Settings::from_matches(sub)).map_err(Failure::invalid)?;
    let mut out = String::new();
    let code = match cli.command {
        Command::Levels => levels(&cfg, &mut out)?,
        Command::Wave { j, s, q_re, q_im, grid_n } => wave(&cfg, j, s, ComplexQ::new(q_re, q_im), grid_n, &mut out)?,
        Command::Verify => verify(&cfg, &mut out),
        Command::Kernel { j, q_re, q_im, qp_re, qp_im, phi, theta, psi, check_identity } => {
            let g = EulerAngles::new(phi, theta, psi);
            kernel(&cfg, j, ComplexQ::new(q_re, q_im), ComplexQ::new(qp_re, qp_im), g, check_identity, &mut out)?
        }
    };
    let mut stdout = io::stdout().lock();
    stdout
        .write_all(out.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| Failure { code: EXIT_CHECK_FAILED, message: e.to_string() })?;
    Ok(code)
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json_text(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

#[derive(Debug, Serialize)]
struct LevelRow {
    j: u32,
    s: i32,
    class: Option<u8>,
    #[serde(rename = "E_wigner")]
    e_wigner: Option<f64>,
    #[serde(rename = "E_lambda")]
    e_lambda: Option<f64>,
    #[serde(rename = "E_lame")]
    e_lame: Option<f64>,
    max_disagreement: f64,
}

fn levels(cfg: &RunConfig, out: &mut String) -> Result<u8, Failure> {
    let mut routes = cfg.routes.clone();
    if routes.contains(&Route::Lame) && !cfg.params.is_strict() {
        eprintln!("warning: A, B, C are not pairwise distinct; the lame column is left empty");
        routes.retain(|r| *r != Route::Lame);
    }
    let p = cfg.params;
    let tables: Vec<Vec<Vec<EnergyLevel>>> = (0..=cfg.jmax)
        .into_par_iter()
        .map(|j| routes.iter().map(|&r| spectrum(j, &p, r)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::invalid(e.to_string()))?;

    let tol = cfg.tolerances.get(Check::RouteAgreement);
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for (j, per_route) in (0..=cfg.jmax).zip(&tables) {
        for k in 0..(2 * j + 1) as usize {
            let get = |route| routes.iter().position(|r| *r == route).map(|i| per_route[i][k].energy);
            let values: Vec<f64> = routes.iter().enumerate().map(|(i, _)| per_route[i][k].energy).collect();
            let mut d = 0.0f64;
            for (a, x) in values.iter().enumerate() {
                for y in &values[a + 1..] {
                    d = d.max((x - y).abs() / x.abs().max(y.abs()).max(p.a));
                }
            }
            worst = worst.max(d);
            let class = routes
                .iter()
                .position(|r| *r == Route::Lame)
                .and_then(|i| per_route[i][k].lame_class)
                .map(|c| c.number());
            rows.push(LevelRow {
                j,
                s: k as i32 - j as i32,
                class,
                e_wigner: get(Route::Wigner),
                e_lambda: get(Route::Lambda),
                e_lame: get(Route::Lame),
                max_disagreement: d,
            });
        }
    }

    match cfg.format {
        Format::Csv => {
            out.push_str("j,s,class,E_wigner,E_lambda,E_lame,max_disagreement\n");
            for r in &rows {
                let class = r.class.map(|c| c.to_string()).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.j,
                    r.s,
                    class,
                    opt_float(r.e_wigner),
                    opt_float(r.e_lambda),
                    opt_float(r.e_lame),
                    float(r.max_disagreement)
                );
            }
        }
        Format::Json => out.push_str(&json_text(&rows)),
    }
    if worst > tol {
        eprintln!("routes disagree: max relative disagreement {worst:e} exceeds {tol:e}");
        return Ok(EXIT_DISAGREEMENT);
    }
    Ok(0)
}

#[derive(Debug, Serialize)]
struct WaveRow {
    phi: f64,
    theta: f64,
    psi: f64,
    re: f64,
    im: f64,
}

fn wave(cfg: &RunConfig, j: u32, s: i32, q: ComplexQ, grid_n: usize, out: &mut String) -> Result<u8, Failure> {
    if s.unsigned_abs() > j {
        return Err(Failure::invalid(format!("need |s| <= j, got j = {j}, s = {s}")));
    }
    if grid_n < 2 {
        return Err(Failure::invalid(format!("grid_n must be at least 2, got {grid_n}")));
    }
    if !(q.alpha.is_finite() && q.beta.is_finite()) {
        return Err(Failure::invalid("q must be finite"));
    }
    let basis = lambda_eigenbasis(j, &cfg.params);
    let state = basis.state(s).map_err(|e| Failure::invalid(e.to_string()))?;
    let n = grid_n as f64;
    let rows: Vec<WaveRow> = (0..grid_n * grid_n)
        .into_par_iter()
        .flat_map_iter(|ab| {
            let phi = TAU * (ab / grid_n) as f64 / n;
            let theta = PI * ((ab % grid_n) as f64 + 0.5) / n;
            (0..grid_n).map(move |c| {
                let psi = TAU * c as f64 / n;
                let v: Complex64 = psi_eval_state(q, state, &EulerAngles::new(phi, theta, psi));
                WaveRow { phi, theta, psi, re: v.re, im: v.im }
            })
        })
        .collect();
    if rows.iter().any(|r| !(r.re.is_finite() && r.im.is_finite())) {
        return Err(Failure::invalid(format!("wavefunction overflows at Im q = {}", q.beta)));
    }
    match cfg.format {
        Format::Csv => {
            out.push_str("phi,theta,psi,re,im\n");
            for r in &rows {
                let _ = writeln!(out, "{},{},{},{},{}", float(r.phi), float(r.theta), float(r.psi), float(r.re), float(r.im));
            }
        }
        Format::Json => out.push_str(&json_text(&rows)),
    }
    Ok(0)
}

fn verify(cfg: &RunConfig, out: &mut String) -> u8 {
    let vcfg = VerifyConfig {
        params: cfg.params,
        jmax: cfg.jmax,
        routes: cfg.routes.clone(),
        seed: cfg.seed,
        tolerances: cfg.tolerances,
    };
    let reports: Vec<CheckReport> = Check::ALL.par_iter().map(|&c| run_check(&vcfg, c)).collect();
    match cfg.format {
        Format::Csv => {
            out.push_str("check,status,defect,tolerance,note\n");
            for r in &reports {
                let status = if r.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "{},{status},{},{},{}", r.check, float(r.defect), float(r.tolerance), csv_field(&r.note));
            }
        }
        Format::Json => {
            let rows: Vec<_> = reports
                .iter()
                .map(|r| {
                    json!({
                        "check": r.check.name(),
                        "passed": r.passed,
                        "defect": if r.defect.is_finite() { json!(r.defect) } else { json!(null) },
                        "tolerance": r.tolerance,
                        "note": r.note,
                    })
                })
                .collect();
            out.push_str(&json_text(&rows));
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", reports.len());
        EXIT_CHECK_FAILED
    } else {
        0
    }
}

fn kernel(
    cfg: &RunConfig,
    j: u32,
    q: ComplexQ,
    qp: ComplexQ,
    g: EulerAngles,
    check_identity: bool,
    out: &mut String,
) -> Result<u8, Failure> {
    let all = [q.alpha, q.beta, qp.alpha, qp.beta, g.phi, g.theta, g.psi];
    if all.iter().any(|x| !x.is_finite()) {
        return Err(Failure::invalid("all coordinates must be finite"));
    }
    let value = kernel_eval(q, qp, j, &g);
    let swapped = kernel_eval(qp, q, j, &g.inverse());
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Failure::invalid("kernel overflows at these arguments"));
    }
    let mut rows: Vec<(&str, Complex64)> = vec![("kernel", value), ("kernel_swapped_inverse", swapped.conj())];
    let mut defects = vec![("conj_symmetry_defect", (value - swapped.conj()).norm() / value.norm().max(1.0))];
    if check_identity {
        let at_id = kernel_eval(q, qp, j, &EulerAngles::identity());
        let delta = delta_j(q, qp, j);
        rows.push(("kernel_identity", at_id));
        rows.push(("delta_j", delta));
        defects.push(("identity_defect", (at_id - delta).norm() / delta.norm().max(1.0)));
    }
    match cfg.format {
        Format::Csv => {
            out.push_str("quantity,re,im\n");
            for (name, v) in &rows {
                let _ = writeln!(out, "{name},{},{}", float(v.re), float(v.im));
            }
            for (name, d) in &defects {
                let _ = writeln!(out, "{name},{},", float(*d));
            }
        }
        Format::Json => {
            let mut obj = serde_json::Map::new();
            for (name, v) in &rows {
                obj.insert(name.to_string(), json!({ "re": v.re, "im": v.im }));
            }
            for (name, d) in &defects {
                obj.insert(name.to_string(), json!(d));
            }
            out.push_str(&json_text(&obj));
        }
    }
    Ok(0)
}
