//! Command-line front end for `lidskii-core`.
//!
//! Every subcommand writes one schema-versioned JSON report. Exit codes:
//! 0 for `success`, `certified_global` and `consistent_with_local_min`,
//! 2 for `not_local_min` and `violates_structure`, 3 for `inconclusive`,
//! 1 for usage and I/O errors.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use lidskii_core::eig_orbit::{self, CertifyOptions, Verdict};
use lidskii_core::frame::{self, FodOptions, FodRun, FrameSequence, SpecialCaseVerdict, StructureVerdict, StructureWitness};
use lidskii_core::io::{self as cio, FrameJson, MatrixJson};
use lidskii_core::linalg::{HermitianMatrix, SpectrumVector};
use lidskii_core::sv_orbit;
use lidskii_core::NormSpec;
use rayon::prelude::*;
use serde_json::{json, Value};

pub mod report;
pub mod suite;

pub use report::{Outcome, Report};

#[derive(Debug, Parser)]
#[command(name = "lidskii", version, about = "Minimizers of unitarily invariant distances over unitary orbits and frame spaces")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Numeric {
    /// schatten:P | kyfan:K | spectral | frobenius
    #[arg(long, default_value = "schatten:2")]
    pub norm: NormSpec,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Small,
    Medium,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether G0 is a local minimizer of N(S - G) on its unitary orbit.
    CertifyEig {
        #[arg(long = "S")]
        s: PathBuf,
        #[arg(long = "G0")]
        g0: PathBuf,
        /// Orbit spectrum (file or comma list); must match the spectrum of G0.
        #[arg(long)]
        mu: Option<String>,
        #[command(flatten)]
        num: Numeric,
        #[command(flatten)]
        out: Output,
    },
    /// Decide whether B is a local minimizer of N(A - C) on its singular-value orbit.
    CertifySv {
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long = "B")]
        b: PathBuf,
        #[command(flatten)]
        num: Numeric,
        #[command(flatten)]
        out: Output,
    },
    /// Simultaneous SVD of A and B when A*B and AB* are Hermitian.
    JointSvd {
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long = "B")]
        b: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Global minimizer of N(S - G) over Hermitian G with spectrum mu.
    MinEig {
        #[arg(long = "S")]
        s: PathBuf,
        #[arg(long)]
        mu: String,
        #[arg(long, default_value = "schatten:2")]
        norm: NormSpec,
        #[command(flatten)]
        out: Output,
    },
    /// Global minimizer of N(A - C) over C with singular values s.
    MinSv {
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long = "s")]
        sv: String,
        #[arg(long, default_value = "schatten:2")]
        norm: NormSpec,
        #[command(flatten)]
        out: Output,
    },
    /// Projected gradient descent on N(S - S_G) from random starts.
    FodOptimize {
        #[arg(long = "S")]
        s: PathBuf,
        /// Squared norms a_i (comma list or file).
        #[arg(long)]
        a: String,
        #[arg(long, default_value = "frobenius")]
        norm: NormSpec,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        restarts: u64,
        #[arg(long, default_value_t = 20_000)]
        max_iters: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Necessary local-minimizer conditions for a frame G.
    FodCheck {
        #[arg(long = "S")]
        s: PathBuf,
        #[arg(long = "G")]
        g: PathBuf,
        #[arg(long, default_value = "schatten:2")]
        norm: NormSpec,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Water level c with sum (lambda_i - c)^+ = t.
    WaterFill {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Seeded invariant checks across all modules.
    PropertySuite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Scale::Small)]
        scale: Scale,
        #[command(flatten)]
        out: Output,
    },
}

/// Usage or I/O failure; always exit code 1.
#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<lidskii_core::Error> for CliError {
    fn from(e: lidskii_core::Error) -> Self {
        CliError(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn check_tol(tol: f64) -> CliResult<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(CliError(format!("--tol must be positive, got {tol}")))
    }
}

fn hermitian(path: &Path, flag: &str) -> CliResult<HermitianMatrix> {
    cio::read_hermitian(path).map_err(|e| CliError(format!("--{flag}: {e}")))
}

fn general(path: &Path, flag: &str) -> CliResult<lidskii_core::GeneralMatrix> {
    cio::read_matrix(path).map_err(|e| CliError(format!("--{flag}: {e}")))
}

/// A real vector given inline (`3,2,1` or `[3,2,1]`) or as a path to a file
/// holding a JSON array.
fn vector_arg(raw: &str, flag: &str) -> CliResult<Vec<f64>> {
    let p = Path::new(raw);
    let text = if p.is_file() {
        std::fs::read_to_string(p).map_err(|e| CliError(format!("--{flag}: {}: {e}", p.display())))?
    } else {
        raw.to_string()
    };
    cio::parse_real_vector(&text).map_err(|e| CliError(format!("--{flag}: {e}")))
}

fn verdict_outcome(v: Verdict) -> Outcome {
    match v {
        Verdict::CertifiedGlobal => Outcome::CertifiedGlobal,
        Verdict::NotLocalMin => Outcome::NotLocalMin,
        Verdict::Inconclusive => Outcome::Inconclusive,
    }
}

fn value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("value serializes")
}

/// Worker pool for restarts, capped by `LIDSKII_THREADS` when set.
fn pool() -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("LIDSKII_THREADS") {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError(format!("LIDSKII_THREADS must be a positive integer, got `{raw}`")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError(format!("thread pool: {e}")))
}

fn certify_eig(s: &Path, g0: &Path, mu: Option<&str>, num: &Numeric) -> CliResult<Report> {
    check_tol(num.tol)?;
    let s_m = hermitian(s, "S")?;
    let g_m = hermitian(g0, "G0")?;
    if let Some(raw) = mu {
        let mu = vector_arg(raw, "mu")?;
        if mu.len() != g_m.dim() {
            return Err(CliError(format!("--mu has {} entries, G0 is {}x{}", mu.len(), g_m.dim(), g_m.dim())));
        }
        let res = eig_orbit::orbit_residual(&g_m, &mu);
        let scale = 1.0 + mu.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if res > num.tol * scale {
            return Err(CliError(format!("G0 is not in the orbit of --mu (spectral residual {res:.3e})")));
        }
    }
    let opts = CertifyOptions { tol: num.tol, seed: num.seed, ..Default::default() };
    let cert = eig_orbit::certify_local_eig(&num.norm, &s_m, &g_m, &opts)?;
    let params = json!({"norm": num.norm, "tol": num.tol, "seed": num.seed});
    Ok(Report::new("certify-eig", verdict_outcome(cert.verdict), params, value(&cert)))
}

fn certify_sv(a: &Path, b: &Path, num: &Numeric) -> CliResult<Report> {
    check_tol(num.tol)?;
    let a_m = general(a, "A")?;
    let b_m = general(b, "B")?;
    let opts = CertifyOptions { tol: num.tol, seed: num.seed, ..Default::default() };
    let cert = sv_orbit::certify_local_sv(&num.norm, &a_m, &b_m, &opts)?;
    let params = json!({"norm": num.norm, "tol": num.tol, "seed": num.seed});
    Ok(Report::new("certify-sv", verdict_outcome(cert.verdict), params, value(&cert)))
}

fn joint_svd(a: &Path, b: &Path, tol: f64) -> CliResult<Report> {
    check_tol(tol)?;
    let a_m = general(a, "A")?;
    let b_m = general(b, "B")?;
    let params = json!({"tol": tol});
    let (ra, rb) = sv_orbit::hermitian_residuals(&a_m, &b_m);
    match sv_orbit::joint_svd(&a_m, &b_m, tol) {
        Ok(j) => Ok(Report::new("joint-svd", Outcome::Success, params, value(&j))),
        Err(lidskii_core::Error::JointSvd(msg)) => Ok(Report::new(
            "joint-svd",
            Outcome::ViolatesStructure,
            params,
            json!({"reason": msg, "hermitian_residuals": [ra, rb]}),
        )),
        Err(e) => Err(e.into()),
    }
}

fn min_eig(s: &Path, mu: &str, norm: &NormSpec) -> CliResult<Report> {
    let s_m = hermitian(s, "S")?;
    let mu = SpectrumVector::from_unsorted(vector_arg(mu, "mu")?);
    let g = eig_orbit::global_minimizer_eig(&s_m, &mu)?;
    let phi = eig_orbit::phi(norm, &s_m, &g)?;
    let result = json!({"matrix": MatrixJson::from(g.as_matrix()), "objective": phi, "mu": mu.as_slice()});
    Ok(Report::new("min-eig", Outcome::Success, json!({"norm": norm}), result))
}

fn min_sv(a: &Path, sv: &str, norm: &NormSpec) -> CliResult<Report> {
    let a_m = general(a, "A")?;
    let s = SpectrumVector::from_unsorted(vector_arg(sv, "s")?);
    let c = sv_orbit::global_minimizer_sv(&a_m, &s)?;
    let psi = sv_orbit::psi(norm, &a_m, &c)?;
    let result = json!({"matrix": MatrixJson::from(&c), "objective": psi, "s": s.as_slice()});
    Ok(Report::new("min-sv", Outcome::Success, json!({"norm": norm}), result))
}

/// Structure report plus, when it applies, the global certificate and the
/// escape curve for a dependent cluster.
fn frame_analysis(norm: &NormSpec, s: &HermitianMatrix, g: &FrameSequence, tol: f64) -> CliResult<(Outcome, Value)> {
    let rep = frame::structure_check_local(norm, s, g, tol)?;
    let special = if g.len() >= g.dim() { Some(frame::special_case_certify(norm, s, g, tol)?) } else { None };
    let escape = match &rep.verdict {
        StructureVerdict::ViolatesStructure(StructureWitness::DependentCluster { cluster, .. }) => {
            frame::escape_move(norm, s, g, *cluster, tol)?
        }
        _ => None,
    };
    let bound = if s.eigenvalues().iter().all(|&x| x >= -tol * (1.0 + s.op_norm())) {
        let t: f64 = g.norms().iter().sum();
        Some(frame::naive_lower_bound(norm, s, t)?.0)
    } else {
        None
    };
    // with one common eigenvalue the spectrum of S_G is pinned down
    let outcome = match (&rep.verdict, special) {
        (_, Some(SpecialCaseVerdict::Violates)) | (StructureVerdict::ViolatesStructure(_), _) => Outcome::ViolatesStructure,
        _ => Outcome::ConsistentWithLocalMin,
    };
    let body = json!({
        "structure": rep,
        "special_case": special,
        "escape_curve": escape,
        "naive_lower_bound": bound,
    });
    Ok((outcome, body))
}

fn run_summary(r: &FodRun, index: usize) -> Value {
    json!({
        "restart": index,
        "seed": r.seed,
        "theta": r.trace.last().copied(),
        "grad_norm": r.grad_norm,
        "iterations": r.iterations,
        "converged": r.converged,
    })
}

#[allow(clippy::too_many_arguments)]
fn fod_optimize(s: &Path, a: &str, norm: &NormSpec, tol: f64, seed: u64, restarts: u64, max_iters: usize) -> CliResult<Report> {
    check_tol(tol)?;
    let s_m = hermitian(s, "S")?;
    let a = vector_arg(a, "a")?;
    let opts = FodOptions { norm: *norm, max_iters, ..Default::default() };
    let runs: Vec<FodRun> = pool()?.install(|| {
        (0..restarts as usize)
            .into_par_iter()
            .map(|r| frame::fod_descent(&s_m, &a, frame::restart_seed(seed, r), &opts))
            .collect::<lidskii_core::Result<Vec<_>>>()
    })?;
    let final_theta = |r: &FodRun| r.trace.last().copied().unwrap_or(f64::INFINITY);
    let (best_index, best) = runs
        .iter()
        .enumerate()
        .min_by(|x, y| final_theta(x.1).total_cmp(&final_theta(y.1)).then(x.0.cmp(&y.0)))
        .expect("at least one restart");
    let (mut outcome, analysis) = frame_analysis(norm, &s_m, &best.frame, tol)?;
    if outcome == Outcome::ViolatesStructure && !best.converged {
        outcome = Outcome::Inconclusive;
    }
    let result = json!({
        "best_restart": best_index,
        "frame": FrameJson::from(&best.frame),
        "theta": final_theta(best),
        "trace": best.trace,
        "frame_operator_spectrum": frame::frame_operator(&best.frame).eigenvalues().as_slice(),
        "runs": runs.iter().enumerate().map(|(i, r)| run_summary(r, i)).collect::<Vec<_>>(),
        "analysis": analysis,
    });
    let params = json!({"norm": norm, "tol": tol, "seed": seed, "restarts": restarts, "max_iters": max_iters, "a": a});
    Ok(Report::new("fod-optimize", outcome, params, result))
}

fn fod_check(s: &Path, g: &Path, norm: &NormSpec, tol: f64) -> CliResult<Report> {
    check_tol(tol)?;
    let s_m = hermitian(s, "S")?;
    let g = cio::read_frame(g).map_err(|e| CliError(format!("--G: {e}")))?;
    let (outcome, analysis) = frame_analysis(norm, &s_m, &g, tol)?;
    let result = json!({
        "theta": frame::theta(norm, &s_m, &g)?,
        "sphere_residual": g.sphere_residual(),
        "analysis": analysis,
    });
    Ok(Report::new("fod-check", outcome, json!({"norm": norm, "tol": tol}), result))
}

fn water_fill(lambda: &str, t: f64) -> CliResult<Report> {
    let lam = vector_arg(lambda, "lambda")?;
    let (c, spectrum) = frame::water_fill(&lam, t)?;
    let result = json!({"level": c, "spectrum": spectrum});
    Ok(Report::new("water-fill", Outcome::Success, json!({"lambda": lam, "t": t}), result))
}

/// Runs a parsed configuration.
pub fn dispatch(config: &RunConfig) -> CliResult<Report> {
    match &config.command {
        Command::CertifyEig { s, g0, mu, num, .. } => certify_eig(s, g0, mu.as_deref(), num),
        Command::CertifySv { a, b, num, .. } => certify_sv(a, b, num),
        Command::JointSvd { a, b, tol, .. } => joint_svd(a, b, *tol),
        Command::MinEig { s, mu, norm, .. } => min_eig(s, mu, norm),
        Command::MinSv { a, sv, norm, .. } => min_sv(a, sv, norm),
        Command::FodOptimize { s, a, norm, tol, seed, restarts, max_iters, .. } => {
            fod_optimize(s, a, norm, *tol, *seed, *restarts, *max_iters)
        }
        Command::FodCheck { s, g, norm, tol, .. } => fod_check(s, g, norm, *tol),
        Command::WaterFill { lambda, t, .. } => water_fill(lambda, *t),
        Command::PropertySuite { seed, scale, .. } => {
            let summary = pool()?.install(|| suite::property_suite(*seed, *scale));
            let outcome = if summary.all_passed { Outcome::Success } else { Outcome::ViolatesStructure };
            let params = json!({"seed": seed, "scale": scale.to_possible_value().map(|v| v.get_name().to_string())});
            Ok(Report::new("property-suite", outcome, params, value(&summary)))
        }
    }
}

fn out_path(config: &RunConfig) -> Option<&Path> {
    let out = match &config.command {
        Command::CertifyEig { out, .. }
        | Command::CertifySv { out, .. }
        | Command::JointSvd { out, .. }
        | Command::MinEig { out, .. }
        | Command::MinSv { out, .. }
        | Command::FodOptimize { out, .. }
        | Command::FodCheck { out, .. }
        | Command::WaterFill { out, .. }
        | Command::PropertySuite { out, .. } => out,
    };
    out.out.as_deref()
}

/// Parses `args`, runs the subcommand, writes the report and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 { write!(stdout, "{}", e.render()) } else { write!(stderr, "{}", e.render()) };
            return code;
        }
    };
    let report = match dispatch(&config) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "lidskii: error: {e}");
            return 1;
        }
    };
    let text = report.to_json();
    match out_path(&config) {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                let _ = writeln!(stderr, "lidskii: error: {}: {e}", p.display());
                return 1;
            }
        }
        None => {
            if stdout.write_all(text.as_bytes()).is_err() {
                return 1;
            }
        }
    }
    report.exit_code
}
