//! Command-line front end. Exit codes: 0 success, 1 invalid input, 2 numerical failure,
//! 3 an audit (verify-stein, experiment) ran but did not pass.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::attraction::{build_sn, pareto_preset, AttractionLaw, SnConfig};
use crate::bounds::{assemble_report, BoundInputs};
use crate::error::{Error, Result};
use crate::experiments::{run_density_overlay, run_experiment, write_artifacts, ExperimentConfig, KsMode};
use crate::stable::{sample_stable, StableParams};
use crate::stein::{linspace, SteinSolution, SteinTestFn};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_AUDIT_FAILED: i32 = 3;

/// Environment fallback for `--threads`.
pub const THREADS_ENV: &str = "STABLE_STEIN_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "stable-stein",
    version,
    about = "Stable laws, explicit call-function bounds and Stein-method diagnostics",
    args_override_self = true
)]
struct Cli {
    /// Config file of `key = value` lines (`#` starts a comment); command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads, at least 1 [default: $STABLE_STEIN_THREADS or all cores].
    #[arg(long, global = true, value_name = "K")]
    threads: Option<usize>,
    /// Directory for output files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Density of S_α(σ, δ) at each y.
    Density(PointArgs),
    /// Distribution function of S_α(σ, δ) at each y.
    Cdf(PointArgs),
    /// Seeded draws from a stable law, an attraction law or its normalized sums.
    Sample(SampleArgs),
    /// E(Y - M)₊ for Y ~ S_α(σ, δ).
    Call(CallArgs),
    /// Explicit constants, rate and bounds as JSON (CSV rows for sweeps).
    Bounds(BoundsArgs),
    /// KS-rate, call-error and density experiments with CSV/JSON/SVG artifacts.
    Experiment(ExperimentArgs),
    /// Residual and regularity audit of the Stein solution for g(x) = (x - M)₊.
    VerifyStein(VerifyArgs),
}

#[derive(Debug, Args)]
struct StableArgs {
    /// Stability index α ∈ (1, 2).
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Skewness δ ∈ [-1, 1].
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    delta: f64,
    /// Scale σ > 0.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[command(flatten)]
    stable: StableArgs,
    /// Evaluation points, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    y: Vec<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    /// Symmetric Pareto: A = 1/2, δ = 0, γ = 2, L = 1/2.
    Pareto,
    /// Two-term power tails (1 ± δ)(A|x|^{-α} + b|x|^{-α-γ}).
    PowerTail,
}

#[derive(Debug, Args)]
struct LawArgs {
    /// Law of the summands.
    #[arg(long, value_enum, default_value = "pareto")]
    preset: Preset,
    /// Stability index α ∈ (1, 2).
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Tail constant A > 0 (power-tail only).
    #[arg(long = "A", default_value_t = 0.5)]
    a: f64,
    /// Skewness δ ∈ [-1, 1] (power-tail only).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    delta: f64,
    /// Second tail coefficient b (power-tail only).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    /// Decay order γ ≥ 0 of B; with --L, overrides the preset's (γ, L).
    #[arg(long)]
    gamma: Option<f64>,
    /// Constant L > 0 in |B(x)| ≤ L/|x|^γ.
    #[arg(long = "L")]
    l: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SampleFormat {
    Csv,
    Binary,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Stability index α ∈ (1, 2).
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Skewness δ ∈ [-1, 1].
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    delta: f64,
    /// Scale σ > 0 (stable draws only).
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Draw from an attraction law instead of the stable law.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Tail constant A > 0 (power-tail only).
    #[arg(long = "A", default_value_t = 0.5)]
    a: f64,
    /// Second tail coefficient b (power-tail only).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    /// Decay order γ (power-tail only).
    #[arg(long)]
    gamma: Option<f64>,
    /// Emit normalized sums S_n of n ≥ 1 summands instead of single draws.
    #[arg(long)]
    n: Option<usize>,
    /// Number of draws (or paths).
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: SampleFormat,
}

#[derive(Debug, Args)]
struct CallArgs {
    #[command(flatten)]
    stable: StableArgs,
    /// Strikes M > 0, comma separated.
    #[arg(long = "M", value_delimiter = ',', required = true)]
    m: Vec<f64>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[command(flatten)]
    law: LawArgs,
    /// Sample sizes n ≥ 1, comma separated; several values give a sweep.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<f64>,
    /// Strikes M > 0, comma separated; adds the non-uniform constants.
    #[arg(long = "M", value_delimiter = ',')]
    m: Vec<f64>,
    /// CSV rows instead of JSON.
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KsModeArg {
    /// One-sample KS against the exact stable CDF.
    Exact,
    /// Two-sample KS against --stable-paths simulated stable draws.
    Reference,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[command(flatten)]
    law: LawArgs,
    /// Sample sizes n ≥ 1.
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000,100000")]
    n_list: Vec<usize>,
    /// Paths per n [default: equal to n].
    #[arg(long, value_delimiter = ',')]
    paths_list: Vec<usize>,
    /// Strikes M > 0 for the call-error audit.
    #[arg(long = "M", value_delimiter = ',', default_value = "1,2,4")]
    m: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "exact")]
    ks_mode: KsModeArg,
    /// Stable draws for the reference KS mode.
    #[arg(long, default_value_t = 500)]
    stable_paths: usize,
    /// Cap on summand draws per cell.
    #[arg(long, default_value_t = 20_000_000_000)]
    budget: u128,
    /// Sample sizes of the density overlay.
    #[arg(long, value_delimiter = ',', default_value = "100,500,1000")]
    density_n: Vec<usize>,
    /// Paths of the density overlay; 0 skips it.
    #[arg(long, default_value_t = 8000)]
    density_paths: usize,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Stability index α ∈ (1, 2).
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Skewness δ ∈ [-1, 1].
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    delta: f64,
    /// Strike M > 0.
    #[arg(long = "M", default_value_t = 2.0)]
    m: f64,
    /// Points of the residual check.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-10,-3,-1,0,1,3,10")]
    y: Vec<f64>,
    /// Residual tolerance, relative to 1 + |g(y)|.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Half-width of the regularity window [-w, w].
    #[arg(long, default_value_t = 20.0)]
    window: f64,
    /// Points of the regularity window.
    #[arg(long, default_value_t = 801)]
    points: usize,
}

fn check_alpha_flag(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::invalid("--alpha", format!("{alpha} is outside α ∈ (1, 2)")));
    }
    Ok(())
}

fn check_delta_flag(delta: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&delta) {
        return Err(Error::invalid("--delta", format!("{delta} is outside δ ∈ [-1, 1]")));
    }
    Ok(())
}

fn check_strikes(ms: &[f64]) -> Result<()> {
    match ms.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
        Some(m) => Err(Error::invalid("--M", format!("{m} must be positive"))),
        None => Ok(()),
    }
}

fn check_stable(s: &StableArgs) -> Result<StableParams> {
    check_alpha_flag(s.alpha)?;
    check_delta_flag(s.delta)?;
    if !(s.sigma > 0.0 && s.sigma.is_finite()) {
        return Err(Error::invalid("--sigma", format!("{} must be positive", s.sigma)));
    }
    StableParams::new(s.alpha, s.sigma, s.delta)
}

fn build_law(l: &LawArgs) -> Result<AttractionLaw> {
    check_alpha_flag(l.alpha)?;
    check_delta_flag(l.delta)?;
    let law = match l.preset {
        Preset::Pareto => pareto_preset(l.alpha)?,
        Preset::PowerTail => {
            if !(l.a > 0.0 && l.a.is_finite()) {
                return Err(Error::invalid("--A", format!("{} must be positive", l.a)));
            }
            let gamma = l.gamma.ok_or_else(|| Error::invalid("--gamma", "is required for the power-tail preset"))?;
            AttractionLaw::power_tail(l.alpha, l.a, l.delta, l.b, gamma)?
        }
    };
    match (l.preset, l.gamma, l.l) {
        (_, Some(g), Some(lv)) => law.with_regime(g, lv),
        (Preset::Pareto, Some(g), None) => law.with_regime(g, 0.5),
        (_, None, Some(lv)) => {
            let g = law.gamma();
            law.with_regime(g, lv)
        }
        _ => Ok(law),
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Error::Format(e.to_string()))?;
    writeln!(out, "{s}")?;
    Ok(())
}

/// Outcome of a subcommand: exit code on success paths.
type Outcome = Result<i32>;

fn cmd_points(a: &PointArgs, cdf: bool, out: &mut dyn Write) -> Outcome {
    let p = check_stable(&a.stable)?;
    for &y in &a.y {
        if !y.is_finite() {
            return Err(Error::invalid("--y", format!("{y} is not finite")));
        }
        let v = if cdf { p.cdf(y)? } else { p.density(y)? };
        writeln!(out, "{v}")?;
    }
    Ok(EXIT_OK)
}

fn cmd_sample(a: &SampleArgs, out_dir: Option<&Path>, out: &mut dyn Write) -> Outcome {
    check_alpha_flag(a.alpha)?;
    check_delta_flag(a.delta)?;
    if a.count == 0 {
        return Err(Error::invalid("--count", "must be at least 1"));
    }
    let batch = match a.preset {
        None => {
            if a.n.is_some() {
                return Err(Error::invalid("--n", "normalized sums need --preset"));
            }
            let p = check_stable(&StableArgs {
                alpha: a.alpha,
                delta: a.delta,
                sigma: a.sigma,
            })?;
            sample_stable(&p, a.count, a.seed)?
        }
        Some(preset) => {
            let law = build_law(&LawArgs {
                preset,
                alpha: a.alpha,
                a: a.a,
                delta: a.delta,
                b: a.b,
                gamma: a.gamma,
                l: None,
            })?;
            match a.n {
                Some(0) => return Err(Error::invalid("--n", "must be at least 1")),
                Some(n) => build_sn(&SnConfig::new(law, n, a.count, a.seed))?,
                None => law.sample(a.count, a.seed)?,
            }
        }
    };
    match (a.format, out_dir) {
        (SampleFormat::Csv, None) => batch.write_csv(out)?,
        (SampleFormat::Binary, None) => return Err(Error::invalid("--out", "binary output needs an output directory")),
        (fmt, Some(dir)) => {
            fs::create_dir_all(dir)?;
            let (name, is_csv) = match fmt {
                SampleFormat::Csv => ("sample.csv", true),
                SampleFormat::Binary => ("sample.bin", false),
            };
            let path = dir.join(name);
            let f = fs::File::create(&path)?;
            if is_csv {
                batch.write_csv(f)?;
            } else {
                batch.write_binary(f)?;
            }
            writeln!(out, "{}", path.display())?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CallRow {
    #[serde(rename = "M")]
    m: f64,
    call: f64,
}

fn cmd_call(a: &CallArgs, out: &mut dyn Write) -> Outcome {
    let p = check_stable(&a.stable)?;
    check_strikes(&a.m)?;
    let rows: Vec<CallRow> = a
        .m
        .iter()
        .map(|&m| Ok(CallRow { m, call: p.call_expectation(m)? }))
        .collect::<Result<_>>()?;
    emit_json(out, &rows)?;
    Ok(EXIT_OK)
}

fn cmd_bounds(a: &BoundsArgs, out: &mut dyn Write) -> Outcome {
    let law = build_law(&a.law)?;
    if let Some(n) = a.n.iter().find(|n| !(**n >= 1.0 && n.is_finite())) {
        return Err(Error::invalid("--n", format!("{n} must be at least 1")));
    }
    check_strikes(&a.m)?;
    let strikes: Vec<Option<f64>> = if a.m.is_empty() { vec![None] } else { a.m.iter().map(|&m| Some(m)).collect() };
    let mut reports = Vec::new();
    for &n in &a.n {
        for &m in &strikes {
            reports.push(assemble_report(&BoundInputs::from_law(&law, n, m)?)?);
        }
    }
    if a.csv {
        writeln!(out, "n,M,regime,Rn,c1,c2M,c3M,uniform_bound,nonuniform_bound")?;
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        for r in &reports {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.n,
                opt(r.m),
                r.regime.label(),
                r.rn,
                r.c1,
                opt(r.c2m),
                opt(r.c3m),
                r.uniform_bound,
                opt(r.nonuniform_bound)
            )?;
        }
    } else if reports.len() == 1 {
        emit_json(out, &reports[0])?;
    } else {
        emit_json(out, &reports)?;
    }
    Ok(EXIT_OK)
}

fn cmd_experiment(a: &ExperimentArgs, out_dir: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let law = build_law(&a.law)?;
    check_strikes(&a.m)?;
    let paths = if a.paths_list.is_empty() { a.n_list.clone() } else { a.paths_list.clone() };
    let mut cfg = ExperimentConfig::new(law.clone(), a.n_list.clone(), paths, a.seed).with_strikes(a.m.clone());
    cfg.stable_paths = a.stable_paths;
    cfg.budget = a.budget;
    cfg.ks_mode = match a.ks_mode {
        KsModeArg::Exact => KsMode::ExactCdf,
        KsModeArg::Reference => KsMode::Reference,
    };
    cfg.output_dir = out_dir.map(Path::to_path_buf);
    let result = run_experiment(&cfg)?;
    let density = if a.density_paths > 0 && out_dir.is_some() {
        Some(run_density_overlay(&law, &a.density_n, a.density_paths, a.seed, a.budget)?)
    } else {
        None
    };
    if out_dir.is_some() {
        for p in write_artifacts(&cfg, &result, density.as_ref())? {
            writeln!(out, "{}", p.display())?;
        }
    } else {
        emit_json(out, &result)?;
    }
    Ok(if result.all_calls_pass() { EXIT_OK } else { EXIT_AUDIT_FAILED })
}

#[derive(Serialize)]
struct VerifyBounds {
    uniform: f64,
    nonuniform: Option<f64>,
    symmetric: Option<f64>,
}

#[derive(Serialize)]
struct VerifyPass {
    residual: bool,
    fprime: bool,
    uniform: bool,
    nonuniform: Option<bool>,
    symmetric: Option<bool>,
    all: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    alpha: f64,
    delta: f64,
    #[serde(rename = "M")]
    m: f64,
    nu: f64,
    residual_max: f64,
    fprime_sup: f64,
    fsecond_sup: f64,
    fprime_bound: f64,
    bounds: VerifyBounds,
    pass: VerifyPass,
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Outcome {
    check_alpha_flag(a.alpha)?;
    check_delta_flag(a.delta)?;
    check_strikes(&[a.m])?;
    if !(a.window > 0.0) || a.points < 2 {
        return Err(Error::invalid("--window", "needs a positive width and at least 2 points"));
    }
    let g = SteinTestFn::call(a.m)?;
    let sol = SteinSolution::new(g.clone(), a.alpha, a.delta)?;
    let mut residual_max: f64 = 0.0;
    let mut residual_ok = true;
    for &y in &a.y {
        let r = sol.residual(y)?.abs();
        residual_max = residual_max.max(r);
        residual_ok &= r <= a.tol * (1.0 + g.eval(y).abs());
    }
    let reg = sol.regularity(&linspace(-a.window, a.window, a.points))?;
    let (fp, un, nu, sy) = reg.checks(1e-4, 1e-3);
    let all = residual_ok && fp && un && nu != Some(false) && sy != Some(false);
    let report = VerifyReport {
        alpha: a.alpha,
        delta: a.delta,
        m: a.m,
        nu: sol.nu_g(),
        residual_max,
        fprime_sup: reg.fprime_sup,
        fsecond_sup: reg.fsecond_sup.max(reg.fsecond_direct_sup),
        fprime_bound: reg.bounds.fprime,
        bounds: VerifyBounds {
            uniform: reg.bounds.uniform,
            nonuniform: reg.bounds.nonuniform,
            symmetric: reg.bounds.symmetric,
        },
        pass: VerifyPass {
            residual: residual_ok,
            fprime: fp,
            uniform: un,
            nonuniform: nu,
            symmetric: sy,
            all,
        },
    };
    emit_json(out, &report)?;
    Ok(if all { EXIT_OK } else { EXIT_AUDIT_FAILED })
}

/// Parses a `key = value` config file; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("config line {}: expected `key = value`", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Format(format!("config line {}: empty key", i + 1)));
        }
        map.insert(k.trim_start_matches("--").to_string(), v.to_string());
    }
    Ok(map)
}

const SUBCOMMANDS: [&str; 7] = ["density", "cdf", "sample", "call", "bounds", "experiment", "verify-stein"];

/// Inserts config entries as flags right after the subcommand name, so later command-line
/// occurrences of the same flag override them.
fn merge_config(argv: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text = fs::read_to_string(&path).map_err(|e| Error::invalid("--config", format!("cannot read {path}: {e}")))?;
    let entries = parse_config(&text)?;
    let Some(pos) = argv.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(argv);
    };
    let mut merged: Vec<String> = argv[..=pos].to_vec();
    for (k, v) in entries {
        if k == "config" {
            continue;
        }
        match v.as_str() {
            "true" => merged.push(format!("--{k}")),
            "false" => {}
            _ => merged.push(format!("--{k}={v}")),
        }
    }
    merged.extend_from_slice(&argv[pos + 1..]);
    Ok(merged)
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    let k = match flag {
        Some(k) => Some(k),
        None => match std::env::var(THREADS_ENV) {
            Ok(s) if !s.trim().is_empty() => Some(
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::invalid("--threads", format!("{THREADS_ENV}={s} is not a count")))?,
            ),
            _ => None,
        },
    };
    if k == Some(0) {
        return Err(Error::invalid("--threads", "must be at least 1"));
    }
    Ok(k)
}

fn code_for(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_INVALID
    } else {
        EXIT_NUMERIC
    }
}

/// Runs the command line `argv` (program name first), writing results to `out` and
/// diagnostics to `err`; returns the exit code.
pub fn dispatch(argv: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return code_for(&e);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let kind = e.kind();
            if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let _ = write!(err, "{e}");
            return EXIT_INVALID;
        }
    };
    match thread_count(cli.threads) {
        Ok(Some(k)) => {
            // A second call in the same process keeps the first pool; sizes only affect speed.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
        Ok(None) => {}
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
    }
    let out_dir = cli.out.as_deref();
    let result = match &cli.command {
        Command::Density(a) => cmd_points(a, false, out),
        Command::Cdf(a) => cmd_points(a, true, out),
        Command::Sample(a) => cmd_sample(a, out_dir, out),
        Command::Call(a) => cmd_call(a, out),
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Experiment(a) => cmd_experiment(a, out_dir, out),
        Command::VerifyStein(a) => cmd_verify(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            code_for(&e)
        }
    }
}

/// Entry point of the binary.
pub fn main_from_env() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    dispatch(std::env::args().collect(), &mut stdout.lock(), &mut stderr.lock())
}
