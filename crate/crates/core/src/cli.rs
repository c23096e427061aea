//! Command-line front end: `sweep-gamma`, `sweep-alpha`, `cost-table`,
//! `bounds` and `demo`.
//!
//! Flags override values from `--config`. Exit status is 0 on success, 2 for
//! invalid flags or configuration, 3 when too few servers respond, 1 otherwise.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::analysis::{
    clamped_precision_bound, cost_table, cost_table_csv, predicted_precision, render_cost_table,
    required_upload_precision, theorem1_alpha_bound, PrecisionBudget,
};
use crate::cluster::run_cluster;
use crate::coding::{equispaced_points, NormBound, SchemeKind, SchemeSpec};
use crate::config::{parse_range, KvConfig};
use crate::error::{Error, Result};
use crate::experiments::{
    sample_unit_matrix, sweep_alpha, sweep_gamma, trial_rng, ExperimentConfig,
};
use crate::fixedpoint::{parse_rational, rational_to_f64, ExactRational, Precision};
use crate::matrix::RationalMatrix;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_THRESHOLD: i32 = 3;

const CONFIG_KEYS: &[&str] = &[
    "p",
    "N",
    "base",
    "trials",
    "seed",
    "scheme",
    "gamma",
    "alpha_max",
    "log_alpha",
    "baseline_nu",
    "guard_digits",
    "source_digits",
    "out",
    "nu",
    "nu_y",
    "delta",
    "epsilon",
    "eta_squared",
    "stragglers",
    "gamma_u",
    "gamma_y",
    "u",
    "v",
];

#[derive(Debug, Parser)]
#[command(
    name = "cdmm",
    version,
    about = "Precision-aware coded matrix multiplication simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mean absolute error versus upload precision gamma.
    SweepGamma(SweepGammaArgs),
    /// Mean absolute error versus the largest evaluation point.
    SweepAlpha(SweepAlphaArgs),
    /// Recovery threshold and communication / computation costs per scheme.
    CostTable(CostTableArgs),
    /// Precision and evaluation-point calculators.
    Bounds(BoundsArgs),
    /// One encode / compute / decode round with a full transcript.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<usize>,
    /// Number of servers.
    #[arg(long = "n")]
    n: Option<usize>,
    #[arg(long)]
    base: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// matdot, amd or repetition.
    #[arg(long)]
    scheme: Option<String>,
}

#[derive(Debug, Args)]
struct SweepCommon {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    guard_digits: Option<u32>,
    #[arg(long)]
    source_digits: Option<u32>,
    /// CSV destination; `-` for standard output.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Args)]
struct SweepGammaArgs {
    #[command(flatten)]
    sweep: SweepCommon,
    /// `a:b` inclusive or a single value.
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    alpha_max: Option<String>,
}

#[derive(Debug, Args)]
struct SweepAlphaArgs {
    #[command(flatten)]
    sweep: SweepCommon,
    #[arg(long)]
    gamma: Option<u32>,
    /// Exponents of `alpha_max = B^e`, `a:b` inclusive.
    #[arg(long, allow_hyphen_values = true)]
    log_alpha: Option<String>,
    /// Repetition baseline digits; defaults to gamma / p.
    #[arg(long)]
    baseline_nu: Option<u32>,
    #[arg(long)]
    no_baseline: bool,
}

#[derive(Debug, Args)]
struct CostTableArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    nu: Option<String>,
    /// Emit CSV instead of the aligned table.
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    nu_y: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    /// Also report the evaluation-point bound for this target error.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    eta_squared: Option<String>,
    #[arg(long)]
    base: Option<u32>,
}

#[derive(Debug, Args)]
struct DemoArgs {
    #[command(flatten)]
    common: Common,
    /// Whitespace-separated rows; random `1x3` when omitted.
    #[arg(long)]
    u: Option<PathBuf>,
    #[arg(long)]
    v: Option<PathBuf>,
    #[arg(long)]
    alpha_max: Option<String>,
    #[arg(long)]
    gamma_u: Option<u32>,
    #[arg(long)]
    gamma_y: Option<u32>,
    /// Comma-separated 1-based server ids.
    #[arg(long)]
    stragglers: Option<String>,
}

/// Run the CLI on `argv` (program name first) and return the exit status.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ThresholdViolation { .. } => EXIT_THRESHOLD,
        Error::Config { .. } | Error::Parse(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::SweepGamma(a) => cmd_sweep_gamma(a),
        Command::SweepAlpha(a) => cmd_sweep_alpha(a),
        Command::CostTable(a) => cmd_cost_table(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Demo(a) => cmd_demo(a),
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<KvConfig> {
    let cfg = match path {
        Some(p) => KvConfig::load(p)?,
        None => KvConfig::default(),
    };
    cfg.check_keys(CONFIG_KEYS)?;
    Ok(cfg)
}

fn pick<T>(flag: Option<T>, cfg: &KvConfig, key: &str, default: T) -> Result<T>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(v),
        None => Ok(cfg.get(key)?.unwrap_or(default)),
    }
}

fn pick_str(flag: Option<String>, cfg: &KvConfig, key: &str, default: &str) -> String {
    flag.or_else(|| cfg.raw(key).map(str::to_string))
        .unwrap_or_else(|| default.to_string())
}

fn flag_error(flag: &str, message: impl std::fmt::Display) -> Error {
    Error::Config {
        key: flag.to_string(),
        message: message.to_string(),
    }
}

fn rational_arg(s: &str, key: &str) -> Result<ExactRational> {
    parse_rational(s).map_err(|e| flag_error(key, e))
}

fn scheme_arg(s: &str) -> Result<SchemeKind> {
    s.parse().map_err(|e| flag_error("scheme", e))
}

fn experiment_config(sweep: &SweepCommon, cfg: &KvConfig) -> Result<ExperimentConfig> {
    let d = ExperimentConfig::default();
    let c = &sweep.common;
    let scheme = scheme_arg(&pick_str(c.scheme.clone(), cfg, "scheme", d.scheme.name()))?;
    let out = ExperimentConfig {
        scheme,
        p: pick(c.p, cfg, "p", d.p)?,
        n_servers: pick(c.n, cfg, "N", d.n_servers)?,
        base: pick(c.base, cfg, "base", d.base)?,
        trials: pick(sweep.trials, cfg, "trials", d.trials)?,
        seed: pick(c.seed, cfg, "seed", d.seed)?,
        dims: d.dims,
        guard_digits: pick(sweep.guard_digits, cfg, "guard_digits", d.guard_digits)?,
        source_digits: match sweep.source_digits {
            Some(s) => Some(s),
            None => cfg.get("source_digits")?,
        },
    };
    let out = ExperimentConfig {
        dims: (1, out.p, 1),
        ..out
    };
    out.validate()?;
    Ok(out)
}

fn write_output(dest: &str, body: &str) -> Result<()> {
    if dest == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(body.as_bytes())
            .map_err(|e| flag_error("out", e))?;
        return Ok(());
    }
    std::fs::write(Path::new(dest), body).map_err(|e| flag_error("out", format!("{dest}: {e}")))
}

fn parse_range_key(s: &str, key: &str) -> Result<Vec<i64>> {
    parse_range(s).map_err(|e| flag_error(key, e))
}

fn cmd_sweep_gamma(a: SweepGammaArgs) -> Result<()> {
    let cfg = load_config(&a.sweep.common.config)?;
    let exp = experiment_config(&a.sweep, &cfg)?;
    let gammas = parse_range_key(&pick_str(a.gamma, &cfg, "gamma", "4:16"), "gamma")?
        .into_iter()
        .map(|g| u32::try_from(g).map_err(|_| flag_error("gamma", "must be nonnegative")))
        .collect::<Result<Vec<_>>>()?;
    let alpha_max = rational_arg(
        &pick_str(a.alpha_max, &cfg, "alpha_max", "1e-4"),
        "alpha_max",
    )?;
    let out = pick_str(a.sweep.out, &cfg, "out", "-");
    let result = sweep_gamma(&exp, &gammas, &alpha_max)?;
    write_output(&out, &result.to_csv())?;
    let summary = format!(
        "sweep-gamma: {} points, {} trials each, alpha_max = {:.3e}; smallest MAE at gamma = {}",
        result.points.len(),
        exp.trials,
        rational_to_f64(&alpha_max),
        result.argmin().unwrap_or_default()
    );
    summarize(&out, &summary);
    Ok(())
}

fn cmd_sweep_alpha(a: SweepAlphaArgs) -> Result<()> {
    let cfg = load_config(&a.sweep.common.config)?;
    let exp = experiment_config(&a.sweep, &cfg)?;
    let gamma = pick(a.gamma, &cfg, "gamma", 12)?;
    let exps = parse_range_key(
        &pick_str(a.log_alpha, &cfg, "log_alpha", "-7:-1"),
        "log_alpha",
    )?
    .into_iter()
    .map(|e| i32::try_from(e).map_err(|_| flag_error("log_alpha", "exponent out of range")))
    .collect::<Result<Vec<_>>>()?;
    let baseline = if a.no_baseline {
        None
    } else {
        Some(pick(
            a.baseline_nu,
            &cfg,
            "baseline_nu",
            gamma / exp.p as u32,
        )?)
    };
    let out = pick_str(a.sweep.out, &cfg, "out", "-");
    let result = sweep_alpha(&exp, gamma, &exps, baseline)?;
    write_output(&out, &result.to_csv())?;
    let mut summary = format!(
        "sweep-alpha: gamma = {gamma}, {} trials each; smallest MAE at log10 alpha_max = {}",
        exp.trials,
        result.argmin().unwrap_or_default()
    );
    if let (Some(nu), Some(b)) = (baseline, result.baseline_mae()) {
        summary.push_str(&format!("; repetition at nu = {nu}: MAE {b:.3e}"));
    }
    summarize(&out, &summary);
    Ok(())
}

fn summarize(out: &str, line: &str) {
    if out == "-" {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

fn cmd_cost_table(a: CostTableArgs) -> Result<()> {
    let cfg = load_config(&a.config)?;
    let p = pick(a.p, &cfg, "p", 3)?;
    let nu = rational_arg(&pick_str(a.nu, &cfg, "nu", "4"), "nu")?;
    let reports = cost_table(p, &nu)?;
    if a.csv {
        print!("{}", cost_table_csv(&reports));
    } else {
        print!("{}", render_cost_table(&reports));
    }
    Ok(())
}

fn cmd_bounds(a: BoundsArgs) -> Result<()> {
    let cfg = load_config(&a.config)?;
    let p = pick(a.p, &cfg, "p", 3)?;
    let nu_y = rational_arg(&pick_str(a.nu_y, &cfg, "nu_y", "12"), "nu_y")?;
    let delta = rational_arg(&pick_str(a.delta, &cfg, "delta", "4"), "delta")?;
    let budget = PrecisionBudget::symmetric(nu_y, delta, p).map_err(|e| flag_error("nu_y", e))?;
    let nu = predicted_precision(&budget);
    println!("predicted precision: {nu}");
    println!("clamped form: {}", clamped_precision_bound(&budget));
    println!(
        "required upload precision: {}",
        required_upload_precision(&nu, p)?
    );
    let epsilon = a.epsilon.or_else(|| cfg.raw("epsilon").map(str::to_string));
    if let Some(eps) = epsilon {
        let eps = rational_arg(&eps, "epsilon")?;
        let eta_sq = rational_arg(
            &pick_str(a.eta_squared, &cfg, "eta_squared", "1"),
            "eta_squared",
        )?;
        let norm = NormBound::from_eta_squared(eta_sq).map_err(|e| flag_error("eta_squared", e))?;
        let base = pick(a.base, &cfg, "base", 10)?;
        let bound = theorem1_alpha_bound(&eps, &norm, p, base)?;
        println!("alpha bound: {:.6e}", rational_to_f64(&bound.value));
        println!("delta: {:.4}", bound.delta);
    }
    Ok(())
}

fn parse_ids(s: &str) -> Result<BTreeSet<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|e| flag_error("stragglers", format!("{t:?}: {e}")))
        })
        .collect()
}

fn read_matrix(path: &Path, key: &str) -> Result<RationalMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| flag_error(key, format!("{}: {e}", path.display())))?;
    RationalMatrix::parse_text(&text).map_err(|e| flag_error(key, e))
}

fn precision_arg(digits: u32) -> Precision {
    Precision::Digits(digits)
}

fn cmd_demo(a: DemoArgs) -> Result<()> {
    let cfg = load_config(&a.common.config)?;
    let c = &a.common;
    let scheme = scheme_arg(&pick_str(c.scheme.clone(), &cfg, "scheme", "amd"))?;
    let p = pick(
        c.p,
        &cfg,
        "p",
        if scheme == SchemeKind::Repetition {
            1
        } else {
            3
        },
    )?;
    let n = pick(c.n, &cfg, "N", scheme.recovery_threshold(p))?;
    let base = pick(c.base, &cfg, "base", 10)?;
    let seed = pick(c.seed, &cfg, "seed", 7)?;
    let gamma_u = pick(a.gamma_u, &cfg, "gamma_u", 12)?;
    let gamma_y = pick(a.gamma_y, &cfg, "gamma_y", gamma_u)?;
    let stragglers = parse_ids(&pick_str(a.stragglers.clone(), &cfg, "stragglers", ""))?;

    let mut rng = trial_rng(seed, 0);
    let u = match a.u.clone().or_else(|| cfg.raw("u").map(PathBuf::from)) {
        Some(path) => read_matrix(&path, "u")?,
        None => sample_unit_matrix(1, p * 3usize.div_ceil(p), gamma_u + 4, base, &mut rng),
    };
    let v = match a.v.clone().or_else(|| cfg.raw("v").map(PathBuf::from)) {
        Some(path) => read_matrix(&path, "v")?,
        None => sample_unit_matrix(u.cols(), 1, gamma_u + 4, base, &mut rng),
    };

    let (upload, download) = (precision_arg(gamma_u), precision_arg(gamma_y));
    let spec = match scheme {
        SchemeKind::Repetition => SchemeSpec::repetition(n, upload, download, base),
        kind => {
            let default_alpha = match kind {
                SchemeKind::Amd => "1e-4",
                _ => "1",
            };
            let alpha_max = rational_arg(
                &pick_str(a.alpha_max, &cfg, "alpha_max", default_alpha),
                "alpha_max",
            )?;
            SchemeSpec::new(
                kind,
                p,
                equispaced_points(&alpha_max, n),
                n,
                upload,
                download,
                base,
            )
        }
    }
    .map_err(|e| flag_error("scheme", e))?;

    let run = run_cluster(&u, &v, &spec, &stragglers)?;
    print!("{}", run.transcript());
    let decoded = run.decode()?;
    let truth = u.matmul(&v)?;
    println!("[decode]");
    println!("servers_used = {:?}", decoded.servers_used);
    println!("C_hat =\n{}", decoded.render(gamma_y, base)?);
    println!(
        "max_abs_error = {:.6e}",
        rational_to_f64(&decoded.c_hat.max_abs_diff(&truth)?)
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> i32 {
        cli_main(std::iter::once("cdmm").chain(args.iter().copied()))
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            run(&["bounds", "--p", "3", "--nu-y", "12", "--delta", "4"]),
            EXIT_OK
        );
        assert_eq!(run(&["cost-table", "--p", "3", "--nu", "4"]), EXIT_OK);
        assert_eq!(
            run(&["cost-table", "--p", "3", "--nu", "four"]),
            EXIT_CONFIG
        );
        assert_eq!(run(&["no-such-command"]), EXIT_CONFIG);
        assert_eq!(
            run(&[
                "demo",
                "--scheme",
                "amd",
                "--stragglers",
                "1",
                "--seed",
                "1"
            ]),
            EXIT_THRESHOLD
        );
        assert_eq!(
            run(&[
                "demo",
                "--scheme",
                "repetition",
                "--n",
                "3",
                "--stragglers",
                "2,3"
            ]),
            EXIT_OK
        );
    }

    #[test]
    fn config_file_is_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let conf = dir.path().join("run.conf");
        let out = dir.path().join("g.csv");
        std::fs::write(&conf, "trials = 3\ngamma = 4:6\nseed = 2\n").unwrap();
        let code = run(&[
            "sweep-gamma",
            "--config",
            conf.to_str().unwrap(),
            "--gamma",
            "4:5",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
        let csv = std::fs::read_to_string(&out).unwrap();
        assert_eq!(csv.lines().count(), 3);

        std::fs::write(&conf, "trials = lots\n").unwrap();
        assert_eq!(
            run(&["sweep-gamma", "--config", conf.to_str().unwrap()]),
            EXIT_CONFIG
        );
        std::fs::write(&conf, "colour = blue\n").unwrap();
        assert_eq!(
            run(&["sweep-gamma", "--config", conf.to_str().unwrap()]),
            EXIT_CONFIG
        );
    }
}
