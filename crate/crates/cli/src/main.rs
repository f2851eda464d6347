//! `biortho` command-line front end.
//!
//! Exit status: 0 on success, 1 on input errors, 2 when a requested
//! hypothesis check has a violated precondition (the report is still written).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use biortho::biortho::OracleOptions;
use biortho::classify::{ClassifyInputs, Tolerances, DEFAULT_TOLERANCE, INTEGRAL_RELATIVE_TOLERANCE};
use biortho::decomposition::Orientation;
use biortho::metric::{parse_metric_spec_named, MetricSpec};
use biortho::report::{run_analyze, run_oracle, run_sweep, to_csv, to_json, AnalyzeTarget, RunOptions};
use biortho::zoo::{ground_truth, zoo_catalog, zoo_metric};

#[derive(Parser, Debug)]
#[command(name = "biortho", version, about = "Weyl decomposition, biorthogonal curvature and pinching checks for 4-metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze a few random interior points (or one given point).
    Analyze(AnalyzeArgs),
    /// Full midpoint-grid sweep with the integral criterion.
    Sweep(SweepArgs),
    /// Same as sweep, reporting verdicts only.
    Classify(SweepArgs),
    /// Compare closed-form extrema with the brute-force plane search.
    Oracle(OracleArgs),
    /// List built-in metrics with ground truths.
    ListZoo(ListArgs),
}

#[derive(Args, Debug)]
struct MetricArgs {
    /// Built-in metric name (see list-zoo).
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    zoo: Option<String>,
    /// Metric configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Zoo parameter override, `name=value` (repeatable).
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Swap the roles of Λ⁺ and Λ⁻.
    #[arg(long)]
    flip_orientation: bool,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Base pointwise tolerance (scaled by max(1, |s|)).
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// First Laplace eigenvalue; enables the λ1 checks.
    #[arg(long)]
    lambda1: Option<f64>,
    /// Lower Ricci bound ρ; enables the Ric ≥ ρ checks.
    #[arg(long)]
    rho: Option<f64>,
    /// Require the λ1 pinching check (fails without --lambda1).
    #[arg(long)]
    thm3: bool,
    /// Random planes per point for the plane cross-checks.
    #[arg(long, default_value_t = 100)]
    plane_samples: usize,
    /// Random seed for sample points and planes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Include wall-clock timings (makes reports non-reproducible).
    #[arg(long)]
    timings: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[command(flatten)]
    check: CheckArgs,
    /// Number of random interior points.
    #[arg(long, default_value_t = 10, conflicts_with = "at")]
    points: usize,
    /// Analyze exactly this point, `x0,x1,x2,x3`.
    #[arg(long, value_name = "X0,X1,X2,X3")]
    at: Option<String>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[command(flatten)]
    check: CheckArgs,
    /// Grid resolutions: `n` (all axes) or `a:b:c:d`, comma separated for a
    /// convergence study.
    #[arg(long, default_value = "16")]
    res: String,
    /// Per-point CSV output.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, conflicts_with = "config")]
    zoo: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    flip_orientation: bool,
    /// Random points of the metric.
    #[arg(long, default_value_t = 10)]
    points: usize,
    /// Additional random trace-free block pairs.
    #[arg(long, default_value_t = 50)]
    random: usize,
    /// Fibonacci resolution (resolution² directions per sphere).
    #[arg(long, default_value_t = 64)]
    oracle_res: usize,
    /// Search the full product grid instead of each sphere separately.
    #[arg(long)]
    full: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ListArgs {
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Error carrying its exit status.
struct Failure {
    code: u8,
    message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(f) = configure_threads() {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    let outcome = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Sweep(s) => sweep(s, false),
        Command::Classify(s) => sweep(s, true),
        Command::Oracle(o) => oracle(o),
        Command::ListZoo(l) => emit(&to_json(&zoo_catalog()), &l.out).map(|_| 0),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("BIORTHO_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| input_error(format!("BIORTHO_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| input_error(e.to_string()))
}

fn parse_params(raw: &[String]) -> Result<Vec<(String, f64)>, Failure> {
    raw.iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| input_error(format!("--param expects NAME=VALUE, got '{p}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| input_error(format!("--param {k}: '{v}' is not a number")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

struct LoadedMetric {
    spec: MetricSpec,
    source: &'static str,
    /// Closed-form `∫(s − 4 k3) dV` when the zoo knows it.
    integral_reference: Option<f64>,
}

fn load_metric(zoo: &Option<String>, config: &Option<PathBuf>, params: &[String]) -> Result<LoadedMetric, Failure> {
    let params = parse_params(params)?;
    match (zoo, config) {
        (Some(name), _) => {
            let refs: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
            let spec = zoo_metric(name, &refs).map_err(|e| input_error(e.to_string()))?;
            let gt = ground_truth(name, &refs).map_err(|e| input_error(e.to_string()))?;
            let integral_reference = gt.and_then(|g| {
                let (s, k3, vol) = (g.scalar?.value, g.k3_over_s?.value, g.volume?.value);
                Some(s * (1.0 - 4.0 * k3) * vol)
            });
            Ok(LoadedMetric {
                spec,
                source: "zoo",
                integral_reference,
            })
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("config");
            let mut spec = parse_metric_spec_named(name, &text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            for (k, v) in params {
                spec = spec
                    .with_parameter(&k, v)
                    .ok_or_else(|| input_error(format!("config declares no parameter '{k}'")))?;
            }
            Ok(LoadedMetric {
                spec,
                source: "config",
                integral_reference: None,
            })
        }
        (None, None) => Err(input_error("one of --zoo or --config is required")),
    }
}

fn orientation(flip: bool) -> Orientation {
    if flip {
        Orientation::Flipped
    } else {
        Orientation::Standard
    }
}

fn run_options(metric: &MetricArgs, check: &CheckArgs, source: &str) -> Result<RunOptions, Failure> {
    if !(check.tol > 0.0 && check.tol.is_finite()) {
        return Err(input_error("--tol must be positive"));
    }
    if check.thm3 && check.lambda1.is_none() {
        return Err(input_error("lambda1 required: the lambda1 pinching check needs --lambda1"));
    }
    for (flag, v) in [("--lambda1", check.lambda1), ("--rho", check.rho)] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(input_error(format!("{flag} must be positive")));
            }
        }
    }
    Ok(RunOptions {
        orientation: orientation(metric.flip_orientation),
        tolerances: Tolerances {
            base: check.tol,
            integral_relative: INTEGRAL_RELATIVE_TOLERANCE,
        },
        inputs: ClassifyInputs {
            lambda1: check.lambda1,
            rho: check.rho,
            thm3_requested: check.thm3,
        },
        plane_samples: check.plane_samples,
        seed: check.seed,
        timings: check.timings,
        source: source.to_string(),
    })
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_point(raw: &str) -> Result<[f64; 4], Failure> {
    let values: Vec<f64> = raw
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| input_error(format!("--at expects four comma-separated numbers, got '{raw}'")))?;
    values
        .try_into()
        .map_err(|_| input_error(format!("--at expects exactly four coordinates, got '{raw}'")))
}

fn analyze(a: AnalyzeArgs) -> Outcome {
    let m = load_metric(&a.metric.zoo, &a.metric.config, &a.metric.params)?;
    let opts = run_options(&a.metric, &a.check, m.source)?;
    let target = match &a.at {
        Some(raw) => AnalyzeTarget::At(parse_point(raw)?),
        None if a.points == 0 => return Err(input_error("--points must be at least 1")),
        None => AnalyzeTarget::Points(a.points),
    };
    let report = run_analyze(&m.spec, &target, &opts).map_err(|e| input_error(e.to_string()))?;
    emit(&to_json(&report), &a.check.out)?;
    Ok(exit_for(report.precondition_failed(), &report.precondition_violations))
}

fn exit_for(failed: bool, violations: &[biortho::classify::PreconditionViolation]) -> u8 {
    if failed {
        for v in violations.iter().filter(|v| v.requested) {
            eprintln!("precondition violated: {} requires {} at {:?} ({})", v.check, v.requirement, v.point, v.detail);
        }
        2
    } else {
        0
    }
}

fn parse_resolutions(raw: &str) -> Result<Vec<[usize; 4]>, Failure> {
    raw.split(',')
        .map(|item| {
            let parts: Vec<usize> = item
                .split(':')
                .map(|p| p.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| input_error(format!("--res: '{item}' is not a resolution")))?;
            let res = match parts.as_slice() {
                [n] => [*n; 4],
                [a, b, c, d] => [*a, *b, *c, *d],
                _ => return Err(input_error(format!("--res: '{item}' needs 1 or 4 values"))),
            };
            if res.iter().any(|&n| n < 4) {
                return Err(input_error(format!("--res: resolutions must be at least 4, got '{item}'")));
            }
            Ok(res)
        })
        .collect()
}

fn sweep(s: SweepArgs, verdicts_only: bool) -> Outcome {
    let m = load_metric(&s.metric.zoo, &s.metric.config, &s.metric.params)?;
    let opts = run_options(&s.metric, &s.check, m.source)?;
    let resolutions = parse_resolutions(&s.res)?;
    let (report, analyses) =
        run_sweep(&m.spec, &resolutions, m.integral_reference, &opts).map_err(|e| input_error(e.to_string()))?;
    if let Some(path) = &s.csv {
        fs::write(path, to_csv(&analyses)).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    }
    let failed = report.precondition_failed();
    let violations = report.precondition_violations.clone();
    let report = if verdicts_only { report.verdicts_only() } else { report };
    emit(&to_json(&report), &s.check.out)?;
    Ok(exit_for(failed, &violations))
}

fn oracle(o: OracleArgs) -> Outcome {
    if o.oracle_res < 8 {
        return Err(input_error("--oracle-res must be at least 8"));
    }
    let metric = match (&o.zoo, &o.config) {
        (None, None) => None,
        _ => Some(load_metric(&o.zoo, &o.config, &o.params)?),
    };
    let options = OracleOptions {
        resolution: o.oracle_res,
        full: o.full,
    };
    let report = run_oracle(
        metric.as_ref().map(|m| &m.spec),
        o.points,
        o.random,
        o.seed,
        options,
        orientation(o.flip_orientation),
        metric.as_ref().map_or("none", |m| m.source),
    )
    .map_err(|e| input_error(e.to_string()))?;
    emit(&to_json(&report), &o.out)?;
    Ok(0)
}
