//! Command-line front end: `synth`, `sweep` and `eval`.
//!
//! Every command is a pure function of its input files, flags and seed.
//! Seeds are required flags; there is no wall-clock default.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::classifiers::EnsembleTrainer;
use crate::data::{
    covariance_rank, estimate_stats, generate_synthetic, load_csv, synthetic_preset, write_csv,
    ClassStats, LabeledDataset, Preset, DEFAULT_LABEL_COLUMN,
};
use crate::error::{Error, Result};
use crate::evaluation::{
    cv_max_d, empirical_error, parse_estimators, sweep, CvConfig, Estimator, SweepConfig,
    TuningResult, DEFAULT_TEST_SIZE,
};
use crate::gestimate::GEstimator;

#[derive(Debug, Parser)]
#[command(
    name = "rplda",
    version,
    about = "Randomly projected LDA ensembles and their error estimates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a Gaussian two-class dataset and write it as CSV plus a JSON sidecar.
    Synth(SynthArgs),
    /// Tabulate error estimates over a grid of projection dimensions.
    Sweep(SweepArgs),
    /// Train one ensemble and report its test error next to the G-estimate.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Name of the label column in input CSV files.
    #[arg(long, default_value = DEFAULT_LABEL_COLUMN)]
    pub label_column: String,
    /// Label token that maps to class 1 (default: the larger token).
    #[arg(long)]
    pub positive_label: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Built-in statistics: spike-cov or identity-cov.
    #[arg(long, conflicts_with = "stats", required_unless_present = "stats")]
    pub preset: Option<Preset>,
    /// Population statistics as JSON (a bare stats object or a sidecar file).
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Dimension for a preset.
    #[arg(long, required_unless_present = "stats")]
    pub p: Option<usize>,
    #[arg(long)]
    pub n0: usize,
    #[arg(long)]
    pub n1: usize,
    /// Override the priors recorded with the statistics, e.g. `0.7,0.3`.
    #[arg(long)]
    pub priors: Option<String>,
    #[arg(long)]
    pub seed: u64,
    /// CSV output; the sidecar goes next to it with a `.json` extension.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Training data CSV.
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 1)]
    pub d_min: usize,
    /// Largest d (default and ceiling: rank of the pooled covariance minus 2).
    #[arg(long)]
    pub d_max: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub d_step: usize,
    /// Ensemble size for the empirical and cv columns.
    #[arg(long = "M", default_value_t = 100)]
    pub m: usize,
    /// Comma-separated subset of g, de, empirical, cv.
    #[arg(long, default_value = "g")]
    pub estimators: String,
    /// Column that picks best_d (default: g when requested).
    #[arg(long)]
    pub criterion: Option<String>,
    /// `estimated` or `known:pi0,pi1`.
    #[arg(long, default_value = "estimated")]
    pub priors: String,
    /// Population statistics JSON; needed by de, and by empirical without --test.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Held-out test CSV for the empirical column.
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Size of the synthetic test set drawn from --stats.
    #[arg(long, default_value_t = DEFAULT_TEST_SIZE)]
    pub test_size: usize,
    #[arg(long, default_value_t = 10)]
    pub cv_folds: usize,
    #[arg(long, default_value_t = 100)]
    pub cv_repeats: usize,
    /// Deal each class separately into the cross-validation folds.
    #[arg(long)]
    pub stratified: bool,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// csv or json (default: from the output extension, else csv).
    #[arg(long)]
    pub format: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub d: usize,
    #[arg(long = "M", default_value_t = 100)]
    pub m: usize,
    /// `estimated` or `known:pi0,pi1`.
    #[arg(long, default_value = "estimated")]
    pub priors: String,
    #[arg(long)]
    pub seed: u64,
    /// JSON report path (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

/// JSON written next to a synthetic dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sidecar {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    pub n0: usize,
    pub n1: usize,
    pub seed: u64,
    pub stats: ClassStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatsSummary {
    pub p: usize,
    pub n0: usize,
    pub n1: usize,
    pub pi0: f64,
    pub pi1: f64,
    pub mean_difference_norm: f64,
    pub covariance_trace: f64,
    pub covariance_rank: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub train_ms: f64,
    pub g_estimate_ms: f64,
    pub test_ms: f64,
}

/// Output of `eval`.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub d: usize,
    pub m: usize,
    pub seed: u64,
    pub n_test: usize,
    pub empirical_error: f64,
    pub g_estimate: f64,
    pub train_stats: StatsSummary,
    pub timing: Timing,
}

/// `estimated` or `known:pi0,pi1`.
pub fn parse_priors(s: &str) -> Result<Option<(f64, f64)>> {
    let s = s.trim();
    if s == "estimated" {
        return Ok(None);
    }
    let body = s.strip_prefix("known:").unwrap_or(s);
    parse_pair(body).map(Some)
}

fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::InvalidConfig(format!("expected two priors like 0.5,0.5, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok((a, b))
}

/// Population statistics from a bare stats JSON or a sidecar.
pub fn load_stats(path: &Path) -> Result<ClassStats> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)?;
    if let Some(inner) = value.get_mut("stats") {
        value = inner.take();
    }
    Ok(serde_json::from_value(value)?)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

fn set_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::InvalidConfig("--threads must be at least 1".into()));
        }
        // a pool may already exist when the CLI is driven in-process
        if rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_err()
        {
            log::debug!("global thread pool already initialized");
        }
    }
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let mut stats = match (&args.preset, &args.stats) {
        (Some(preset), None) => {
            let p = args
                .p
                .ok_or_else(|| Error::InvalidConfig("--p is required with --preset".into()))?;
            synthetic_preset(p, *preset)?
        }
        (None, Some(path)) => load_stats(path)?,
        _ => {
            return Err(Error::InvalidConfig(
                "give exactly one of --preset and --stats".into(),
            ))
        }
    };
    if let Some(priors) = &args.priors {
        let (a, b) = parse_pair(priors)?;
        stats = stats.with_priors(a, b)?;
    }
    let data = generate_synthetic(&stats, args.n0, args.n1, args.seed)?;
    write_csv(&data, &args.out)?;
    let sidecar = Sidecar {
        preset: args.preset,
        n0: args.n0,
        n1: args.n1,
        seed: args.seed,
        stats,
    };
    let side_path = args.out.with_extension("json");
    write_file(
        &side_path,
        serde_json::to_string_pretty(&sidecar)?.as_bytes(),
    )?;
    log::info!("wrote {} and {}", args.out.display(), side_path.display());
    Ok(())
}

fn output_format(args: &SweepArgs) -> Result<&'static str> {
    let fmt = match &args.format {
        Some(f) => f.to_ascii_lowercase(),
        None => match args.out.extension().and_then(|e| e.to_str()) {
            Some("json") => "json".into(),
            _ => "csv".into(),
        },
    };
    match fmt.as_str() {
        "csv" => Ok("csv"),
        "json" => Ok("json"),
        other => Err(Error::InvalidConfig(format!(
            "unknown format {other:?} (expected csv or json)"
        ))),
    }
}

/// Curve CSV: `d` followed by the requested columns in canonical order.
pub fn curve_csv(result: &TuningResult) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["d".to_string()];
    header.extend(result.estimators.iter().map(|e| e.column().to_string()));
    w.write_record(&header)?;
    for row in &result.rows {
        let mut rec = vec![row.d.to_string()];
        for &e in &result.estimators {
            rec.push(row.get(e).map_or_else(String::new, |v| v.to_string()));
        }
        w.write_record(&rec)?;
    }
    w.into_inner()
        .map_err(|e| Error::InvalidConfig(format!("csv buffer: {e}")))
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<TuningResult> {
    set_threads(args.threads)?;
    let format = output_format(args)?;
    let estimators = parse_estimators(&args.estimators)?;
    let criterion = match &args.criterion {
        Some(c) => c.parse()?,
        None if estimators.contains(&Estimator::G) => Estimator::G,
        None => estimators[0],
    };
    if args.d_step == 0 || args.d_min == 0 {
        return Err(Error::InvalidConfig(
            "--d-min and --d-step must be positive".into(),
        ));
    }
    let priors = parse_priors(&args.priors)?;
    let data = load_csv(
        &args.data,
        &args.input.label_column,
        args.input.positive_label.as_deref(),
    )?;
    let test = args
        .test
        .as_ref()
        .map(|p| {
            load_csv(
                p,
                &args.input.label_column,
                args.input.positive_label.as_deref(),
            )
        })
        .transpose()?;
    let truth = args.stats.as_deref().map(load_stats).transpose()?;
    let cv = CvConfig {
        k: args.cv_folds,
        repeats: args.cv_repeats,
        stratified: args.stratified,
        priors,
    };
    let config = SweepConfig {
        m: args.m,
        seed: args.seed,
        priors,
        truth,
        test,
        test_size: args.test_size,
        cv,
        criterion,
    };

    let rank_limit = EnsembleTrainer::from_data(&data, priors)?.max_d();
    let mut limit = rank_limit;
    if estimators.contains(&Estimator::Cv) {
        limit = limit.min(cv_max_d(
            &data,
            &cv,
            crate::seed::derive_seed(args.seed, 3),
        )?);
    }
    let d_max = match args.d_max {
        Some(d) if d > limit => {
            log::warn!("d grid clipped to {limit} (covariance rank minus 2); requested up to {d}");
            limit
        }
        Some(d) => d,
        None => limit,
    };
    let grid: Vec<usize> = (args.d_min..=d_max).step_by(args.d_step).collect();
    if grid.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "empty d grid: d-min {} exceeds the largest valid d {d_max}",
            args.d_min
        )));
    }

    let result = sweep(&data, &grid, &estimators, &config)?;
    let bytes = match format {
        "json" => serde_json::to_vec_pretty(&result)?,
        _ => curve_csv(&result)?,
    };
    write_file(&args.out, &bytes)?;
    println!("best_d={} criterion={}", result.best_d, result.criterion);
    Ok(result)
}

fn summarize(data: &LabeledDataset, stats: &ClassStats) -> StatsSummary {
    StatsSummary {
        p: data.p(),
        n0: data.n0(),
        n1: data.n1(),
        pi0: stats.pi0,
        pi1: stats.pi1,
        mean_difference_norm: stats.mean_difference().norm(),
        covariance_trace: stats.sigma.trace(),
        covariance_rank: covariance_rank(&stats.sigma),
    }
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub fn cmd_eval(args: &EvalArgs) -> Result<EvalReport> {
    set_threads(args.threads)?;
    let priors = parse_priors(&args.priors)?;
    let label = &args.input.label_column;
    let positive = args.input.positive_label.as_deref();
    let train = load_csv(&args.train, label, positive)?;
    let test = load_csv(&args.test, label, positive)?;
    if train.p() != test.p() {
        return Err(Error::DimensionMismatch {
            expected: train.p(),
            found: test.p(),
        });
    }

    let start = Instant::now();
    let ensemble = EnsembleTrainer::from_data(&train, priors)?.train(args.d, args.m, args.seed)?;
    let train_ms = millis(start);

    let start = Instant::now();
    let g = GEstimator::from_data(&train, priors)?.estimate(args.d)?;
    let g_estimate_ms = millis(start);

    let start = Instant::now();
    let empirical = empirical_error(&ensemble, &test)?;
    let test_ms = millis(start);

    let stats = estimate_stats(&train, priors)?;
    let report = EvalReport {
        d: args.d,
        m: args.m,
        seed: args.seed,
        n_test: test.n(),
        empirical_error: empirical.value,
        g_estimate: g.error,
        train_stats: summarize(&train, &stats),
        timing: Timing {
            train_ms,
            g_estimate_ms,
            test_ms,
        },
    };
    let json = serde_json::to_string_pretty(&report)?;
    match &args.out {
        Some(path) => write_file(path, json.as_bytes())?,
        None => println!("{json}"),
    }
    Ok(report)
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Sweep(a) => cmd_sweep(&a).map(drop),
        Command::Eval(a) => cmd_eval(&a).map(drop),
    }
}

/// Parse the process arguments, run, and return the exit code.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RPLD_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
