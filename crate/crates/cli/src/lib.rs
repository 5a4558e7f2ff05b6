// SPDX-License-Identifier: MIT OR Apache-2.0

//! Argument parsing and dispatch for the `lrdci` binary.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 on numeric or
//! estimation failures.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use lrdci_core::io as csvio;
use lrdci_core::{
    asymptotic_band_with, asymptotic_quantile_ci_with, bartlett_lrv, default_bandwidth, hoa_band,
    hoa_quantile_ci, residual_lrv, residual_sigma_grid, rs_hurst, run_coverage_experiment,
    sampling_distribution_samples, subordinate, ConfidenceRegion, Error, ExperimentConfig,
    FgnGenerator, HurstMode, LrdModel, Method, Normalizer, Target, TimeSeries, Transform,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

const GRID_HELP: &str = "Grid as start:stop:step (endpoints inclusive within half a step), \
                         a comma-separated list, or a single value";

#[derive(Debug, Parser)]
#[command(
    name = "lrdci",
    version,
    about = "Confidence bands and quantile intervals for long-range dependent series",
    after_help = "Exit status: 0 success, 1 usage or input error, 2 numeric or estimation error."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate fractional Gaussian noise, optionally subordinated by a transform.
    Generate(GenerateArgs),
    /// Estimate the Hurst index of a series by rescaled range.
    Hurst(InputArgs),
    /// Bartlett long-run variance of a series or of its residual block at x.
    Lrv(LrvArgs),
    /// Pointwise confidence band for the marginal distribution function.
    Band(BandArgs),
    /// Confidence interval for a marginal quantile.
    QuantileCi(QuantileArgs),
    /// Monte Carlo coverage study over a grid of Hurst indices and lengths.
    Coverage(CoverageArgs),
    /// Draws of the standardized empirical distribution function at x.
    Histogram(HistogramArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Hurst index in (0.5, 1).
    #[arg(long)]
    pub hurst: f64,
    /// Number of observations.
    #[arg(long)]
    pub length: usize,
    /// Random seed.
    #[arg(long)]
    pub seed: u64,
    /// Output CSV (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Transform G applied to the Gaussian driver: identity, exp or negate.
    #[arg(long, default_value = "identity")]
    pub transform: Transform,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input series CSV.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Known Hurst index in (0.5, 1).
    #[arg(long, conflicts_with = "estimate_hurst")]
    pub hurst: Option<f64>,
    /// Estimate the Hurst index by rescaled range instead.
    #[arg(long)]
    pub estimate_hurst: bool,
    /// Transform G linking the series to its Gaussian driver.
    #[arg(long, default_value = "identity")]
    pub transform: Transform,
}

#[derive(Debug, Args)]
pub struct LrvArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Bartlett bandwidth (default floor(N^(1/3))).
    #[arg(long)]
    pub bandwidth: Option<usize>,
    /// Use the residual block at this x; needs --hurst or --estimate-hurst.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// asymptotic or hoa.
    #[arg(long, default_value = "hoa")]
    pub method: Method,
    /// Significance level in (0, 1).
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output CSV (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Bartlett bandwidth for the HOA long-run variance.
    #[arg(long)]
    pub bandwidth: Option<usize>,
    /// Use the exact sqrt(Var(sum)) normalizer in the asymptotic method.
    #[arg(long)]
    pub exact_dn: bool,
}

#[derive(Debug, Args)]
pub struct BandArgs {
    #[command(flatten)]
    pub region: RegionArgs,
    #[arg(long, allow_hyphen_values = true, help = GRID_HELP)]
    pub grid: String,
}

#[derive(Debug, Args)]
pub struct QuantileArgs {
    #[command(flatten)]
    pub region: RegionArgs,
    /// Quantile level in (0, 1).
    #[arg(long)]
    pub p: f64,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[arg(long, help = GRID_HELP)]
    pub hurst_grid: String,
    /// Series lengths, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub length: Vec<usize>,
    /// Replications per cell.
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Quantile level for interval coverage.
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    pub p: Option<f64>,
    /// x grid for band coverage.
    #[arg(long, allow_hyphen_values = true, help = GRID_HELP)]
    pub grid: Option<String>,
    /// known or estimated.
    #[arg(long, default_value = "known")]
    pub hurst_mode: HurstMode,
    /// Base seed; replication r uses seed ^ r.
    #[arg(long)]
    pub seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub bandwidth: Option<usize>,
    /// Comma-separated subset of asymptotic,hoa.
    #[arg(long, value_delimiter = ',', default_value = "asymptotic,hoa")]
    pub methods: Vec<Method>,
    #[arg(long, default_value = "identity")]
    pub transform: Transform,
    #[arg(long)]
    pub exact_dn: bool,
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    #[arg(long)]
    pub hurst: f64,
    #[arg(long)]
    pub length: usize,
    #[arg(long, default_value_t = 2000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "identity")]
    pub transform: Transform,
}

/// Failure classified by exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Io(_) | Error::Csv(_) | Error::Format(_) => {
                CliError::Usage(e.to_string())
            }
            Error::Range { .. }
            | Error::Generation { .. }
            | Error::Numeric(_)
            | Error::Estimation(_)
            | Error::Experiment(_) => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses a grid flag; values are rounded to 12 decimals so that
/// `-3:3:0.1` yields `0.3` rather than `0.30000000000000004`.
pub fn parse_grid(text: &str) -> std::result::Result<Vec<f64>, String> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("invalid number '{s}' in grid '{text}'"))
    };
    let round = |v: f64| (v * 1e12).round() / 1e12;
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step.is_nan() || step <= 0.0 {
                return Err(format!("grid step must be positive in '{text}'"));
            }
            if stop < start {
                return Err(format!("grid stop is below start in '{text}'"));
            }
            // Points beyond stop by half a step or more are dropped.
            let count = ((stop - start) / step + 0.5 - 1e-9).floor() as usize + 1;
            if count > 10_000_000 {
                return Err(format!("grid '{text}' has too many points"));
            }
            Ok((0..count).map(|k| round(start + k as f64 * step)).collect())
        }
        [_] => text.split(',').map(num).collect(),
        _ => Err(format!(
            "grid '{text}' must be start:stop:step or a comma-separated list"
        )),
    }
}

fn grid_arg(text: &str, flag: &str) -> CliResult<Vec<f64>> {
    parse_grid(text).map_err(|m| CliError::Usage(format!("--{flag}: {m}")))
}

fn read_input(path: &Path) -> CliResult<TimeSeries> {
    let file = File::open(path)
        .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
    Ok(csvio::read_series(BufReader::new(file))?)
}

fn with_output<F>(out: Option<&Path>, write: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> lrdci_core::Result<()>,
{
    match out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn resolve_model(series: &TimeSeries, args: &ModelArgs) -> CliResult<LrdModel> {
    let hurst = match (args.hurst, args.estimate_hurst) {
        (Some(h), _) => h,
        (None, true) => {
            let driver = series.driver_for(&LrdModel::new(0.75, args.transform.clone())?)?;
            rs_hurst(&driver)?.clamp(lrdci_core::montecarlo::ESTIMATED_HURST_FLOOR, 0.99)
        }
        (None, false) => {
            return Err(CliError::Usage(
                "one of --hurst or --estimate-hurst is required".into(),
            ))
        }
    };
    Ok(LrdModel::new(hurst, args.transform.clone())?)
}

fn normalizer(exact: bool) -> Normalizer {
    if exact {
        Normalizer::Exact
    } else {
        Normalizer::Asymptotic
    }
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Numeric(format!("cannot start thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn generate(args: GenerateArgs) -> CliResult<()> {
    let model = LrdModel::new(args.hurst, args.transform)?;
    let mut series = FgnGenerator::new(args.hurst, args.length)?.series(args.seed);
    if model.transform().is_identity() {
        series.driver = None;
    } else {
        series = subordinate(&series, &model)?;
    }
    with_output(args.out.as_deref(), |w| csvio::write_series(w, &series))
}

fn hurst(args: InputArgs) -> CliResult<()> {
    let series = read_input(&args.input)?;
    let h = rs_hurst(&series.values)?;
    println!("{}", csvio::format_f64(h));
    Ok(())
}

fn lrv(args: LrvArgs) -> CliResult<()> {
    let series = read_input(&args.input.input)?;
    let estimate = match args.x {
        Some(x) => {
            let model = resolve_model(&series, &args.model)?;
            residual_lrv(&series, &model, x, args.bandwidth)?
        }
        None => {
            let b = match args.bandwidth {
                Some(b) => b,
                None => default_bandwidth(series.len())?,
            };
            bartlett_lrv(&series.values, b)?
        }
    };
    println!("bandwidth,lrv,sigma,truncated");
    println!(
        "{},{},{},{}",
        estimate.bandwidth,
        csvio::format_f64(estimate.value),
        csvio::format_f64(estimate.sigma()),
        estimate.truncated
    );
    Ok(())
}

fn write_region(out: Option<&Path>, region: &ConfidenceRegion) -> CliResult<()> {
    with_output(out, |w| csvio::write_region(w, region))
}

fn band(args: BandArgs) -> CliResult<()> {
    let r = args.region;
    let grid = grid_arg(&args.grid, "grid")?;
    let series = read_input(&r.input.input)?;
    let model = resolve_model(&series, &r.model)?;
    let region = match r.method {
        Method::Asymptotic => {
            asymptotic_band_with(&series, &model, r.alpha, &grid, normalizer(r.exact_dn))?
        }
        Method::Hoa => {
            let sigma = residual_sigma_grid(&series, &model, &grid, r.bandwidth)?;
            hoa_band(&series, &model, r.alpha, &grid, &sigma)?
        }
    };
    write_region(r.out.as_deref(), &region)
}

fn quantile_ci(args: QuantileArgs) -> CliResult<()> {
    let r = args.region;
    let series = read_input(&r.input.input)?;
    let model = resolve_model(&series, &r.model)?;
    let region = match r.method {
        Method::Asymptotic => {
            asymptotic_quantile_ci_with(&series, &model, r.alpha, args.p, normalizer(r.exact_dn))?
        }
        Method::Hoa => {
            if !(args.p > 0.0 && args.p < 1.0) {
                return Err(CliError::Usage(format!(
                    "--p must lie in (0, 1), got {}",
                    args.p
                )));
            }
            let q = model.marginal_quantile(args.p);
            let sigma = residual_lrv(&series, &model, q, r.bandwidth)?.sigma();
            hoa_quantile_ci(&series, &model, r.alpha, args.p, sigma)?
        }
    };
    write_region(r.out.as_deref(), &region)
}

fn coverage(args: CoverageArgs) -> CliResult<()> {
    let hurst_grid = grid_arg(&args.hurst_grid, "hurst-grid")?;
    let target = match (&args.grid, args.p) {
        (Some(g), _) => Target::Band {
            x_grid: grid_arg(g, "grid")?,
        },
        (None, Some(p)) => Target::Quantile { p },
        (None, None) => return Err(CliError::Usage("one of --p or --grid is required".into())),
    };
    let mut methods = args.methods.clone();
    methods.sort();
    methods.dedup();
    let config = ExperimentConfig {
        reps: args.reps,
        alpha: args.alpha,
        hurst_mode: args.hurst_mode,
        base_seed: args.seed,
        methods,
        transform: args.transform.clone(),
        bandwidth: args.bandwidth,
        normalizer: normalizer(args.exact_dn),
        ..ExperimentConfig::new(hurst_grid, args.length.clone(), target)
    };
    config.validate()?;
    let report = with_threads(args.threads, || run_coverage_experiment(&config))??;
    for cell in report.cells.iter().filter(|c| c.unreliable) {
        eprintln!(
            "warning: H = {}, N = {}, {} at {}: {} of {} replications failed",
            cell.hurst, cell.length, cell.method, cell.point, cell.reps_failed, report.reps
        );
    }
    with_output(args.out.as_deref(), |w| csvio::write_report(w, &report))
}

fn histogram(args: HistogramArgs) -> CliResult<()> {
    let model = LrdModel::new(args.hurst, args.transform.clone())?;
    let samples = with_threads(args.threads, || {
        sampling_distribution_samples(&model, args.length, args.reps, args.x, args.seed)
    })??;
    with_output(args.out.as_deref(), |w| csvio::write_histogram(w, &samples))
}

pub fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Hurst(a) => hurst(a),
        Command::Lrv(a) => lrv(a),
        Command::Band(a) => band(a),
        Command::QuantileCi(a) => quantile_ci(a),
        Command::Coverage(a) => coverage(a),
        Command::Histogram(a) => histogram(a),
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the exit status. Messages go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
