//! The `warpwave` command line.
//!
//! Exit codes: 0 on success, 2 on a usage error (bad flag, unknown option
//! value, invalid configuration), 1 on a runtime failure (I/O, malformed
//! data, numerical domain errors).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::design::{RegressionSample, SizePolicy};
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_function, estimate_shape, Adaptivity, EstimatorConfig, Tau0Mode, ThresholdPolicy,
    ThresholdSource,
};
use crate::harness::{
    fmt_num, run_mc, simulate_dataset, Design, EstimatorKind, McConfig, Scenario, Target,
};
use crate::lrd::{variance_scaling_probe, LrdMethod, LrdProcessSpec};
use crate::rates::classify_phase;
use crate::rng::DEFAULT_SEED;
use crate::wavelet::FilterName;

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "WARPWAVE_SEED";

#[derive(Debug, Parser)]
#[command(name = "warpwave", version, about = "Warped wavelet regression under long-memory noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the regression function from an `x,y` CSV file.
    Denoise(FitArgs),
    /// Estimate the regression function minus its mean.
    Shape(FitArgs),
    /// Write a synthetic data set `x,y,f_true,sigma_x`.
    Simulate(SimulateArgs),
    /// Monte Carlo mean squared error over a grid of d values.
    Mc(McArgs),
    /// Phase, rate exponent and log exponent for Besov indices.
    Phase(PhaseArgs),
    /// Partial-sum variance slope of the noise generator.
    NoiseCheck(NoiseCheckArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EstimatorArgs {
    #[arg(long, default_value = "db6")]
    pub wavelet: FilterName,
    #[arg(long, default_value = "hard")]
    pub policy: ThresholdPolicy,
    #[arg(long, default_value = "dj")]
    pub threshold: ThresholdSource,
    #[arg(long = "tau0-mode", default_value = "global")]
    pub tau0_mode: Tau0Mode,
    /// Fix the long-memory index instead of estimating it.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value = "partial")]
    pub adaptivity: Adaptivity,
}

impl EstimatorArgs {
    fn config(&self) -> EstimatorConfig {
        let cfg = EstimatorConfig::default()
            .with_filter(self.wavelet)
            .with_policy(self.policy)
            .with_source(self.threshold)
            .with_tau0_mode(self.tau0_mode)
            .with_adaptivity(self.adaptivity);
        match self.alpha {
            Some(a) => cfg.with_alpha(a),
            None => cfg,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// Subsample evenly in rank when the size is not a power of two.
    #[arg(long)]
    pub thin: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value = "doppler")]
    pub target: Target,
    #[arg(long, default_value = "a")]
    pub scenario: Scenario,
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub d: f64,
    /// Replication index selecting the random streams.
    #[arg(long, default_value_t = 1)]
    pub rep: u64,
    /// Use the regular grid `i/n` instead of uniform draws.
    #[arg(long)]
    pub regular_grid: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long, default_value = "doppler")]
    pub target: Target,
    #[arg(long, default_value = "a")]
    pub scenario: Scenario,
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    /// Single dependence value; overrides `--d-grid`.
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long = "d-grid", value_delimiter = ',', default_value = "0,0.15,0.3,0.375,0.45")]
    pub d_grid: Vec<f64>,
    #[arg(long, default_value = "db6")]
    pub wavelet: FilterName,
    #[arg(long, default_value = "hard")]
    pub policy: ThresholdPolicy,
    /// One or more threshold sources, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "dj")]
    pub threshold: Vec<ThresholdSource>,
    #[arg(long = "tau0-mode", default_value = "global")]
    pub tau0_mode: Tau0Mode,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value = "partial")]
    pub adaptivity: Adaptivity,
    #[arg(long, default_value = "function")]
    pub estimator: EstimatorKind,
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Report CSV; a `.json` twin and a `_curve.csv` are written beside it.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub pi: f64,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct NoiseCheckArgs {
    #[arg(long, default_value_t = 0.0)]
    pub d: f64,
    #[arg(long = "n-grid", value_delimiter = ',', default_value = "256,512,1024,2048,4096,8192")]
    pub n_grid: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value = "exact")]
    pub method: LrdMethod,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    /// Tags a library error with the flag or file it concerns.
    fn from_lib(context: &str, err: Error) -> Self {
        let code = if matches!(err, Error::Config(_)) { 2 } else { 1 };
        let message = match &err {
            Error::Parse { .. } | Error::Io { .. } => err.to_string(),
            _ => format!("{context}: {err}"),
        };
        CliError { code, message }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Denoise(args) => fit_command(args, false),
        Command::Shape(args) => fit_command(args, true),
        Command::Simulate(args) => simulate_command(args),
        Command::Mc(args) => mc_command(args),
        Command::Phase(args) => phase_command(args),
        Command::NoiseCheck(args) => noise_check_command(args),
    }
}

/// `--seed`, then `WARPWAVE_SEED`, then [`DEFAULT_SEED`].
pub fn resolve_seed(flag: Option<u64>) -> CliResult<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("{SEED_ENV}: '{text}' is not an unsigned 64-bit integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Reads a CSV file with header `x,y` into a sample, rows in file order.
pub fn read_series_csv(path: &Path) -> Result<RegressionSample> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let headers = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(parse_err(1, format!("expected header 'x,y', found '{}'", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(parse_err(line, format!("expected 2 fields, found {}", record.len())));
        }
        let field = |i: usize, name: &str| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .map_err(|_| parse_err(line, format!("{name} value '{}' is not a number", &record[i])))
        };
        xs.push(field(0, "x")?);
        ys.push(field(1, "y")?);
    }
    if xs.is_empty() {
        return Err(Error::Shape(format!("{}: no data rows", path.display())));
    }
    RegressionSample::new(xs, ys)
}

fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| CliError {
                code: 1,
                message: format!("--output {}: {e}", p.display()),
            }),
    }
}

fn write_err(path: Option<&Path>, e: impl std::fmt::Display) -> CliError {
    let name = path.map(|p| p.display().to_string()).unwrap_or_else(|| "<stdout>".into());
    CliError {
        code: 1,
        message: format!("--output {name}: {e}"),
    }
}

fn write_rows(path: Option<&Path>, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> CliResult<()> {
    let out = open_output(path)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(|e| write_err(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|v| fmt_num(*v)))
            .map_err(|e| write_err(path, e))?;
    }
    w.flush().map_err(|e| write_err(path, e))
}

fn fit_command(args: FitArgs, shape: bool) -> CliResult<()> {
    resolve_seed(args.seed)?;
    let input = format!("--input {}", args.input.display());
    let sample = read_series_csv(&args.input).map_err(|e| CliError::from_lib(&input, e))?;
    let mut cfg = args.estimator.config();
    if args.thin {
        cfg.size_policy = SizePolicy::Thin;
    }
    let fit = if shape {
        estimate_shape(&sample, &cfg)
    } else {
        estimate_function(&sample, &cfg)
    }
    .map_err(|e| CliError::from_lib(&input, e))?;
    write_rows(
        args.output.as_deref(),
        &["x", "fhat"],
        fit.sorted_xs.iter().zip(&fit.fitted).map(|(x, f)| vec![*x, *f]),
    )
}

fn simulate_command(args: SimulateArgs) -> CliResult<()> {
    let seed = resolve_seed(args.seed)?;
    if !(0.0..0.5).contains(&args.d) {
        return Err(CliError::usage(format!("--d: {} outside [0, 0.5)", args.d)));
    }
    let config = McConfig {
        target: args.target,
        scenario: args.scenario,
        n: args.n,
        replications: 1,
        d_grid: vec![args.d],
        master_seed: seed,
        design: if args.regular_grid {
            Design::RegularGrid
        } else {
            Design::UniformRandom
        },
        ..McConfig::default()
    };
    let data = simulate_dataset(&config, args.d, args.rep).map_err(|e| CliError::from_lib("--n", e))?;
    let rows = (0..data.sample.len()).map(|i| {
        vec![
            data.sample.xs()[i],
            data.sample.ys()[i],
            data.f_true[i],
            data.sigma[i],
        ]
    });
    write_rows(args.output.as_deref(), &["x", "y", "f_true", "sigma_x"], rows)
}

fn mc_command(args: McArgs) -> CliResult<()> {
    let seed = resolve_seed(args.seed)?;
    let d_grid = match args.d {
        Some(d) => vec![d],
        None => args.d_grid.clone(),
    };
    if let Some(a) = args.alpha {
        if !(a > 0.0 && a <= 1.0) {
            return Err(CliError::usage(format!("--alpha: {a} outside (0, 1]")));
        }
    }
    let config = McConfig {
        target: args.target,
        scenario: args.scenario,
        n: args.n,
        replications: args.reps,
        d_grid,
        filter: args.wavelet,
        policy: args.policy,
        sources: args.threshold.clone(),
        tau0_mode: args.tau0_mode,
        adaptivity: args.adaptivity,
        alpha: args.alpha,
        master_seed: seed,
        estimator_kind: args.estimator,
        jobs: args.jobs,
        ..McConfig::default()
    };
    config
        .validate()
        .map_err(|e| CliError::from_lib("--n/--reps/--d-grid/--jobs", e))?;
    let report = run_mc(&config).map_err(|e| CliError::from_lib("mc", e))?;

    let path = args.output.as_deref();
    let out = open_output(path)?;
    report.write_csv(out).map_err(|e| write_err(path, e))?;
    if let Some(p) = path {
        let json_path = p.with_extension("json");
        std::fs::write(&json_path, report.to_json().map_err(|e| write_err(path, e))?)
            .map_err(|e| write_err(Some(&json_path), e))?;
        let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let curve_path = p.with_file_name(format!("{stem}_curve.csv"));
        let file = File::create(&curve_path).map_err(|e| write_err(Some(&curve_path), e))?;
        report
            .write_curve_csv(config.sources[0], file)
            .map_err(|e| write_err(Some(&curve_path), e))?;
    }
    Ok(())
}

fn phase_command(args: PhaseArgs) -> CliResult<()> {
    resolve_seed(args.seed)?;
    let diag = classify_phase(args.s, args.pi, args.p, args.alpha)
        .map_err(|e| CliError::from_lib("--s/--pi/--p/--alpha", e))?;
    let doc = json!({
        "phase": diag.phase,
        "gamma": diag.gamma,
        "kappa": diag.kappa,
        "alpha_d": diag.alpha_d,
        "alpha_s": diag.alpha_s,
        "in_scope": diag.in_scope,
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("plain json"));
    Ok(())
}

fn noise_check_command(args: NoiseCheckArgs) -> CliResult<()> {
    let seed = resolve_seed(args.seed)?;
    let spec = LrdProcessSpec::from_d(args.d, seed)
        .map_err(|e| CliError::usage(format!("--d: {e}")))?
        .with_method(args.method);
    let fit = variance_scaling_probe(&spec, &args.n_grid, args.reps)
        .map_err(|e| CliError::from_lib("--n-grid/--reps", e))?;
    let doc = json!({
        "d": args.d,
        "alpha": spec.alpha(),
        "slope": fit.slope,
        "expected_slope": 2.0 - spec.alpha(),
        "reps": args.reps,
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("plain json"));
    Ok(())
}
