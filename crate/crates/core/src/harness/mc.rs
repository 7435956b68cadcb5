use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::targets::{scenario_sigma, Scenario, StandardizedTarget, Target};
use crate::design::RegressionSample;
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_function, estimate_shape, Adaptivity, AlphaSource, EstimatorConfig, Tau0Mode,
    ThresholdPolicy, ThresholdSource,
};
use crate::lrd::{LrdGenerator, LrdMethod, LrdProcessSpec};
use crate::rates::classify_phase;
use crate::rng::{stream, StreamTag, DEFAULT_SEED};
use crate::stats::{linear_fit, mean, sample_variance};
use crate::wavelet::FilterName;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    #[default]
    Function,
    Shape,
}

impl FromStr for EstimatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "function" => Ok(EstimatorKind::Function),
            "shape" => Ok(EstimatorKind::Shape),
            other => Err(Error::config(format!("unknown estimator kind '{other}'"))),
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimatorKind::Function => "function",
            EstimatorKind::Shape => "shape",
        })
    }
}

/// Placement of the design points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Design {
    /// `X_i` i.i.d. uniform on `[0, 1]`.
    #[default]
    UniformRandom,
    /// `X_i = i/n`, useful for isolating estimator bias.
    RegularGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub target: Target,
    pub scenario: Scenario,
    pub n: usize,
    pub replications: usize,
    pub d_grid: Vec<f64>,
    pub filter: FilterName,
    pub policy: ThresholdPolicy,
    pub sources: Vec<ThresholdSource>,
    pub tau0_mode: Tau0Mode,
    pub adaptivity: Adaptivity,
    /// Fixed α for the long-memory threshold; estimated when `None`.
    pub alpha: Option<f64>,
    pub master_seed: u64,
    pub estimator_kind: EstimatorKind,
    pub design: Design,
    pub lrd_method: LrdMethod,
    /// Multiplier applied to the scenario's noise level.
    pub noise_scale: f64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            target: Target::Doppler,
            scenario: Scenario::A,
            n: 1024,
            replications: 100,
            d_grid: vec![0.0, 0.15, 0.30, 0.375, 0.45],
            filter: FilterName::Db6,
            policy: ThresholdPolicy::Hard,
            sources: vec![ThresholdSource::Dj],
            tau0_mode: Tau0Mode::Global,
            adaptivity: Adaptivity::Partial,
            alpha: None,
            master_seed: DEFAULT_SEED,
            estimator_kind: EstimatorKind::Function,
            design: Design::UniformRandom,
            lrd_method: LrdMethod::Exact,
            noise_scale: 1.0,
            jobs: None,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.n.is_power_of_two() || self.n < 2 {
            return Err(Error::config(format!("n = {} is not a power of two", self.n)));
        }
        if self.replications == 0 {
            return Err(Error::config("replications must be at least 1"));
        }
        if self.d_grid.is_empty() {
            return Err(Error::config("d grid is empty"));
        }
        if let Some(d) = self.d_grid.iter().find(|d| !(0.0..0.5).contains(*d)) {
            return Err(Error::config(format!("d = {d} outside [0, 0.5)")));
        }
        if self.sources.is_empty() {
            return Err(Error::config("no threshold source selected"));
        }
        if !(self.noise_scale >= 0.0) || !self.noise_scale.is_finite() {
            return Err(Error::config("noise scale must be finite and nonnegative"));
        }
        if self.jobs == Some(0) {
            return Err(Error::config("jobs must be at least 1"));
        }
        Ok(())
    }

    pub fn estimator_config(&self, source: ThresholdSource) -> EstimatorConfig {
        let mut cfg = EstimatorConfig::default()
            .with_filter(self.filter)
            .with_source(source)
            .with_policy(self.policy)
            .with_tau0_mode(self.tau0_mode)
            .with_adaptivity(self.adaptivity);
        cfg.alpha = match self.alpha {
            Some(a) => AlphaSource::Supplied(a),
            None => AlphaSource::Estimated,
        };
        cfg
    }
}

/// One simulated data set together with its truth on the comparison grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedData {
    pub sample: RegressionSample,
    pub f_true: Vec<f64>,
    pub sigma: Vec<f64>,
}

/// Per-`d` state shared by all replications.
struct Experiment<'a> {
    config: &'a McConfig,
    target: StandardizedTarget,
    generator: LrdGenerator,
    truth: Vec<f64>,
}

impl<'a> Experiment<'a> {
    fn new(config: &'a McConfig, d: f64) -> Result<Self> {
        let spec = LrdProcessSpec::from_d(d, config.master_seed)?.with_method(config.lrd_method);
        let generator = LrdGenerator::new(spec, config.n)?;
        let target = StandardizedTarget::new(config.target);
        let mut truth = target.on_regular_grid(config.n);
        if config.estimator_kind == EstimatorKind::Shape {
            let m = mean(&truth);
            truth.iter_mut().for_each(|v| *v -= m);
        }
        Ok(Experiment {
            config,
            target,
            generator,
            truth,
        })
    }

    fn simulate(&self, rep: u64) -> Result<SimulatedData> {
        let n = self.config.n;
        let xs: Vec<f64> = match self.config.design {
            Design::UniformRandom => {
                let mut rng = stream(self.config.master_seed, rep, StreamTag::Design);
                (0..n).map(|_| rng.random::<f64>()).collect()
            }
            Design::RegularGrid => (1..=n).map(|i| i as f64 / n as f64).collect(),
        };
        let noise = self.generator.generate(rep);
        let sigma: Vec<f64> = xs
            .iter()
            .map(|&x| self.config.noise_scale * scenario_sigma(self.config.scenario, x))
            .collect();
        let f_true: Vec<f64> = xs.iter().map(|&x| self.target.eval(x)).collect();
        let ys = f_true
            .iter()
            .zip(&sigma)
            .zip(&noise)
            .map(|((f, s), e)| f + s * e)
            .collect();
        Ok(SimulatedData {
            sample: RegressionSample::new(xs, ys)?,
            f_true,
            sigma,
        })
    }

    fn mse(&self, source: ThresholdSource, rep: u64) -> Result<f64> {
        let data = self.simulate(rep)?;
        let cfg = self.config.estimator_config(source);
        let fit = match self.config.estimator_kind {
            EstimatorKind::Function => estimate_function(&data.sample, &cfg)?,
            EstimatorKind::Shape => estimate_shape(&data.sample, &cfg)?,
        };
        let n = self.truth.len() as f64;
        Ok(self
            .truth
            .iter()
            .zip(&fit.fitted)
            .map(|(t, f)| (t - f) * (t - f))
            .sum::<f64>()
            / n)
    }
}

/// Draws the data set of replication `rep`: design, noise and truth at the
/// design points.
pub fn simulate_dataset(config: &McConfig, d: f64, rep: u64) -> Result<SimulatedData> {
    config.validate()?;
    Experiment::new(config, d)?.simulate(rep)
}

/// MSE of one replication against the target on the grid `i/n`.
pub fn run_replication(config: &McConfig, source: ThresholdSource, d: f64, rep: u64) -> Result<f64> {
    config.validate()?;
    Experiment::new(config, d)?.mse(source, rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    pub d: f64,
    pub scenario: Scenario,
    pub target: Target,
    pub source: ThresholdSource,
    pub policy: ThresholdPolicy,
    pub mse_mean: f64,
    pub mse_stderr: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub rows: Vec<McRow>,
}

impl McReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["d", "scenario", "target", "source", "policy", "mse_mean", "mse_stderr", "reps"])
            .map_err(csv_error)?;
        for r in &self.rows {
            w.write_record([
                fmt_num(r.d),
                r.scenario.to_string(),
                r.target.to_string(),
                r.source.to_string(),
                r.policy.to_string(),
                fmt_num(r.mse_mean),
                fmt_num(r.mse_stderr),
                r.reps.to_string(),
            ])
            .map_err(csv_error)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "<csv>".into(),
            source: e,
        })
    }

    /// `d,mse_mean` pairs for one threshold source.
    pub fn write_curve_csv<W: Write>(&self, source: ThresholdSource, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["d", "mse_mean"]).map_err(csv_error)?;
        for r in self.rows.iter().filter(|r| r.source == source) {
            w.write_record([fmt_num(r.d), fmt_num(r.mse_mean)]).map_err(csv_error)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "<csv>".into(),
            source: e,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::config(format!("json encoding: {e}")))
    }

    pub fn row(&self, d: f64, source: ThresholdSource) -> Option<&McRow> {
        self.rows.iter().find(|r| r.d == d && r.source == source)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::config(format!("csv encoding: {e}"))
}

/// Number formatting used in every CSV: 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn in_pool<T: Send>(jobs: Option<usize>, work: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(work()),
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::config(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
    }
}

/// Per-replication MSEs for replications `1..=reps`, in replication order.
pub fn replicate_mse(config: &McConfig, source: ThresholdSource, d: f64) -> Result<Vec<f64>> {
    config.validate()?;
    let experiment = Experiment::new(config, d)?;
    in_pool(config.jobs, || {
        (1..=config.replications as u64)
            .into_par_iter()
            .map(|rep| experiment.mse(source, rep))
            .collect::<Result<Vec<f64>>>()
    })?
}

/// Mean MSE and its standard error for every `(d, source)` pair.
pub fn run_mc(config: &McConfig) -> Result<McReport> {
    config.validate()?;
    let mut rows = Vec::new();
    for &d in &config.d_grid {
        for &source in &config.sources {
            let mse = replicate_mse(config, source, d)?;
            let reps = mse.len();
            rows.push(McRow {
                d,
                scenario: config.scenario,
                target: config.target,
                source,
                policy: config.policy,
                mse_mean: mean(&mse),
                mse_stderr: (sample_variance(&mse) / reps as f64).sqrt(),
                reps,
            });
        }
    }
    Ok(McReport { rows })
}

/// Empirical convergence rate over a grid of sample sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSlopeReport {
    pub n_grid: Vec<usize>,
    pub mse: Vec<f64>,
    /// Least-squares slope of `ln MSE` on `ln n`.
    pub slope: f64,
    /// `-γ` over the smoothness range considered, steepest first.
    pub predicted_band: (f64, f64),
    pub smoothness_range: (f64, f64),
}

/// Smoothness range assumed for the test functions when quoting rates.
pub const SMOOTHNESS_RANGE: (f64, f64) = (0.66, 8.0);

/// Fits the log-log MSE slope for sample sizes `n_grid` at dependence `d`,
/// using `config.replications` replications per size.
pub fn rate_slope_experiment(
    config: &McConfig,
    n_grid: &[usize],
    d: f64,
    source: ThresholdSource,
) -> Result<RateSlopeReport> {
    if n_grid.len() < 4 {
        return Err(Error::config(format!(
            "rate experiment needs at least 4 sample sizes, got {}",
            n_grid.len()
        )));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("sample sizes must be ascending"));
    }
    let mut mse = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let cfg = McConfig {
            n,
            d_grid: vec![d],
            ..config.clone()
        };
        mse.push(mean(&replicate_mse(&cfg, source, d)?));
    }
    let log_n: Vec<f64> = n_grid.iter().map(|&n| (n as f64).ln()).collect();
    let log_mse: Vec<f64> = mse.iter().map(|m| m.ln()).collect();
    let (slope, _) = linear_fit(&log_n, &log_mse).ok_or_else(|| Error::domain("degenerate rate regression"))?;

    // L2 loss on a B^s_{2,∞} target: γ ranges over the phases for s in range.
    let alpha = 1.0 - 2.0 * d;
    let (lo, hi) = SMOOTHNESS_RANGE;
    let mut gammas = Vec::new();
    for i in 0..=64 {
        let s = lo + (hi - lo) * i as f64 / 64.0;
        gammas.push(classify_phase(s, 2.0, 2.0, alpha)?.gamma);
    }
    let g_max = gammas.iter().cloned().fold(f64::MIN, f64::max);
    let g_min = gammas.iter().cloned().fold(f64::MAX, f64::min);
    Ok(RateSlopeReport {
        n_grid: n_grid.to_vec(),
        mse,
        slope,
        predicted_band: (-g_max, -g_min),
        smoothness_range: SMOOTHNESS_RANGE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> McConfig {
        McConfig {
            n: 256,
            replications: 4,
            d_grid: vec![0.0, 0.3],
            ..McConfig::default()
        }
    }

    #[test]
    fn replication_is_deterministic() {
        let c = small();
        let a = run_replication(&c, ThresholdSource::Dj, 0.3, 7).unwrap();
        let b = run_replication(&c, ThresholdSource::Dj, 0.3, 7).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(a >= 0.0);
    }

    #[test]
    fn report_ignores_thread_count() {
        let one = run_mc(&McConfig { jobs: Some(1), ..small() }).unwrap();
        let many = run_mc(&McConfig { jobs: Some(4), ..small() }).unwrap();
        assert_eq!(one, many);
        assert_eq!(one.rows.len(), 2);
    }

    #[test]
    fn invalid_configs() {
        assert!(run_mc(&McConfig { n: 1000, ..small() }).is_err());
        assert!(run_mc(&McConfig { d_grid: vec![0.5], ..small() }).is_err());
        assert!(run_mc(&McConfig { replications: 0, ..small() }).is_err());
    }

    #[test]
    fn csv_header() {
        let report = run_mc(&McConfig { d_grid: vec![0.0], ..small() }).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("d,scenario,target,source,policy,mse_mean,mse_stderr,reps\n"));
    }

    #[test]
    fn seventeen_digits() {
        let s = fmt_num(0.1);
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        assert_eq!(s, "1.0000000000000001e-1");
    }
}
