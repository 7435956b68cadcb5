//! Long-range-dependent Gaussian noise.
//!
//! The noise is the fractionally integrated process FARIMA(0, d, 0),
//! `ε_i = Σ_m a_m η_{i-m}` with `a_m = a_{m-1}(m-1+d)/m`, whose partial sums
//! satisfy `Var(Σ_{i≤n} ε_i) ~ c n^{2-α}` with `d = (1-α)/2`.
//!
//! Two generators are provided. [`LrdMethod::Exact`] draws the stationary
//! process exactly by circulant embedding of its closed-form
//! autocovariance. [`LrdMethod::TruncatedMa`] evaluates the moving average
//! with the weights cut at `truncation` and a burn-in of the same length.
//! Truncation caps the low-frequency power, which visibly flattens the
//! partial-sum variance slope for `d` near 1/2.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::rng::{stream, StreamTag};
use crate::stats::{linear_fit, mean, sample_variance};

/// Minimum truncation used by the moving-average generator.
pub const MIN_TRUNCATION: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LrdMethod {
    #[default]
    Exact,
    TruncatedMa,
}

impl std::str::FromStr for LrdMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(LrdMethod::Exact),
            "truncated-ma" | "truncated" => Ok(LrdMethod::TruncatedMa),
            other => Err(Error::config(format!("unknown noise method '{other}'"))),
        }
    }
}

/// Parameters of the noise process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrdProcessSpec {
    alpha: f64,
    d: f64,
    /// MA cutoff for [`LrdMethod::TruncatedMa`]; `None` means
    /// `max(n, MIN_TRUNCATION)`.
    pub truncation: Option<usize>,
    pub seed: u64,
    pub method: LrdMethod,
}

impl LrdProcessSpec {
    /// Parameters from the fractional integration order `d ∈ [0, 1/2)`.
    pub fn from_d(d: f64, seed: u64) -> Result<Self> {
        check_d(d)?;
        Ok(LrdProcessSpec {
            alpha: 1.0 - 2.0 * d,
            d,
            truncation: None,
            seed,
            method: LrdMethod::Exact,
        })
    }

    /// Parameters from the dependence index `α ∈ (0, 1]`.
    pub fn from_alpha(alpha: f64, seed: u64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        Ok(LrdProcessSpec {
            alpha,
            d: (1.0 - alpha) / 2.0,
            truncation: None,
            seed,
            method: LrdMethod::Exact,
        })
    }

    pub fn with_method(mut self, method: LrdMethod) -> Self {
        self.method = method;
        self
    }

    pub fn with_truncation(mut self, truncation: usize) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::domain("truncation must be at least 1"));
        }
        self.truncation = Some(truncation);
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// `Var(ε_i)` of the untruncated process, `Γ(1-2d) / Γ(1-d)²`.
    pub fn marginal_variance(&self) -> f64 {
        farima_variance(self.d)
    }
}

fn check_d(d: f64) -> Result<()> {
    if !(0.0..0.5).contains(&d) {
        return Err(Error::domain(format!("d must lie in [0, 1/2), got {d}")));
    }
    Ok(())
}

/// MA weights `a_0..=a_count` of FARIMA(0, d, 0).
pub fn farima_coefficients(d: f64, count: usize) -> Result<Vec<f64>> {
    check_d(d)?;
    let mut a = Vec::with_capacity(count + 1);
    a.push(1.0);
    for m in 1..=count {
        let prev = a[m - 1];
        a.push(prev * (m as f64 - 1.0 + d) / m as f64);
    }
    Ok(a)
}

/// `Γ(1-2d) / Γ(1-d)²`, the variance of FARIMA(0, d, 0) with unit innovations.
pub fn farima_variance(d: f64) -> f64 {
    if d == 0.0 {
        return 1.0;
    }
    (ln_gamma(1.0 - 2.0 * d) - 2.0 * ln_gamma(1.0 - d)).exp()
}

/// Autocovariances `γ(0)..γ(lags-1)` via `γ(k) = γ(k-1)(k-1+d)/(k-d)`.
pub fn farima_autocovariance(d: f64, lags: usize) -> Result<Vec<f64>> {
    check_d(d)?;
    let mut g = Vec::with_capacity(lags);
    if lags == 0 {
        return Ok(g);
    }
    g.push(farima_variance(d));
    for k in 1..lags {
        let k = k as f64;
        let prev = *g.last().unwrap();
        g.push(prev * (k - 1.0 + d) / (k - d));
    }
    Ok(g)
}

enum Engine {
    Circulant {
        sqrt_eigs: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
    MovingAverage {
        weights_hat: Vec<Complex64>,
        truncation: usize,
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    },
}

/// Precomputed sampler for series of a fixed length `n`.
pub struct LrdGenerator {
    spec: LrdProcessSpec,
    n: usize,
    engine: Engine,
}

impl LrdGenerator {
    pub fn new(spec: LrdProcessSpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("series length must be at least 1"));
        }
        check_d(spec.d)?;
        let mut planner = FftPlanner::new();
        let engine = match spec.method {
            LrdMethod::Exact => {
                let m = (2 * n).next_power_of_two().max(2);
                let half = m / 2;
                let gamma = farima_autocovariance(spec.d, half + 1)?;
                let mut row: Vec<Complex64> = (0..m)
                    .map(|k| {
                        let lag = if k <= half { k } else { m - k };
                        Complex64::new(gamma[lag], 0.0)
                    })
                    .collect();
                let fft = planner.plan_fft_forward(m);
                fft.process(&mut row);
                let max_eig = row.iter().map(|c| c.re).fold(0.0, f64::max);
                let mut sqrt_eigs = Vec::with_capacity(m);
                for c in &row {
                    if c.re < -1e-8 * max_eig {
                        return Err(Error::domain(format!(
                            "circulant embedding not nonnegative for d = {}",
                            spec.d
                        )));
                    }
                    sqrt_eigs.push((c.re.max(0.0) / m as f64).sqrt());
                }
                Engine::Circulant { sqrt_eigs, fft }
            }
            LrdMethod::TruncatedMa => {
                let truncation = spec.truncation.unwrap_or(n.max(MIN_TRUNCATION));
                let weights = farima_coefficients(spec.d, truncation)?;
                let size = (n + 2 * truncation + 1).next_power_of_two();
                let forward = planner.plan_fft_forward(size);
                let inverse = planner.plan_fft_inverse(size);
                let mut weights_hat: Vec<Complex64> = weights
                    .iter()
                    .map(|&w| Complex64::new(w, 0.0))
                    .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
                    .take(size)
                    .collect();
                forward.process(&mut weights_hat);
                Engine::MovingAverage {
                    weights_hat,
                    truncation,
                    forward,
                    inverse,
                }
            }
        };
        Ok(LrdGenerator { spec, n, engine })
    }

    pub fn spec(&self) -> &LrdProcessSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Variance of one generated value.
    pub fn marginal_variance(&self) -> f64 {
        match &self.engine {
            Engine::Circulant { .. } => farima_variance(self.spec.d),
            Engine::MovingAverage { truncation, .. } => farima_coefficients(self.spec.d, *truncation)
                .map(|a| a.iter().map(|v| v * v).sum())
                .unwrap_or(f64::NAN),
        }
    }

    /// Series `ε_1..ε_n` of replication `replication`.
    pub fn generate(&self, replication: u64) -> Vec<f64> {
        let mut rng = stream(self.spec.seed, replication, StreamTag::Noise);
        self.generate_with(&mut rng)
    }

    /// Draws a series from a caller-supplied generator.
    pub fn generate_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.engine {
            Engine::Circulant { sqrt_eigs, fft } => {
                let mut buf: Vec<Complex64> = sqrt_eigs
                    .iter()
                    .map(|s| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(s * re, s * im)
                    })
                    .collect();
                fft.process(&mut buf);
                buf[..self.n].iter().map(|c| c.re).collect()
            }
            Engine::MovingAverage {
                weights_hat,
                truncation,
                forward,
                inverse,
            } => {
                let size = weights_hat.len();
                let draws = self.n + truncation;
                let mut buf: Vec<Complex64> = (0..size)
                    .map(|i| {
                        if i < draws {
                            Complex64::new(rng.sample(StandardNormal), 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                    .collect();
                forward.process(&mut buf);
                for (b, w) in buf.iter_mut().zip(weights_hat) {
                    *b *= w;
                }
                inverse.process(&mut buf);
                let scale = 1.0 / size as f64;
                // drop the burn-in: output i uses innovations up to i + truncation
                buf[*truncation..truncation + self.n]
                    .iter()
                    .map(|c| c.re * scale)
                    .collect()
            }
        }
    }
}

/// One noise series of length `n`, a pure function of `(spec, n, replication)`.
pub fn generate_lrd(spec: &LrdProcessSpec, n: usize, replication: u64) -> Result<Vec<f64>> {
    Ok(LrdGenerator::new(*spec, n)?.generate(replication))
}

/// Result of a partial-sum variance regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    /// Estimates `2 - α`.
    pub slope: f64,
    pub intercept: f64,
}

/// Fits `log Var(Σ_{i≤n} ε_i)` against `log n` over `n_grid`, using
/// `reps` independent series per grid point.
pub fn variance_scaling_probe(
    spec: &LrdProcessSpec,
    n_grid: &[usize],
    reps: usize,
) -> Result<ScalingFit> {
    if n_grid.len() < 4 {
        return Err(Error::domain(format!(
            "variance probe needs at least 4 sample sizes, got {}",
            n_grid.len()
        )));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] < 2 {
        return Err(Error::domain("sample-size grid must be strictly ascending and >= 2"));
    }
    if reps < 50 {
        return Err(Error::domain(format!("variance probe needs >= 50 replications, got {reps}")));
    }
    let mut log_n = Vec::with_capacity(n_grid.len());
    let mut log_var = Vec::with_capacity(n_grid.len());
    for (gi, &n) in n_grid.iter().enumerate() {
        let generator = LrdGenerator::new(*spec, n)?;
        let sums: Vec<f64> = (0..reps)
            .into_par_iter()
            .map(|r| {
                let rep = (gi * reps + r) as u64;
                generator.generate(rep).iter().sum()
            })
            .collect();
        log_n.push((n as f64).ln());
        log_var.push(sample_variance(&sums).ln());
    }
    let (slope, intercept) = linear_fit(&log_n, &log_var)
        .ok_or_else(|| Error::domain("degenerate variance regression"))?;
    Ok(ScalingFit { slope, intercept })
}

/// Log-periodogram (GPH) estimate of `d` from the lowest `⌊√n⌋` Fourier
/// frequencies.
pub fn estimate_d(series: &[f64]) -> Result<f64> {
    let n = series.len();
    if n < 256 {
        return Err(Error::domain(format!(
            "alpha estimation needs at least 256 observations, got {n}"
        )));
    }
    let m = (n as f64).sqrt().floor() as usize;
    let mu = mean(series);
    let mut buf: Vec<Complex64> = series.iter().map(|x| Complex64::new(x - mu, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let mut regressor = Vec::with_capacity(m);
    let mut log_periodogram = Vec::with_capacity(m);
    let norm = 2.0 * std::f64::consts::PI * n as f64;
    let scale: f64 = series.iter().map(|x| (x - mu).abs()).fold(0.0, f64::max);
    for (j, c) in buf.iter().enumerate().take(m + 1).skip(1) {
        let power = c.norm_sqr() / norm;
        if !(power > 1e-28 * scale * scale * n as f64) {
            return Err(Error::domain("periodogram vanishes; series is (nearly) constant"));
        }
        let lambda = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        regressor.push((4.0 * (lambda / 2.0).sin().powi(2)).ln());
        log_periodogram.push(power.ln());
    }
    let (slope, _) = linear_fit(&regressor, &log_periodogram)
        .ok_or_else(|| Error::domain("degenerate periodogram regression"))?;
    Ok(-slope)
}

/// `α̂ = 1 - 2 d̂`, clamped to `(0, 1]`.
pub fn estimate_alpha(series: &[f64]) -> Result<f64> {
    let d = estimate_d(series)?;
    Ok((1.0 - 2.0 * d).clamp(ALPHA_FLOOR, 1.0))
}

/// Smallest α reported by [`estimate_alpha`].
pub const ALPHA_FLOOR: f64 = 0.01;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_no_memory() {
        let a = farima_coefficients(0.0, 5).unwrap();
        assert_eq!(a, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn first_weight_is_d() {
        for d in [0.05, 0.2, 0.45] {
            let a = farima_coefficients(d, 3).unwrap();
            assert_eq!(a[0], 1.0);
            assert!((a[1] - d).abs() < 1e-15);
            assert!(a.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn weight_decay_slope() {
        // least squares on log a_m vs log m over m in [1e3, 1e4]
        let a = farima_coefficients(0.45, 10_000).unwrap();
        let ms: Vec<f64> = (1000..=10_000).map(|m| (m as f64).ln()).collect();
        let la: Vec<f64> = (1000..=10_000).map(|m| a[m].ln()).collect();
        let (slope, _) = linear_fit(&ms, &la).unwrap();
        assert!((slope + 0.55).abs() < 0.01, "{slope}");
    }

    #[test]
    fn bad_d_is_domain_error() {
        assert!(matches!(farima_coefficients(0.5, 3), Err(Error::Domain(_))));
        assert!(matches!(farima_coefficients(-0.1, 3), Err(Error::Domain(_))));
        assert!(LrdProcessSpec::from_alpha(0.0, 1).is_err());
        assert!(LrdProcessSpec::from_alpha(1.2, 1).is_err());
    }

    #[test]
    fn autocovariance_matches_ma_convolution() {
        // independent route: γ(k) = Σ_m a_m a_{m+k}; tail converges fast for small d
        let d = 0.1;
        let a = farima_coefficients(d, 400_000).unwrap();
        let g = farima_autocovariance(d, 4).unwrap();
        for (k, gk) in g.iter().enumerate() {
            let conv: f64 = (0..a.len() - k).map(|m| a[m] * a[m + k]).sum();
            assert!((conv - gk).abs() < 2e-4, "lag {k}: {conv} vs {gk}");
        }
    }

    #[test]
    fn alpha_d_correspondence() {
        let s = LrdProcessSpec::from_alpha(0.4, 0).unwrap();
        assert!((s.d() - 0.3).abs() < 1e-15);
        let s = LrdProcessSpec::from_d(0.45, 0).unwrap();
        assert!((s.alpha() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn white_noise_variance() {
        let spec = LrdProcessSpec::from_d(0.0, 99).unwrap();
        let x = generate_lrd(&spec, 100_000, 0).unwrap();
        let v = sample_variance(&x);
        assert!((v - 1.0).abs() < 0.02, "{v}");
    }

    #[test]
    fn deterministic_per_replication() {
        for method in [LrdMethod::Exact, LrdMethod::TruncatedMa] {
            let spec = LrdProcessSpec::from_d(0.3, 5).unwrap().with_method(method);
            let a = generate_lrd(&spec, 300, 7).unwrap();
            let b = generate_lrd(&spec, 300, 7).unwrap();
            let c = generate_lrd(&spec, 300, 8).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
    }

    #[test]
    fn truncated_ma_lag_one_correlation() {
        // ρ(1) = d / (1 - d) for FARIMA(0,d,0)
        let d = 0.25;
        let spec = LrdProcessSpec::from_d(d, 3)
            .unwrap()
            .with_method(LrdMethod::TruncatedMa)
            .with_truncation(2000)
            .unwrap();
        let gen = LrdGenerator::new(spec, 4096).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        for r in 0..40 {
            let x = gen.generate(r);
            num += x.windows(2).map(|w| w[0] * w[1]).sum::<f64>();
            den += x.iter().map(|v| v * v).sum::<f64>();
        }
        let rho = num / den;
        assert!((rho - d / (1.0 - d)).abs() < 0.03, "{rho}");
    }

    #[test]
    fn probe_rejects_degenerate_grids() {
        let spec = LrdProcessSpec::from_d(0.0, 1).unwrap();
        assert!(variance_scaling_probe(&spec, &[8, 16, 32], 60).is_err());
        assert!(variance_scaling_probe(&spec, &[8, 16, 16, 32], 60).is_err());
        assert!(variance_scaling_probe(&spec, &[8, 16, 32, 64], 10).is_err());
    }

    #[test]
    fn probe_white_noise_slope() {
        let spec = LrdProcessSpec::from_d(0.0, 4).unwrap();
        let fit = variance_scaling_probe(&spec, &[256, 512, 1024, 2048], 200).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.1, "{}", fit.slope);
    }

    #[test]
    fn gph_rejects_short_and_constant() {
        assert!(matches!(estimate_alpha(&[0.0; 100]), Err(Error::Domain(_))));
        assert!(matches!(estimate_alpha(&[3.0; 512]), Err(Error::Domain(_))));
    }
}
