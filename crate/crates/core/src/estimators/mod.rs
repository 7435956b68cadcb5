//! Hard/soft thresholding estimators on the warped wavelet basis.

mod sigma;
mod threshold;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use sigma::{
    estimate_sigma_profile, lrd_level_weights, SigmaProfile, MIN_PROFILE_LEN, WEIGHT_FLOOR,
};
pub use threshold::{
    apply_threshold, compute_thresholds, hard_threshold, soft_threshold, LrdBranch, Tau0Mode,
    ThresholdPlan, ThresholdPolicy, ThresholdSource, ThresholdSpec, WEIGHT_TOLERANCE,
};

use crate::design::{
    fitted_on_design_grid, interpolate_fit, split_sample_coefficients, RankedSample,
    RegressionSample, SizePolicy,
};
use crate::error::{Error, Result};
use crate::lrd::estimate_alpha;
use crate::wavelet::{build_filter, CoefficientPyramid, FilterName};

/// Highest resolution level kept by the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Adaptivity {
    /// `2^{j1} = n/2`: every detail level is used.
    #[default]
    Partial,
    /// `2^{j1} = ⌊√(n / ln n)⌋`, rounded down to a power of two.
    Full,
}

impl FromStr for Adaptivity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "partial" => Ok(Adaptivity::Partial),
            "full" => Ok(Adaptivity::Full),
            other => Err(Error::config(format!("unknown adaptivity '{other}'"))),
        }
    }
}

impl fmt::Display for Adaptivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Adaptivity::Partial => "partial",
            Adaptivity::Full => "full",
        })
    }
}

/// Source of the long-memory index used by the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum AlphaSource {
    /// Log-periodogram estimate from standardized pilot residuals.
    #[default]
    Estimated,
    Supplied(f64),
}

/// Noise-level profile used for the level weights.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum SigmaSource {
    #[default]
    Estimated,
    Supplied(SigmaProfile),
}

/// How empirical coefficients are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientMode {
    /// All observations define the warp and the coefficients.
    #[default]
    Ranked,
    /// First half defines the warp, second half the coefficients.
    Split,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub filter: FilterName,
    pub coarse_level: u32,
    pub threshold: ThresholdSpec,
    pub adaptivity: Adaptivity,
    pub alpha: AlphaSource,
    pub sigma: SigmaSource,
    pub coefficients: CoefficientMode,
    pub size_policy: SizePolicy,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            filter: FilterName::Db6,
            coarse_level: 0,
            threshold: ThresholdSpec::default(),
            adaptivity: Adaptivity::Partial,
            alpha: AlphaSource::Estimated,
            sigma: SigmaSource::Estimated,
            coefficients: CoefficientMode::Ranked,
            size_policy: SizePolicy::Strict,
        }
    }
}

impl EstimatorConfig {
    pub fn with_filter(mut self, filter: FilterName) -> Self {
        self.filter = filter;
        self
    }

    pub fn with_source(mut self, source: ThresholdSource) -> Self {
        self.threshold.source = source;
        self
    }

    pub fn with_policy(mut self, policy: ThresholdPolicy) -> Self {
        self.threshold.policy = policy;
        self
    }

    pub fn with_tau0_mode(mut self, mode: Tau0Mode) -> Self {
        self.threshold.tau0_mode = mode;
        self
    }

    pub fn with_adaptivity(mut self, adaptivity: Adaptivity) -> Self {
        self.adaptivity = adaptivity;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = AlphaSource::Supplied(alpha);
        self
    }

    pub fn with_sigma_profile(mut self, profile: SigmaProfile) -> Self {
        self.sigma = SigmaSource::Supplied(profile);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Estimate on the rank grid; entry `i` belongs to `sorted_xs[i]`.
    pub fitted: Vec<f64>,
    pub pyramid_kept: CoefficientPyramid,
    pub plan: ThresholdPlan,
    /// Long-memory index fed to the threshold; `None` for the universal rule.
    pub alpha_used: Option<f64>,
    /// Finest detail level kept.
    pub top_level: u32,
    /// Nonzero detail coefficients per level, from the coarse level up.
    pub retained: Vec<usize>,
    pub sorted_xs: Vec<f64>,
    /// Observation index behind each grid entry.
    pub permutation: Vec<usize>,
}

impl FitResult {
    /// Linear interpolation of the grid estimate at design point `x`.
    pub fn predict(&self, x: f64) -> f64 {
        interpolate_fit(&self.sorted_xs, &self.fitted, x)
    }

    pub fn len(&self) -> usize {
        self.fitted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fitted.is_empty()
    }
}

/// Top detail level for `n = 2^levels` observations.
pub fn resolution_cutoff(n: usize, adaptivity: Adaptivity) -> Result<u32> {
    let levels = crate::design::dyadic_levels(n)?;
    if levels == 0 {
        return Err(Error::shape("need at least two observations"));
    }
    Ok(match adaptivity {
        Adaptivity::Partial => levels - 1,
        Adaptivity::Full => {
            let nf = n as f64;
            let target = (nf / nf.ln()).sqrt().floor().max(1.0) as u64;
            let j = 63 - target.leading_zeros();
            j.min(levels - 1)
        }
    })
}

/// Wavelet thresholding estimate of the regression function on the rank grid.
pub fn estimate_function(sample: &RegressionSample, config: &EstimatorConfig) -> Result<FitResult> {
    fit(sample, config, false)
}

/// Same pipeline as [`estimate_function`] with the scaling coefficients
/// removed: estimates `f` minus its design-weighted mean.
pub fn estimate_shape(sample: &RegressionSample, config: &EstimatorConfig) -> Result<FitResult> {
    fit(sample, config, true)
}

fn fit(sample: &RegressionSample, config: &EstimatorConfig, drop_scaling: bool) -> Result<FitResult> {
    let filter = build_filter(config.filter);

    // `ranked` supplies the auxiliary residual sample; `pyramid` the coefficients.
    let (pyramid, ranked, sorted_xs, permutation) = match config.coefficients {
        CoefficientMode::Ranked => {
            let ranked = RankedSample::new(sample, config.size_policy)?;
            let pyramid = ranked.coefficients(&filter, config.coarse_level)?;
            let xs = ranked.sorted_xs().to_vec();
            let perm = ranked.permutation().to_vec();
            (pyramid, ranked, xs, perm)
        }
        CoefficientMode::Split => {
            let (pyramid, cdf) = split_sample_coefficients(sample, &filter, config.coarse_level)?;
            let n = cdf.len();
            let (first, second) = sample.split_at(n)?;
            let first_ranked = RankedSample::new(&first, SizePolicy::Strict)?;
            let ranked = RankedSample::new(&second, SizePolicy::Strict)?;
            (
                pyramid,
                ranked,
                cdf.sorted_xs().to_vec(),
                first_ranked.permutation().to_vec(),
            )
        }
    };
    let n = pyramid.signal_len();

    let (weights, alpha_used) = match config.threshold.source {
        ThresholdSource::Dj => {
            let alpha = match config.alpha {
                AlphaSource::Supplied(a) => Some(a),
                AlphaSource::Estimated => None,
            };
            (Vec::new(), alpha)
        }
        ThresholdSource::Lrd => {
            let needs_residuals = matches!(config.sigma, SigmaSource::Estimated)
                || matches!(config.alpha, AlphaSource::Estimated);
            let pilot = if needs_residuals {
                Some(sigma::profile_from_ordered(ranked.ordered_ys(), &filter)?)
            } else {
                None
            };
            let profile = match &config.sigma {
                SigmaSource::Supplied(p) => {
                    if p.len() != n {
                        return Err(Error::shape(format!(
                            "sigma profile has {} values, sample grid has {n}",
                            p.len()
                        )));
                    }
                    p.clone()
                }
                SigmaSource::Estimated => pilot.as_ref().map(|p| p.profile.clone()).unwrap(),
            };
            let weights = lrd_level_weights(&profile, &filter)?;
            let alpha = match config.alpha {
                AlphaSource::Supplied(a) => a,
                AlphaSource::Estimated => {
                    let pilot = pilot.as_ref().unwrap();
                    alpha_from_residuals(&ranked, &pilot.residuals, &pilot.profile)?
                }
            };
            (weights, Some(alpha))
        }
    };

    let plan = compute_thresholds(
        n,
        &pyramid,
        &config.threshold,
        alpha_used.unwrap_or(1.0),
        &weights,
    )?;
    let mut kept = apply_threshold(&pyramid, &plan)?;
    let top_level = resolution_cutoff(n, config.adaptivity)?.max(kept.coarse_level());
    for (j, level) in kept.details_mut() {
        if j > top_level {
            level.iter_mut().for_each(|b| *b = 0.0);
        }
    }
    if drop_scaling {
        kept.scaling_mut().iter_mut().for_each(|c| *c = 0.0);
    }
    let retained = kept
        .details()
        .map(|(_, c)| c.iter().filter(|b| **b != 0.0).count())
        .collect();
    let fitted = fitted_on_design_grid(&kept, &filter);

    Ok(FitResult {
        fitted,
        pyramid_kept: kept,
        plan,
        alpha_used,
        top_level,
        retained,
        sorted_xs,
        permutation,
    })
}

/// Residuals are moved back to observation order and divided by the
/// profile so that the periodogram sees the noise process itself.
fn alpha_from_residuals(ranked: &RankedSample, residuals: &[f64], profile: &SigmaProfile) -> Result<f64> {
    let mut pairs: Vec<(usize, f64)> = ranked
        .permutation()
        .iter()
        .zip(residuals.iter().zip(profile.values()))
        .map(|(&obs, (r, s))| (obs, if *s > 0.0 { r / s } else { *r }))
        .collect();
    pairs.sort_by_key(|p| p.0);
    let series: Vec<f64> = pairs.into_iter().map(|p| p.1).collect();
    estimate_alpha(&series)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoffs() {
        assert_eq!(resolution_cutoff(1024, Adaptivity::Partial).unwrap(), 9);
        // sqrt(1024 / ln 1024) = 12.15 -> 8
        assert_eq!(resolution_cutoff(1024, Adaptivity::Full).unwrap(), 3);
        assert_eq!(resolution_cutoff(4, Adaptivity::Full).unwrap(), 0);
        assert!(resolution_cutoff(1000, Adaptivity::Full).is_err());
    }

    fn grid_sample(n: usize, f: impl Fn(f64) -> f64) -> RegressionSample {
        let xs: Vec<f64> = (0..n).map(|i| (i + 1) as f64 / n as f64).collect();
        let ys = xs.iter().map(|&x| f(x)).collect();
        RegressionSample::new(xs, ys).unwrap()
    }

    #[test]
    fn constant_shape_is_zero() {
        let s = grid_sample(256, |_| 5.0);
        let fit = estimate_shape(&s, &EstimatorConfig::default()).unwrap();
        assert!(fit.fitted.iter().all(|v| v.abs() < 1e-6));
        let fit = estimate_function(&s, &EstimatorConfig::default()).unwrap();
        assert!(fit.fitted.iter().all(|v| (v - 5.0).abs() < 1e-9));
    }

    #[test]
    fn full_mode_zeroes_fine_levels() {
        let s = grid_sample(1024, |x| (20.0 * x).sin() + x);
        let cfg = EstimatorConfig::default().with_adaptivity(Adaptivity::Full);
        let fit = estimate_function(&s, &cfg).unwrap();
        assert_eq!(fit.top_level, 3);
        assert!(fit.retained[4..].iter().all(|c| *c == 0));
    }

    #[test]
    fn lrd_with_estimated_alpha_runs() {
        let n = 512;
        let xs: Vec<f64> = (0..n).map(|i| ((i * 37) % n) as f64 / n as f64).collect();
        let ys = xs
            .iter()
            .enumerate()
            .map(|(i, x)| x * x + 0.05 * ((i as f64 * 1.7).sin()))
            .collect();
        let s = RegressionSample::new(xs, ys).unwrap();
        let cfg = EstimatorConfig::default().with_source(ThresholdSource::Lrd);
        let fit = estimate_function(&s, &cfg).unwrap();
        let a = fit.alpha_used.unwrap();
        assert!(a > 0.0 && a <= 1.0);
    }

    #[test]
    fn supplied_profile_length_is_checked() {
        let s = grid_sample(256, |x| x);
        let cfg = EstimatorConfig::default()
            .with_source(ThresholdSource::Lrd)
            .with_alpha(0.5)
            .with_sigma_profile(SigmaProfile::constant(128, 0.1).unwrap());
        assert!(matches!(estimate_function(&s, &cfg), Err(Error::Shape(_))));
    }
}
