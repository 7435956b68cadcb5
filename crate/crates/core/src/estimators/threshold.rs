use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::mad_sigma;
use crate::wavelet::CoefficientPyramid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdPolicy {
    #[default]
    Hard,
    Soft,
}

/// Where the per-level threshold comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdSource {
    /// Universal threshold `τ √(2 ln n) / √n` on every level.
    #[default]
    Dj,
    /// `τ · max(ln n / √n, 1{m_j > tol} · √(ln n) / n^{α/2})`.
    Lrd,
}

/// How the noise scale `τ0` is estimated from the empirical pyramid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tau0Mode {
    /// One MAD estimate from the finest detail level.
    #[default]
    Global,
    /// A separate MAD estimate on every level.
    ByLevel,
}

/// How the σ-coefficient weights `m_j` gate the long-memory branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LrdBranch {
    /// Branch active when `m_j > 1e-3 · max_j m_j`.
    #[default]
    Indicator,
    /// Branch multiplied by `m_j / max_j m_j`. Experimental.
    Weighted,
}

/// Relative tolerance below which a level weight counts as zero.
pub const WEIGHT_TOLERANCE: f64 = 1e-3;

macro_rules! text_enum {
    ($ty:ty, $what:literal, { $($text:literal => $variant:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_lowercase().as_str() {
                    $($text => Ok($variant),)+
                    other => Err(Error::config(format!(concat!("unknown ", $what, " '{}'"), other))),
                }
            }
        }
    };
}

text_enum!(ThresholdPolicy, "threshold policy", { "hard" => ThresholdPolicy::Hard, "soft" => ThresholdPolicy::Soft });
text_enum!(ThresholdSource, "threshold source", {
    "dj" => ThresholdSource::Dj,
    "universal" => ThresholdSource::Dj,
    "lrd" => ThresholdSource::Lrd,
});
text_enum!(Tau0Mode, "tau0 mode", {
    "global" => Tau0Mode::Global,
    "by-level" => Tau0Mode::ByLevel,
    "by_level" => Tau0Mode::ByLevel,
});
text_enum!(LrdBranch, "lrd branch", { "indicator" => LrdBranch::Indicator, "weighted" => LrdBranch::Weighted });

impl fmt::Display for ThresholdPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdPolicy::Hard => "hard",
            ThresholdPolicy::Soft => "soft",
        })
    }
}

impl fmt::Display for ThresholdSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdSource::Dj => "dj",
            ThresholdSource::Lrd => "lrd",
        })
    }
}

impl fmt::Display for Tau0Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tau0Mode::Global => "global",
            Tau0Mode::ByLevel => "by-level",
        })
    }
}

/// Threshold options, independent of any particular sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub source: ThresholdSource,
    pub policy: ThresholdPolicy,
    pub tau0_mode: Tau0Mode,
    /// Multiplier on the estimated noise scale.
    pub tau0_multiplier: f64,
    pub lrd_branch: LrdBranch,
}

impl Default for ThresholdSpec {
    fn default() -> Self {
        ThresholdSpec {
            source: ThresholdSource::Dj,
            policy: ThresholdPolicy::Hard,
            tau0_mode: Tau0Mode::Global,
            tau0_multiplier: 1.0,
            lrd_branch: LrdBranch::Indicator,
        }
    }
}

/// Per-level thresholds for one pyramid, on the `1/√n` coefficient scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPlan {
    pub policy: ThresholdPolicy,
    pub source: ThresholdSource,
    pub tau0_mode: Tau0Mode,
    coarse_level: u32,
    per_level: Vec<f64>,
    noise_scale: Vec<f64>,
}

impl ThresholdPlan {
    /// A plan with externally chosen thresholds for levels
    /// `coarse_level..coarse_level + per_level.len()`.
    pub fn fixed(policy: ThresholdPolicy, coarse_level: u32, per_level: Vec<f64>) -> Result<Self> {
        if per_level.is_empty() {
            return Err(Error::shape("threshold plan covers no levels"));
        }
        if per_level.iter().any(|l| !(*l >= 0.0)) {
            return Err(Error::domain("thresholds must be nonnegative"));
        }
        let noise_scale = vec![f64::NAN; per_level.len()];
        Ok(ThresholdPlan {
            policy,
            source: ThresholdSource::Dj,
            tau0_mode: Tau0Mode::Global,
            coarse_level,
            per_level,
            noise_scale,
        })
    }

    pub fn coarse_level(&self) -> u32 {
        self.coarse_level
    }

    pub fn fine_level(&self) -> u32 {
        self.coarse_level + self.per_level.len() as u32 - 1
    }

    /// Threshold at absolute level `j`.
    pub fn lambda(&self, j: u32) -> f64 {
        self.per_level[(j - self.coarse_level) as usize]
    }

    pub fn per_level(&self) -> &[f64] {
        &self.per_level
    }

    /// Estimated `τ0` (before the multiplier) at each level; NaN for fixed plans.
    pub fn noise_scale(&self) -> &[f64] {
        &self.noise_scale
    }

    /// The same plan with every threshold multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut plan = self.clone();
        plan.per_level.iter_mut().for_each(|l| *l *= factor);
        plan.noise_scale.iter_mut().for_each(|s| *s *= factor);
        plan
    }
}

/// Builds the per-level thresholds for `pyramid` (empirical coefficients of
/// a sample of size `n`).
///
/// `weights` are the σ-coefficient level averages `m_j`, indexed by
/// absolute level and covering at least `0..=fine_level`; they are only
/// read for the long-memory source. `alpha_hat` must lie in `(0, 1]`.
pub fn compute_thresholds(
    n: usize,
    pyramid: &CoefficientPyramid,
    spec: &ThresholdSpec,
    alpha_hat: f64,
    weights: &[f64],
) -> Result<ThresholdPlan> {
    if !(alpha_hat > 0.0 && alpha_hat <= 1.0) {
        return Err(Error::domain(format!(
            "alpha estimate must lie in (0, 1], got {alpha_hat}"
        )));
    }
    if n < 2 {
        return Err(Error::domain("threshold needs n >= 2"));
    }
    if !(spec.tau0_multiplier > 0.0) {
        return Err(Error::domain("tau0 multiplier must be positive"));
    }
    let fine = pyramid.fine_level();
    if spec.source == ThresholdSource::Lrd && weights.len() <= fine as usize {
        return Err(Error::shape(format!(
            "level weights cover {} levels, pyramid reaches level {fine}",
            weights.len()
        )));
    }

    let nf = n as f64;
    let root_n = nf.sqrt();
    let ln_n = nf.ln();

    // raw coefficients are √n · β̂
    let raw_sigma = |coeffs: &[f64]| mad_sigma(coeffs) * root_n;
    let global = raw_sigma(pyramid.detail(fine));
    let noise_scale: Vec<f64> = pyramid
        .levels()
        .map(|j| match spec.tau0_mode {
            Tau0Mode::Global => global,
            Tau0Mode::ByLevel => raw_sigma(pyramid.detail(j)),
        })
        .collect();

    let max_weight = weights.iter().take(fine as usize + 1).cloned().fold(0.0, f64::max);
    let universal = (2.0 * ln_n).sqrt() / root_n;
    let base = ln_n / root_n;
    let lrd_term = ln_n.sqrt() / nf.powf(alpha_hat / 2.0);

    let per_level = pyramid
        .levels()
        .zip(&noise_scale)
        .map(|(j, sigma)| {
            let tau = spec.tau0_multiplier * sigma;
            match spec.source {
                ThresholdSource::Dj => tau * universal,
                ThresholdSource::Lrd => {
                    let m = weights[j as usize];
                    let gate = match spec.lrd_branch {
                        LrdBranch::Indicator => {
                            if max_weight > 0.0 && m > WEIGHT_TOLERANCE * max_weight {
                                1.0
                            } else {
                                0.0
                            }
                        }
                        LrdBranch::Weighted => {
                            if max_weight > 0.0 {
                                m / max_weight
                            } else {
                                0.0
                            }
                        }
                    };
                    tau * base.max(gate * lrd_term)
                }
            }
        })
        .collect();

    Ok(ThresholdPlan {
        policy: spec.policy,
        source: spec.source,
        tau0_mode: spec.tau0_mode,
        coarse_level: pyramid.coarse_level(),
        per_level,
        noise_scale,
    })
}

pub fn hard_threshold(beta: f64, lambda: f64) -> f64 {
    if beta.abs() >= lambda {
        beta
    } else {
        0.0
    }
}

pub fn soft_threshold(beta: f64, lambda: f64) -> f64 {
    beta.signum() * (beta.abs() - lambda).max(0.0)
}

/// Thresholds every detail coefficient; scaling coefficients pass through.
pub fn apply_threshold(pyramid: &CoefficientPyramid, plan: &ThresholdPlan) -> Result<CoefficientPyramid> {
    if plan.coarse_level != pyramid.coarse_level() || plan.fine_level() != pyramid.fine_level() {
        return Err(Error::shape(format!(
            "plan covers levels {}..={}, pyramid has {:?}",
            plan.coarse_level,
            plan.fine_level(),
            pyramid.levels()
        )));
    }
    let rule = match plan.policy {
        ThresholdPolicy::Hard => hard_threshold,
        ThresholdPolicy::Soft => soft_threshold,
    };
    let mut out = pyramid.clone();
    for (j, level) in out.details_mut() {
        let lambda = plan.lambda(j);
        level.iter_mut().for_each(|b| *b = rule(*b, lambda));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::CoefficientPyramid;

    /// A pyramid for n = 1024 whose finest level has raw MAD scale 1.
    fn unit_noise_pyramid() -> CoefficientPyramid {
        let mut p = CoefficientPyramid::zeros(0, 9).unwrap();
        let root_n = 32.0;
        // |values| symmetric around 0.6745 -> median |x| = 0.6745
        for (k, v) in p.detail_mut(9).iter_mut().enumerate() {
            let raw = if k % 2 == 0 { 0.6745 * 0.5 } else { 0.6745 * 1.5 };
            *v = raw / root_n;
        }
        p
    }

    fn lrd_spec() -> ThresholdSpec {
        ThresholdSpec {
            source: ThresholdSource::Lrd,
            ..ThresholdSpec::default()
        }
    }

    #[test]
    fn policies() {
        assert_eq!(hard_threshold(0.5, 0.3), 0.5);
        assert_eq!(hard_threshold(0.2, 0.3), 0.0);
        assert!((soft_threshold(-0.5, 0.3) + 0.2).abs() < 1e-15);
        assert_eq!(soft_threshold(0.1, 0.3), 0.0);
    }

    #[test]
    fn hand_evaluated_lrd_thresholds() {
        let p = unit_noise_pyramid();
        let weights = vec![1.0; 10];
        // median of |raw| is the average of the two middle values 0.6745*0.5, 0.6745*1.5
        let plan = compute_thresholds(1024, &p, &lrd_spec(), 0.5, &weights).unwrap();
        assert!((plan.noise_scale()[0] - 1.0).abs() < 1e-12);
        for l in plan.per_level() {
            assert!((l - 0.465_4).abs() < 1e-4, "{l}");
        }
        let plan = compute_thresholds(1024, &p, &lrd_spec(), 1.0, &weights).unwrap();
        for l in plan.per_level() {
            assert!((l - 0.216_6).abs() < 1e-4, "{l}");
        }
    }

    #[test]
    fn zero_weights_make_plan_alpha_free() {
        let p = unit_noise_pyramid();
        let weights = vec![0.0; 10];
        let a = compute_thresholds(1024, &p, &lrd_spec(), 0.1, &weights).unwrap();
        let b = compute_thresholds(1024, &p, &lrd_spec(), 1.0, &weights).unwrap();
        assert_eq!(a, b);
        let want = (1024f64).ln() / 32.0;
        assert!(a.per_level().iter().all(|l| (l - want).abs() < 1e-12));
    }

    #[test]
    fn universal_threshold() {
        let p = unit_noise_pyramid();
        let plan = compute_thresholds(1024, &p, &ThresholdSpec::default(), 1.0, &[]).unwrap();
        let want = (2.0 * 1024f64.ln()).sqrt() / 32.0;
        assert!(plan.per_level().iter().all(|l| (l - want).abs() < 1e-12));
    }

    #[test]
    fn alpha_out_of_range() {
        let p = unit_noise_pyramid();
        for a in [0.0, -0.5, 1.5, f64::NAN] {
            assert!(matches!(
                compute_thresholds(1024, &p, &lrd_spec(), a, &[0.0; 10]),
                Err(Error::Domain(_))
            ));
        }
    }

    #[test]
    fn apply_keeps_scaling_and_checks_levels() {
        let mut p = CoefficientPyramid::zeros(0, 2).unwrap();
        p.scaling_mut()[0] = 0.01;
        p.detail_mut(2)[1] = 0.5;
        p.detail_mut(2)[2] = 0.2;
        let plan = ThresholdPlan::fixed(ThresholdPolicy::Hard, 0, vec![0.3; 3]).unwrap();
        let out = apply_threshold(&p, &plan).unwrap();
        assert_eq!(out.scaling()[0], 0.01);
        assert_eq!(out.detail(2), &[0.0, 0.5, 0.0, 0.0]);

        let short = ThresholdPlan::fixed(ThresholdPolicy::Hard, 0, vec![0.3; 2]).unwrap();
        assert!(matches!(apply_threshold(&p, &short), Err(Error::Shape(_))));
    }

    #[test]
    fn parse_options() {
        assert_eq!("soft".parse::<ThresholdPolicy>().unwrap(), ThresholdPolicy::Soft);
        assert_eq!("by-level".parse::<Tau0Mode>().unwrap(), Tau0Mode::ByLevel);
        assert!("medium".parse::<ThresholdPolicy>().is_err());
    }
}
