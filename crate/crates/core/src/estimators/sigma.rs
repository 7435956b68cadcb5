use serde::{Deserialize, Serialize};

use super::threshold::hard_threshold;
use crate::design::{fitted_on_design_grid, proxy_coefficients, RankedSample, RegressionSample, SizePolicy};
use crate::error::{Error, Result};
use crate::stats::mad_sigma;
use crate::wavelet::WaveletFilter;

/// Smallest sample for which a noise-level profile is estimated.
pub const MIN_PROFILE_LEN: usize = 64;

/// Noise standard deviation on the rank grid: entry `i` is `σ` at the
/// design point of rank `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaProfile {
    values: Vec<f64>,
}

impl SigmaProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::shape("empty sigma profile"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::domain(format!(
                "sigma profile values must be finite and nonnegative, got {v}"
            )));
        }
        Ok(SigmaProfile { values })
    }

    pub fn constant(n: usize, sigma: f64) -> Result<Self> {
        Self::new(vec![sigma; n])
    }

    /// Evaluates `sigma` at the grid points `(i + 1) / n`.
    pub fn from_fn(n: usize, sigma: impl Fn(f64) -> f64) -> Result<Self> {
        let nf = n as f64;
        Self::new((0..n).map(|i| sigma((i + 1) as f64 / nf)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Profile plus the pilot residuals it was built from, in rank order.
pub(crate) struct ProfileFit {
    pub profile: SigmaProfile,
    pub residuals: Vec<f64>,
}

/// Number of equal-rank bins, `⌈n^{1/3}⌉`, computed without rounding noise.
pub(crate) fn bin_count(n: usize) -> usize {
    let mut b = (n as f64).cbrt().floor() as usize;
    while b * b * b < n {
        b += 1;
    }
    while b > 1 && (b - 1).pow(3) >= n {
        b -= 1;
    }
    b.max(1)
}

pub(crate) fn profile_from_ordered(ordered_ys: &[f64], filter: &WaveletFilter) -> Result<ProfileFit> {
    let n = ordered_ys.len();
    if n < MIN_PROFILE_LEN {
        return Err(Error::domain(format!(
            "sigma profile needs at least {MIN_PROFILE_LEN} observations, got {n}"
        )));
    }
    let mut pyramid = proxy_coefficients(ordered_ys, filter, 0)?;
    let nf = n as f64;
    let fine = pyramid.fine_level();
    let tau = mad_sigma(pyramid.detail(fine)) * nf.sqrt();
    let lambda = tau * (2.0 * nf.ln()).sqrt() / nf.sqrt();
    for (_, level) in pyramid.details_mut() {
        level.iter_mut().for_each(|b| *b = hard_threshold(*b, lambda));
    }
    let pilot = fitted_on_design_grid(&pyramid, filter);
    let residuals: Vec<f64> = ordered_ys.iter().zip(&pilot).map(|(y, f)| y - f).collect();

    let bins = bin_count(n);
    let mut values = vec![0.0; n];
    for b in 0..bins {
        let lo = b * n / bins;
        let hi = (b + 1) * n / bins;
        let ms = residuals[lo..hi].iter().map(|r| r * r).sum::<f64>() / (hi - lo) as f64;
        values[lo..hi].iter_mut().for_each(|v| *v = ms.sqrt());
    }
    Ok(ProfileFit {
        profile: SigmaProfile::new(values)?,
        residuals,
    })
}

/// Estimates the noise-level profile `σ̂(Ĝ_n^{-1}(i/n))`.
///
/// A pilot hard-threshold fit with the universal threshold is removed, and
/// the squared residuals are averaged over `⌈n^{1/3}⌉` equal-rank bins.
pub fn estimate_sigma_profile(sample: &RegressionSample, filter: &WaveletFilter) -> Result<SigmaProfile> {
    let ranked = RankedSample::new(sample, SizePolicy::Strict)?;
    Ok(profile_from_ordered(ranked.ordered_ys(), filter)?.profile)
}

/// Weights below this fraction of the largest profile value are rounding
/// residue of a flat profile and are reported as exactly zero.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// Level averages `m_j = 2^{-j} Σ_k |c_jk|` of the profile's coefficients,
/// indexed by level from 0 to `log2(n) - 1`.
pub fn lrd_level_weights(profile: &SigmaProfile, filter: &WaveletFilter) -> Result<Vec<f64>> {
    let pyramid = proxy_coefficients(profile.values(), filter, 0)?;
    let floor = WEIGHT_FLOOR * profile.values().iter().cloned().fold(0.0, f64::max);
    Ok(pyramid
        .details()
        .map(|(_, c)| c.iter().map(|v| v.abs()).sum::<f64>() / c.len() as f64)
        .map(|m| if m <= floor { 0.0 } else { m })
        .collect())
}
