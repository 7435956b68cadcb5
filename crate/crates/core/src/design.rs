//! Random-design handling.
//!
//! Under a design `X_i` with distribution function `G`, the warped wavelet
//! coefficient `E[ψ_jk(G(X)) Y]` is estimated by ranking the sample: with
//! `Ĝ_n(X_(i)) = i/n`, the empirical coefficient becomes
//! `(1/n) Σ ψ_jk(i/n) Y_(i)`, which is an ordinary pyramid transform of the
//! responses sorted by design, divided by `√n`. The same rank proxy serves
//! both a known `G` (ranks of `X` equal ranks of `G(X)`) and the empirical
//! one.

use crate::error::{Error, Result};
use crate::wavelet::{dwt_forward, dwt_inverse, dyadic_exponent, CoefficientPyramid, WaveletFilter};

/// Paired observations `(X_i, Y_i)` in observation order.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSample {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl RegressionSample {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::shape(format!(
                "design has {} points but there are {} responses",
                xs.len(),
                ys.len()
            )));
        }
        if xs.is_empty() {
            return Err(Error::shape("empty sample"));
        }
        if let Some(i) = xs.iter().position(|x| !x.is_finite()) {
            return Err(Error::domain(format!("design point {i} is not finite")));
        }
        if let Some(i) = ys.iter().position(|y| !y.is_finite()) {
            return Err(Error::domain(format!("response {i} is not finite")));
        }
        Ok(RegressionSample { xs, ys })
    }

    /// Like [`RegressionSample::new`], additionally asserting a design
    /// supported on `[0, 1]`.
    pub fn on_unit_interval(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if let Some(i) = xs.iter().position(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::domain(format!(
                "design point {i} = {} lies outside [0, 1]",
                xs[i]
            )));
        }
        Self::new(xs, ys)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Splits into the first `k` and the remaining observations.
    pub fn split_at(&self, k: usize) -> Result<(RegressionSample, RegressionSample)> {
        if k == 0 || k >= self.len() {
            return Err(Error::shape(format!(
                "cannot split a sample of {} at {k}",
                self.len()
            )));
        }
        Ok((
            RegressionSample::new(self.xs[..k].to_vec(), self.ys[..k].to_vec())?,
            RegressionSample::new(self.xs[k..].to_vec(), self.ys[k..].to_vec())?,
        ))
    }
}

/// Right-continuous empirical distribution function of a design sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted_xs: Vec<f64>,
}

impl EmpiricalCdf {
    /// `#{x_i <= x} / n`.
    pub fn eval(&self, x: f64) -> f64 {
        self.count_le(x) as f64 / self.sorted_xs.len() as f64
    }

    /// `#{x_i <= x}`, i.e. `n · Ĝ_n(x)` without rounding.
    pub fn count_le(&self, x: f64) -> usize {
        self.sorted_xs.partition_point(|v| *v <= x)
    }

    pub fn sorted_xs(&self) -> &[f64] {
        &self.sorted_xs
    }

    pub fn len(&self) -> usize {
        self.sorted_xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_xs.is_empty()
    }
}

pub fn empirical_cdf(xs: &[f64]) -> Result<EmpiricalCdf> {
    if xs.is_empty() {
        return Err(Error::shape("empirical cdf of an empty sample"));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("empirical cdf needs finite values"));
    }
    let mut sorted_xs = xs.to_vec();
    sorted_xs.sort_by(|a, b| a.total_cmp(b));
    Ok(EmpiricalCdf { sorted_xs })
}

/// Responses in design order. `ordered_ys[i] == ys[permutation[i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedPairs {
    pub ordered_ys: Vec<f64>,
    pub permutation: Vec<usize>,
}

/// Sorts the pairs by design point; ties keep their original order.
pub fn order_pairs(sample: &RegressionSample) -> OrderedPairs {
    let mut permutation: Vec<usize> = (0..sample.len()).collect();
    // sort_by is stable
    permutation.sort_by(|&a, &b| sample.xs[a].total_cmp(&sample.xs[b]));
    let ordered_ys = permutation.iter().map(|&i| sample.ys[i]).collect();
    OrderedPairs {
        ordered_ys,
        permutation,
    }
}

/// What to do when the sample size is not a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SizePolicy {
    /// Reject with a shape error.
    #[default]
    Strict,
    /// Keep `2^J <= n` ranked observations, evenly spaced in rank.
    Thin,
}

/// A sample sorted by design and cut to a dyadic size.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedSample {
    sorted_xs: Vec<f64>,
    ordered_ys: Vec<f64>,
    permutation: Vec<usize>,
    original_len: usize,
}

impl RankedSample {
    pub fn new(sample: &RegressionSample, policy: SizePolicy) -> Result<Self> {
        let OrderedPairs {
            ordered_ys,
            permutation,
        } = order_pairs(sample);
        let n = sample.len();
        let (ordered_ys, permutation) = if n.is_power_of_two() {
            (ordered_ys, permutation)
        } else {
            match policy {
                SizePolicy::Strict => {
                    return Err(Error::shape(format!(
                        "sample size {n} is not a power of two"
                    )))
                }
                SizePolicy::Thin => {
                    let keep = 1usize << (usize::BITS - 1 - n.leading_zeros());
                    let picks: Vec<usize> = (0..keep).map(|i| i * n / keep).collect();
                    (
                        picks.iter().map(|&r| ordered_ys[r]).collect(),
                        picks.iter().map(|&r| permutation[r]).collect(),
                    )
                }
            }
        };
        if ordered_ys.len() < 2 {
            return Err(Error::shape("need at least two observations"));
        }
        let sorted_xs = permutation.iter().map(|&i| sample.xs[i]).collect();
        Ok(RankedSample {
            sorted_xs,
            ordered_ys,
            permutation,
            original_len: n,
        })
    }

    pub fn len(&self) -> usize {
        self.ordered_ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered_ys.is_empty()
    }

    /// Observations dropped by [`SizePolicy::Thin`].
    pub fn dropped(&self) -> usize {
        self.original_len - self.len()
    }

    pub fn sorted_xs(&self) -> &[f64] {
        &self.sorted_xs
    }

    pub fn ordered_ys(&self) -> &[f64] {
        &self.ordered_ys
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn coefficients(
        &self,
        filter: &WaveletFilter,
        coarse_level: u32,
    ) -> Result<CoefficientPyramid> {
        proxy_coefficients(&self.ordered_ys, filter, coarse_level)
    }
}

/// Warped empirical coefficients `β̂_jk = (1/n) Σ ψ_jk(i/n) Y_(i)` of a
/// sample whose size is a power of two.
pub fn empirical_coefficients(
    sample: &RegressionSample,
    filter: &WaveletFilter,
    coarse_level: u32,
) -> Result<CoefficientPyramid> {
    RankedSample::new(sample, SizePolicy::Strict)?.coefficients(filter, coarse_level)
}

/// Coefficients of values already laid out on the rank grid, on the `1/√n`
/// scale of the empirical coefficients.
pub fn proxy_coefficients(
    grid_values: &[f64],
    filter: &WaveletFilter,
    coarse_level: u32,
) -> Result<CoefficientPyramid> {
    let n = grid_values.len();
    let pyramid = dwt_forward(grid_values, filter, coarse_level)?;
    Ok(pyramid.scaled(1.0 / (n as f64).sqrt()))
}

/// Synthesizes the estimate on the rank grid: entry `i` estimates
/// `f(Ĝ_n^{-1}((i+1)/n))`. Exact inverse of [`proxy_coefficients`].
pub fn fitted_on_design_grid(pyramid: &CoefficientPyramid, filter: &WaveletFilter) -> Vec<f64> {
    let root_n = (pyramid.signal_len() as f64).sqrt();
    let mut out = dwt_inverse(pyramid, filter);
    out.iter_mut().for_each(|v| *v *= root_n);
    out
}

/// Sample-split coefficients: the first half of `sample` defines `Ĝ_n`,
/// the second half supplies `(1/n) Σ ψ_jk(Ĝ_n(X_i)) Y_i`.
///
/// Observations of the second half are binned to their grid position
/// `n·Ĝ_n(X_i)`; a position of 0 wraps to `n` under periodization. Returns
/// the pyramid together with the first-half cdf.
pub fn split_sample_coefficients(
    sample: &RegressionSample,
    filter: &WaveletFilter,
    coarse_level: u32,
) -> Result<(CoefficientPyramid, EmpiricalCdf)> {
    let total = sample.len();
    if !total.is_multiple_of(2) || !(total / 2).is_power_of_two() {
        return Err(Error::shape(format!(
            "sample splitting needs 2n observations with n a power of two, got {total}"
        )));
    }
    let n = total / 2;
    let (first, second) = sample.split_at(n)?;
    let cdf = empirical_cdf(first.xs())?;
    let mut grid = vec![0.0; n];
    for (x, y) in second.xs().iter().zip(second.ys()) {
        let m = cdf.count_le(*x);
        grid[(m + n - 1) % n] += y;
    }
    let pyramid = proxy_coefficients(&grid, filter, coarse_level)?;
    Ok((pyramid, cdf))
}

/// Linear interpolation of rank-grid fitted values at an arbitrary design
/// point, constant beyond the observed range.
pub fn interpolate_fit(sorted_xs: &[f64], fitted: &[f64], x: f64) -> f64 {
    debug_assert_eq!(sorted_xs.len(), fitted.len());
    let n = sorted_xs.len();
    if n == 0 {
        return f64::NAN;
    }
    if x <= sorted_xs[0] {
        return fitted[0];
    }
    if x >= sorted_xs[n - 1] {
        return fitted[n - 1];
    }
    let hi = sorted_xs.partition_point(|v| *v <= x);
    let lo = hi - 1;
    let span = sorted_xs[hi] - sorted_xs[lo];
    if span <= 0.0 {
        return fitted[lo];
    }
    let w = (x - sorted_xs[lo]) / span;
    fitted[lo] * (1.0 - w) + fitted[hi] * w
}

/// `log2(n)` for a dyadic sample size.
pub(crate) fn dyadic_levels(n: usize) -> Result<u32> {
    dyadic_exponent(n).ok_or_else(|| Error::shape(format!("{n} is not a power of two")))
}
