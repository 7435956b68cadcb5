use serde::{Deserialize, Serialize};

use super::filter::WaveletFilter;
use crate::error::{Error, Result};

/// Scaling coefficients at `coarse_level` plus one detail array per level
/// `coarse_level..=fine_level`. Level `j` holds exactly `2^j` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientPyramid {
    coarse_level: u32,
    scaling: Vec<f64>,
    details: Vec<Vec<f64>>,
}

impl CoefficientPyramid {
    /// Builds a pyramid, checking that every array has its dyadic length.
    pub fn new(coarse_level: u32, scaling: Vec<f64>, details: Vec<Vec<f64>>) -> Result<Self> {
        if details.is_empty() {
            return Err(Error::shape("pyramid needs at least one detail level"));
        }
        if scaling.len() != 1usize << coarse_level {
            return Err(Error::shape(format!(
                "scaling array has length {}, expected 2^{coarse_level}",
                scaling.len()
            )));
        }
        for (offset, level) in details.iter().enumerate() {
            let j = coarse_level as usize + offset;
            if level.len() != 1usize << j {
                return Err(Error::shape(format!(
                    "detail level {j} has length {}, expected 2^{j}",
                    level.len()
                )));
            }
        }
        Ok(CoefficientPyramid {
            coarse_level,
            scaling,
            details,
        })
    }

    pub fn zeros(coarse_level: u32, fine_level: u32) -> Result<Self> {
        if fine_level < coarse_level {
            return Err(Error::shape(format!(
                "fine level {fine_level} below coarse level {coarse_level}"
            )));
        }
        let details = (coarse_level..=fine_level)
            .map(|j| vec![0.0; 1usize << j])
            .collect();
        Self::new(coarse_level, vec![0.0; 1usize << coarse_level], details)
    }

    pub fn coarse_level(&self) -> u32 {
        self.coarse_level
    }

    pub fn fine_level(&self) -> u32 {
        self.coarse_level + self.details.len() as u32 - 1
    }

    /// Length of the signal this pyramid synthesizes, `2^(fine_level+1)`.
    pub fn signal_len(&self) -> usize {
        1usize << (self.fine_level() + 1)
    }

    /// Total number of stored coefficients; always equals `signal_len`.
    pub fn coefficient_count(&self) -> usize {
        self.scaling.len() + self.details.iter().map(Vec::len).sum::<usize>()
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<u32> {
        self.coarse_level..=self.fine_level()
    }

    pub fn scaling(&self) -> &[f64] {
        &self.scaling
    }

    pub fn scaling_mut(&mut self) -> &mut [f64] {
        &mut self.scaling
    }

    /// Detail coefficients at absolute level `j`.
    ///
    /// Panics when `j` lies outside `levels()`.
    pub fn detail(&self, j: u32) -> &[f64] {
        &self.details[self.level_index(j)]
    }

    pub fn detail_mut(&mut self, j: u32) -> &mut [f64] {
        let idx = self.level_index(j);
        &mut self.details[idx]
    }

    /// Iterates `(level, coefficients)` from coarse to fine.
    pub fn details(&self) -> impl Iterator<Item = (u32, &[f64])> + '_ {
        self.details
            .iter()
            .enumerate()
            .map(move |(i, d)| (self.coarse_level + i as u32, d.as_slice()))
    }

    pub fn details_mut(&mut self) -> impl Iterator<Item = (u32, &mut Vec<f64>)> + '_ {
        let j0 = self.coarse_level;
        self.details
            .iter_mut()
            .enumerate()
            .map(move |(i, d)| (j0 + i as u32, d))
    }

    /// Multiplies every coefficient, scaling and detail, by `factor`.
    pub fn scale(&mut self, factor: f64) {
        self.scaling.iter_mut().for_each(|v| *v *= factor);
        for level in &mut self.details {
            level.iter_mut().for_each(|v| *v *= factor);
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.scale(factor);
        self
    }

    pub fn energy(&self) -> f64 {
        self.scaling.iter().map(|v| v * v).sum::<f64>()
            + self
                .details
                .iter()
                .flat_map(|d| d.iter())
                .map(|v| v * v)
                .sum::<f64>()
    }

    /// All coefficients flattened as `[scaling, detail_j0, ..., detail_j1]`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.coefficient_count());
        out.extend_from_slice(&self.scaling);
        for d in &self.details {
            out.extend_from_slice(d);
        }
        out
    }

    fn level_index(&self, j: u32) -> usize {
        assert!(
            self.levels().contains(&j),
            "level {j} outside pyramid levels {:?}",
            self.levels()
        );
        (j - self.coarse_level) as usize
    }
}

/// Exponent `J` with `2^J == len`, if `len` is a power of two.
pub fn dyadic_exponent(len: usize) -> Option<u32> {
    if len.is_power_of_two() {
        Some(len.trailing_zeros())
    } else {
        None
    }
}

// One analysis step on a periodic signal of even length.
fn analysis_step(input: &[f64], filter: &WaveletFilter, approx: &mut [f64], detail: &mut [f64]) {
    let n = input.len();
    let h = filter.lowpass();
    let g = filter.highpass();
    for k in 0..n / 2 {
        let mut a = 0.0;
        let mut d = 0.0;
        for (l, (hl, gl)) in h.iter().zip(g).enumerate() {
            let x = input[(2 * k + l) % n];
            a += hl * x;
            d += gl * x;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

// Adjoint of `analysis_step`; writes a signal of length 2 * approx.len().
fn synthesis_step(approx: &[f64], detail: &[f64], filter: &WaveletFilter, out: &mut [f64]) {
    let n = out.len();
    out.iter_mut().for_each(|v| *v = 0.0);
    let h = filter.lowpass();
    let g = filter.highpass();
    for k in 0..approx.len() {
        let (a, d) = (approx[k], detail[k]);
        for (l, (hl, gl)) in h.iter().zip(g).enumerate() {
            out[(2 * k + l) % n] += hl * a + gl * d;
        }
    }
}

/// Periodized orthonormal pyramid transform of a dyadic-length signal down
/// to `coarse_level`. The result has `fine_level == J - 1`.
pub fn dwt_forward(
    signal: &[f64],
    filter: &WaveletFilter,
    coarse_level: u32,
) -> Result<CoefficientPyramid> {
    let big_j = dyadic_exponent(signal.len()).ok_or_else(|| {
        Error::shape(format!(
            "signal length {} is not a power of two",
            signal.len()
        ))
    })?;
    if coarse_level >= big_j {
        return Err(Error::shape(format!(
            "coarse level {coarse_level} must be below log2(length) = {big_j}"
        )));
    }
    let mut current = signal.to_vec();
    let mut details = Vec::with_capacity((big_j - coarse_level) as usize);
    for _ in coarse_level..big_j {
        let half = current.len() / 2;
        let mut approx = vec![0.0; half];
        let mut detail = vec![0.0; half];
        analysis_step(&current, filter, &mut approx, &mut detail);
        details.push(detail);
        current = approx;
    }
    details.reverse();
    CoefficientPyramid::new(coarse_level, current, details)
}

/// Inverse of [`dwt_forward`] for the same filter.
pub fn dwt_inverse(pyramid: &CoefficientPyramid, filter: &WaveletFilter) -> Vec<f64> {
    let mut current = pyramid.scaling().to_vec();
    for (_, detail) in pyramid.details() {
        let mut out = vec![0.0; 2 * current.len()];
        synthesis_step(&current, detail, filter, &mut out);
        current = out;
    }
    current
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::filter::{build_filter, FilterName};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_signal(len: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn haar_two_point_example() {
        let f = build_filter(FilterName::Haar);
        let p = dwt_forward(&[1.0, 3.0], &f, 0).unwrap();
        let r2 = 2f64.sqrt();
        assert!((p.scaling()[0] - 4.0 / r2).abs() < 1e-15);
        assert!((p.detail(0)[0] + 2.0 / r2).abs() < 1e-15);
    }

    #[test]
    fn constants_have_no_detail() {
        for name in FilterName::ALL {
            let f = build_filter(name);
            let p = dwt_forward(&[2.5; 256], &f, 0).unwrap();
            for (_, d) in p.details() {
                assert!(d.iter().all(|v| v.abs() < 1e-10), "{name}");
            }
        }
    }

    #[test]
    fn non_dyadic_length_is_shape_error() {
        let f = build_filter(FilterName::Db2);
        assert!(matches!(
            dwt_forward(&[0.0; 100], &f, 0),
            Err(Error::Shape(_))
        ));
        assert!(matches!(dwt_forward(&[0.0; 8], &f, 3), Err(Error::Shape(_))));
    }

    #[test]
    fn roundtrip_1024() {
        let x = random_signal(1024, 7);
        for name in FilterName::ALL {
            let f = build_filter(name);
            let p = dwt_forward(&x, &f, 0).unwrap();
            assert_eq!(p.fine_level(), 9);
            assert_eq!(p.coefficient_count(), 1024);
            let y = dwt_inverse(&p, &f);
            for (a, b) in x.iter().zip(&y) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_pyramid_synthesizes_zero() {
        let p = CoefficientPyramid::zeros(0, 5).unwrap();
        let y = dwt_inverse(&p, &build_filter(FilterName::Db4));
        assert_eq!(y.len(), 64);
        assert!(y.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn single_detail_atom_has_unit_energy() {
        let f = build_filter(FilterName::Db6);
        let mut p = CoefficientPyramid::zeros(0, 9).unwrap();
        p.detail_mut(3)[2] = 1.0;
        let y = dwt_inverse(&p, &f);
        let e: f64 = y.iter().map(|v| v * v).sum();
        assert!((e - 1.0).abs() < 1e-10);
        // and analysis recovers the atom
        let back = dwt_forward(&y, &f, 0).unwrap();
        assert!((back.detail(3)[2] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn coarse_level_offsets() {
        let f = build_filter(FilterName::Db2);
        let x = random_signal(64, 3);
        let p = dwt_forward(&x, &f, 2).unwrap();
        assert_eq!(p.scaling().len(), 4);
        assert_eq!(p.levels(), 2..=5);
        let y = dwt_inverse(&p, &f);
        assert!(x.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn malformed_pyramid_rejected() {
        assert!(CoefficientPyramid::new(0, vec![0.0], vec![vec![0.0; 3]]).is_err());
        assert!(CoefficientPyramid::new(1, vec![0.0], vec![vec![0.0; 2]]).is_err());
        assert!(CoefficientPyramid::zeros(3, 2).is_err());
    }
}
