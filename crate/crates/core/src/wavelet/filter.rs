#![allow(clippy::excessive_precision)]

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Supported orthonormal filter families. The number after `Db` is the
/// number of vanishing moments of the wavelet, so `Db6` has 12 taps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterName {
    Haar,
    Db2,
    Db4,
    Db6,
}

impl FilterName {
    pub const ALL: [FilterName; 4] = [
        FilterName::Haar,
        FilterName::Db2,
        FilterName::Db4,
        FilterName::Db6,
    ];

    pub fn vanishing_moments(self) -> usize {
        match self {
            FilterName::Haar => 1,
            FilterName::Db2 => 2,
            FilterName::Db4 => 4,
            FilterName::Db6 => 6,
        }
    }
}

impl fmt::Display for FilterName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FilterName::Haar => "haar",
            FilterName::Db2 => "db2",
            FilterName::Db4 => "db4",
            FilterName::Db6 => "db6",
        };
        f.write_str(s)
    }
}

impl FromStr for FilterName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(FilterName::Haar),
            "db2" => Ok(FilterName::Db2),
            "db4" => Ok(FilterName::Db4),
            "db6" => Ok(FilterName::Db6),
            other => Err(Error::config(format!(
                "unsupported wavelet filter '{other}' (expected haar, db2, db4 or db6)"
            ))),
        }
    }
}

// Minimum-phase Daubechies lowpass filters, normalized to sum to sqrt(2).
// Values from spectral factorization carried out at 50 significant digits;
// the literals keep 20 of them.
const HAAR: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

const DB2: [f64; 4] = [
    0.482_962_913_144_534_143_37,
    0.836_516_303_737_807_905_58,
    0.224_143_868_042_013_381_03,
    -0.129_409_522_551_260_381_17,
];

const DB4: [f64; 8] = [
    0.230_377_813_308_896_500_86,
    0.714_846_570_552_915_647_09,
    0.630_880_767_929_858_907_88,
    -0.027_983_769_416_859_854_211,
    -0.187_034_811_719_093_084_08,
    0.030_841_381_835_560_763_627,
    0.032_883_011_666_885_199_735,
    -0.010_597_401_785_069_032_105,
];

const DB6: [f64; 12] = [
    0.111_540_743_350_109_463_62,
    0.494_623_890_398_453_085_68,
    0.751_133_908_021_095_350_68,
    0.315_250_351_709_197_629_09,
    -0.226_264_693_965_439_820_08,
    -0.129_766_867_567_261_935_56,
    0.097_501_605_587_323_049_102,
    0.027_522_865_530_305_728_626,
    -0.031_582_039_317_486_029_565,
    0.000_553_842_201_161_496_139_25,
    0.004_777_257_510_945_510_639_6,
    -0.001_077_301_085_308_479_564_9,
];

/// An orthonormal two-channel filter bank.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilter {
    name: FilterName,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

impl WaveletFilter {
    pub fn new(name: FilterName) -> Self {
        let lowpass: Vec<f64> = match name {
            FilterName::Haar => HAAR.to_vec(),
            FilterName::Db2 => DB2.to_vec(),
            FilterName::Db4 => DB4.to_vec(),
            FilterName::Db6 => DB6.to_vec(),
        };
        // quadrature mirror: g_k = (-1)^k h_{L-1-k}
        let len = lowpass.len();
        let highpass = (0..len)
            .map(|k| {
                let v = lowpass[len - 1 - k];
                if k % 2 == 0 {
                    v
                } else {
                    -v
                }
            })
            .collect();
        WaveletFilter {
            name,
            lowpass,
            highpass,
        }
    }

    /// Looks a filter up by its textual name (`"haar"`, `"db2"`, ...).
    pub fn by_name(name: &str) -> Result<Self> {
        name.parse().map(Self::new)
    }

    pub fn name(&self) -> FilterName {
        self.name
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }

    pub fn vanishing_moments(&self) -> usize {
        self.name.vanishing_moments()
    }
}

/// Free-function form of [`WaveletFilter::new`].
pub fn build_filter(name: FilterName) -> WaveletFilter {
    WaveletFilter::new(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn haar_taps() {
        let f = build_filter(FilterName::Haar);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(f.len(), 2);
        assert!((f.lowpass()[0] - r).abs() < 1e-15);
        assert!((f.lowpass()[1] - r).abs() < 1e-15);
    }

    #[test]
    fn lowpass_sums_to_sqrt2() {
        for name in FilterName::ALL {
            let f = build_filter(name);
            let s: f64 = f.lowpass().iter().sum();
            assert!((s - 2f64.sqrt()).abs() < TOL, "{name}: {s}");
            assert_eq!(f.len(), 2 * name.vanishing_moments());
        }
    }

    #[test]
    fn double_shift_orthonormality() {
        for name in FilterName::ALL {
            let h = build_filter(name).lowpass().to_vec();
            for m in 0..h.len() / 2 {
                let acc: f64 = (0..h.len() - 2 * m).map(|k| h[k] * h[k + 2 * m]).sum();
                let want = if m == 0 { 1.0 } else { 0.0 };
                assert!((acc - want).abs() < TOL, "{name} m={m}: {acc}");
            }
        }
    }

    #[test]
    fn highpass_vanishing_moments() {
        for name in FilterName::ALL {
            let f = build_filter(name);
            for t in 0..name.vanishing_moments() as i32 {
                let m: f64 = f
                    .highpass()
                    .iter()
                    .enumerate()
                    .map(|(k, g)| (k as f64).powi(t) * g)
                    .sum();
                assert!(m.abs() < 1e-8, "{name} moment {t}: {m}");
            }
        }
    }

    #[test]
    fn db2_matches_closed_form() {
        // (1 ± sqrt3, 3 ± sqrt3) / (4 sqrt2)
        let s3 = 3f64.sqrt();
        let c = 4.0 * 2f64.sqrt();
        let want = [(1.0 + s3) / c, (3.0 + s3) / c, (3.0 - s3) / c, (1.0 - s3) / c];
        let f = build_filter(FilterName::Db2);
        for (a, b) in f.lowpass().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn unknown_name_is_config_error() {
        assert!(matches!(WaveletFilter::by_name("DB7"), Err(Error::Config(_))));
        assert_eq!(WaveletFilter::by_name("DB6").unwrap().name(), FilterName::Db6);
    }
}
