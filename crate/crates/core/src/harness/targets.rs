use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Signal-to-noise ratio every test function is scaled to, in decibels.
pub const TARGET_SNR_DB: f64 = 9.34;
/// Noise level the SNR refers to.
pub const REFERENCE_SIGMA: f64 = 0.1;
/// Grid size used to fix the scale of a standardized target.
pub const REFERENCE_GRID: usize = 1 << 16;

const BUMP_POSITIONS: [f64; 11] = [0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81];
const BUMP_HEIGHTS: [f64; 11] = [4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2];
const BUMP_WIDTHS: [f64; 11] = [0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    #[default]
    Doppler,
    Bumps,
}

impl FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "doppler" => Ok(Target::Doppler),
            "bumps" => Ok(Target::Bumps),
            "lidar" => Err(Error::config(
                "target 'lidar' has no closed form and is not available",
            )),
            other => Err(Error::config(format!("unknown target '{other}'"))),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Doppler => "doppler",
            Target::Bumps => "bumps",
        })
    }
}

/// `√(x(1-x)) sin(2π·1.05 / (x + shift))`.
pub fn doppler_with_shift(x: f64, shift: f64) -> f64 {
    (x * (1.0 - x)).max(0.0).sqrt() * (2.0 * PI * 1.05 / (x + shift)).sin()
}

/// The Doppler test function with the usual shift 0.05.
pub fn doppler(x: f64) -> f64 {
    doppler_with_shift(x, 0.05)
}

pub fn bumps(x: f64) -> f64 {
    BUMP_POSITIONS
        .iter()
        .zip(BUMP_HEIGHTS.iter().zip(&BUMP_WIDTHS))
        .map(|(t, (h, w))| h * (1.0 + ((x - t) / w).abs()).powi(-4))
        .sum()
}

impl Target {
    /// Raw (unstandardized) value at `x`.
    pub fn raw(self, x: f64) -> f64 {
        match self {
            Target::Doppler => doppler(x),
            Target::Bumps => bumps(x),
        }
    }
}

/// Raw target values on `grid`.
pub fn eval_target(target: Target, grid: &[f64]) -> Result<Vec<f64>> {
    if let Some(x) = grid.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::domain(format!("grid point {x} outside [0, 1]")));
    }
    Ok(grid.iter().map(|&x| target.raw(x)).collect())
}

/// Scales `values` so that `10 log10(mean(v²) / sigma_ref²)` equals
/// [`TARGET_SNR_DB`]; returns the scaled values and the achieved SNR.
pub fn snr_standardize(values: &[f64], sigma_ref: f64) -> Result<(Vec<f64>, f64)> {
    let factor = snr_factor(values, sigma_ref)?;
    let scaled: Vec<f64> = values.iter().map(|v| v * factor).collect();
    let power = scaled.iter().map(|v| v * v).sum::<f64>() / scaled.len() as f64;
    Ok((scaled, snr_db(power, sigma_ref)))
}

pub fn snr_db(mean_square: f64, sigma: f64) -> f64 {
    10.0 * (mean_square / (sigma * sigma)).log10()
}

fn snr_factor(values: &[f64], sigma_ref: f64) -> Result<f64> {
    if !(sigma_ref > 0.0) {
        return Err(Error::domain(format!("reference sigma must be positive, got {sigma_ref}")));
    }
    if values.is_empty() {
        return Err(Error::shape("no values to standardize"));
    }
    let power = values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64;
    if !(power > 0.0) || !power.is_finite() {
        return Err(Error::domain("cannot standardize an all-zero signal"));
    }
    let wanted = sigma_ref * sigma_ref * 10f64.powf(TARGET_SNR_DB / 10.0);
    Ok((wanted / power).sqrt())
}

/// A target scaled once, on a fine reference grid, to the common SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardizedTarget {
    pub target: Target,
    pub scale: f64,
}

impl StandardizedTarget {
    pub fn new(target: Target) -> Self {
        let grid: Vec<f64> = (1..=REFERENCE_GRID).map(|i| i as f64 / REFERENCE_GRID as f64).collect();
        let raw: Vec<f64> = grid.iter().map(|&x| target.raw(x)).collect();
        let scale = snr_factor(&raw, REFERENCE_SIGMA).expect("test functions are nonzero");
        StandardizedTarget { target, scale }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.scale * self.target.raw(x)
    }

    /// Values at `i/n` for `i = 1..=n`.
    pub fn on_regular_grid(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|i| self.eval(i as f64 / n as f64)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Constant noise level.
    #[default]
    A,
    /// Linearly increasing, same integrated power as `A`.
    B,
    /// Irregular level with a jump at 0.4.
    C,
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Scenario::A),
            "b" => Ok(Scenario::B),
            "c" => Ok(Scenario::C),
            other => Err(Error::config(format!("unknown scenario '{other}'"))),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::A => "a",
            Scenario::B => "b",
            Scenario::C => "c",
        })
    }
}

/// Noise multiplier `σ(x)`. Scenario `C` is negative past the jump; the
/// sign is kept since it only flips symmetric noise.
pub fn scenario_sigma(scenario: Scenario, x: f64) -> f64 {
    match scenario {
        Scenario::A => 0.1,
        Scenario::B => 0.1 * (12.0f64 / 13.0).sqrt() * (x + 0.5),
        Scenario::C => 0.1 * ((PI * x).sin() - sign(x - 0.4)),
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `∫_0^1 σ²(x) dx` in closed form.
pub fn integrated_noise_power(scenario: Scenario) -> f64 {
    match scenario {
        Scenario::A => 0.01,
        // (12/13) ∫ (x + 1/2)² = (12/13)(13/12)
        Scenario::B => 0.01 * (12.0 / 13.0) * ((1.5f64.powi(3) - 0.5f64.powi(3)) / 3.0),
        // ∫ sin² = 1/2, ∫ sign² = 1, ∫ sin(πx) sign(x - 0.4) = (2 cos(0.4π)) / π
        Scenario::C => 0.01 * (0.5 + 1.0 - 2.0 * (2.0 * (0.4 * PI).cos() / PI)),
    }
}
