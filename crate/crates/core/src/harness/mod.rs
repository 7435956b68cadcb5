//! Simulation experiments: test functions, noise scenarios and Monte Carlo
//! estimates of the mean squared error.

mod mc;
mod targets;

pub use mc::{
    fmt_num, rate_slope_experiment, replicate_mse, run_mc, run_replication, simulate_dataset,
    Design, EstimatorKind, McConfig, McReport, McRow, RateSlopeReport, SimulatedData,
    SMOOTHNESS_RANGE,
};
pub use targets::{
    bumps, doppler, doppler_with_shift, eval_target, integrated_noise_power, scenario_sigma,
    snr_db, snr_standardize, Scenario, StandardizedTarget, Target, REFERENCE_GRID,
    REFERENCE_SIGMA, TARGET_SNR_DB,
};
