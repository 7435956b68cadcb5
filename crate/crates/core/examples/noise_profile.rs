//! Pilot estimate of a heteroscedastic noise level, the per-level weights it
//! induces in the long-memory threshold, and the resulting thresholds.

use warpwave::design::{empirical_coefficients, RankedSample, SizePolicy};
use warpwave::estimators::{
    compute_thresholds, estimate_sigma_profile, lrd_level_weights, ThresholdSource, ThresholdSpec,
};
use warpwave::harness::{scenario_sigma, simulate_dataset, McConfig, Scenario};
use warpwave::wavelet::{build_filter, FilterName};

fn main() -> warpwave::Result<()> {
    let filter = build_filter(FilterName::Db6);
    for scenario in [Scenario::A, Scenario::B, Scenario::C] {
        let config = McConfig {
            scenario,
            ..McConfig::default()
        };
        let data = simulate_dataset(&config, 0.3, 1)?;
        let profile = estimate_sigma_profile(&data.sample, &filter)?;
        let ranked = RankedSample::new(&data.sample, SizePolicy::Strict)?;

        println!("scenario {scenario}");
        for q in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let i = (q * profile.len() as f64) as usize;
            let x = ranked.sorted_xs()[i];
            println!(
                "  x = {x:.2}  sigma-hat {:.4}  |sigma| {:.4}",
                profile.values()[i],
                scenario_sigma(scenario, x).abs()
            );
        }
        let weights = lrd_level_weights(&profile, &filter)?;
        let pyramid = empirical_coefficients(&data.sample, &filter, 0)?;
        let spec = ThresholdSpec {
            source: ThresholdSource::Lrd,
            ..ThresholdSpec::default()
        };
        let plan = compute_thresholds(data.sample.len(), &pyramid, &spec, 0.4, &weights)?;
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" ");
        println!("  m_j    {}", fmt(&weights));
        println!("  lambda {}", fmt(plan.per_level()));
    }
    Ok(())
}
