//! Denoise one Doppler sample drawn under a uniform random design with
//! long-memory noise, using the universal and the long-memory thresholds.
//!
//! ```bash
//! cargo run --release --example denoise_doppler -- 0.45
//! ```

use warpwave::estimators::{estimate_function, ThresholdSource};
use warpwave::harness::{simulate_dataset, McConfig, StandardizedTarget, Target};

fn main() -> warpwave::Result<()> {
    let d: f64 = std::env::args().nth(1).map_or(0.3, |s| s.parse().expect("d in [0, 0.5)"));
    let config = McConfig::default();
    let data = simulate_dataset(&config, d, 1)?;
    let target = StandardizedTarget::new(Target::Doppler);
    let truth = target.on_regular_grid(config.n);

    println!("n = {}, d = {d}", config.n);
    for source in [ThresholdSource::Dj, ThresholdSource::Lrd] {
        let fit = estimate_function(&data.sample, &config.estimator_config(source))?;
        let mse = truth
            .iter()
            .zip(&fit.fitted)
            .map(|(t, f)| (t - f).powi(2))
            .sum::<f64>()
            / config.n as f64;
        println!(
            "{source:>3}: mse {mse:.5}  alpha {}  kept per level {:?}",
            fit.alpha_used.map_or("-".into(), |a| format!("{a:.3}")),
            fit.retained
        );
        // off-grid evaluation interpolates between neighbouring ranks
        println!("     fhat(0.6) = {:.4}, f(0.6) = {:.4}", fit.predict(0.6), target.eval(0.6));
    }
    Ok(())
}
