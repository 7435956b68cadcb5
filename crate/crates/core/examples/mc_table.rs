//! Monte Carlo mean squared errors across the dependence grid, for both
//! test functions and all three noise scenarios.
//!
//! ```bash
//! cargo run --release --example mc_table -- 200
//! ```

use warpwave::estimators::ThresholdSource;
use warpwave::harness::{run_mc, McConfig, Scenario, Target};

fn main() -> warpwave::Result<()> {
    let reps: usize = std::env::args().nth(1).map_or(100, |s| s.parse().expect("replication count"));
    for target in [Target::Doppler, Target::Bumps] {
        println!("{target}, {reps} replications, n = 1024");
        println!("{:>6} {:>5} {:>12} {:>12}", "d", "scen", "dj", "lrd");
        for scenario in [Scenario::A, Scenario::B, Scenario::C] {
            let config = McConfig {
                target,
                scenario,
                replications: reps,
                sources: vec![ThresholdSource::Dj, ThresholdSource::Lrd],
                ..McConfig::default()
            };
            let report = run_mc(&config)?;
            for &d in &config.d_grid {
                let dj = report.row(d, ThresholdSource::Dj).unwrap();
                let lrd = report.row(d, ThresholdSource::Lrd).unwrap();
                println!(
                    "{d:>6.3} {scenario:>5} {:>12.5} {:>12.5}",
                    dj.mse_mean, lrd.mse_mean
                );
            }
        }
        println!();
    }
    Ok(())
}
