//! Long-memory noise: partial-sum variance scaling and log-periodogram
//! estimates of the memory index, for the exact circulant generator and the
//! truncated moving average.

use warpwave::lrd::{
    estimate_alpha, farima_autocovariance, variance_scaling_probe, LrdGenerator, LrdMethod,
    LrdProcessSpec,
};

fn main() -> warpwave::Result<()> {
    let grid = [256, 512, 1024, 2048, 4096];
    println!("{:>5} {:>6} {:>8} {:>9} {:>9}", "d", "alpha", "2-alpha", "exact", "trunc-MA");
    for d in [0.0, 0.15, 0.3, 0.45] {
        let spec = LrdProcessSpec::from_d(d, 7)?;
        let exact = variance_scaling_probe(&spec, &grid, 200)?;
        let truncated = variance_scaling_probe(&spec.with_method(LrdMethod::TruncatedMa), &grid, 200)?;
        println!(
            "{d:>5.2} {:>6.2} {:>8.2} {:>9.3} {:>9.3}",
            spec.alpha(),
            2.0 - spec.alpha(),
            exact.slope,
            truncated.slope
        );
    }

    let g = farima_autocovariance(0.3, 6)?;
    println!("\nautocovariance d = 0.3: {:?}", g.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());

    println!("\nGPH alpha-hat, n = 4096, mean of 50:");
    for alpha in [0.1, 0.4, 0.7, 1.0] {
        let gen = LrdGenerator::new(LrdProcessSpec::from_alpha(alpha, 11)?, 4096)?;
        let mut sum = 0.0;
        for rep in 0..50 {
            sum += estimate_alpha(&gen.generate(rep))?;
        }
        println!("  alpha {alpha:.1} -> {:.3}", sum / 50.0);
    }
    Ok(())
}
