//! The shape estimator drops the scaling coefficient and so ignores the
//! level of the curve, which is where long memory does most harm.

use warpwave::estimators::ThresholdSource;
use warpwave::harness::{run_mc, EstimatorKind, McConfig};

fn main() -> warpwave::Result<()> {
    let base = McConfig {
        replications: 200,
        ..McConfig::default()
    };
    let function = run_mc(&base)?;
    let shape = run_mc(&McConfig {
        estimator_kind: EstimatorKind::Shape,
        ..base.clone()
    })?;
    println!("{:>6} {:>10} {:>10}", "d", "function", "shape");
    for &d in &base.d_grid {
        let f = function.row(d, ThresholdSource::Dj).unwrap().mse_mean;
        let s = shape.row(d, ThresholdSource::Dj).unwrap().mse_mean;
        println!("{d:>6.3} {f:>10.5} {s:>10.5}");
    }
    Ok(())
}
