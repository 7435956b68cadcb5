//! Regression under a non-uniform design. Ranking the sample makes the
//! coefficients invariant to any increasing change of the design variable,
//! so the fit on `X` and on `exp(X)` agree exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use warpwave::design::{empirical_cdf, RegressionSample};
use warpwave::estimators::{estimate_function, EstimatorConfig};

fn main() -> warpwave::Result<()> {
    let n = 2048;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // design density piles up near 0
    let xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>().powi(2)).collect();
    let f = |x: f64| (6.0 * x).sin() + 2.0 * x;
    let ys: Vec<f64> = xs
        .iter()
        .map(|&x| f(x) + 0.3 * rng.sample::<f64, _>(StandardNormal))
        .collect();

    let cfg = EstimatorConfig::default();
    let fit = estimate_function(&RegressionSample::new(xs.clone(), ys.clone())?, &cfg)?;
    let warped: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
    let fit_w = estimate_function(&RegressionSample::new(warped, ys)?, &cfg)?;
    println!("fits agree under exp(): {}", fit.fitted == fit_w.fitted);

    let cdf = empirical_cdf(&xs)?;
    println!("{:>6} {:>8} {:>8} {:>8}", "x", "G_n(x)", "fhat", "f");
    for x in [0.01, 0.05, 0.2, 0.5, 0.9] {
        println!("{x:>6.2} {:>8.3} {:>8.3} {:>8.3}", cdf.eval(x), fit.predict(x), f(x));
    }
    Ok(())
}
