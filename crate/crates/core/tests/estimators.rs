use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use warpwave::design::{proxy_coefficients, RegressionSample};
use warpwave::estimators::{
    apply_threshold, estimate_function, estimate_shape, estimate_sigma_profile, Adaptivity,
    CoefficientMode, EstimatorConfig, SigmaProfile, ThresholdPlan, ThresholdPolicy,
    ThresholdSource,
};
use warpwave::harness::{
    scenario_sigma, simulate_dataset, Design, McConfig, Scenario, StandardizedTarget, Target,
};
use warpwave::wavelet::{build_filter, FilterName};

fn noisy(n: usize, seed: u64) -> RegressionSample {
    let cfg = McConfig {
        n,
        master_seed: seed,
        ..McConfig::default()
    };
    simulate_dataset(&cfg, 0.0, 1).unwrap().sample
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = ra.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn noiseless_doppler_on_a_regular_grid_is_recovered() {
    let cfg = McConfig {
        n: 1024,
        design: Design::RegularGrid,
        noise_scale: 0.0,
        ..McConfig::default()
    };
    let data = simulate_dataset(&cfg, 0.0, 1).unwrap();
    let fit = estimate_function(&data.sample, &EstimatorConfig::default()).unwrap();
    let mse = fit
        .fitted
        .iter()
        .zip(&data.f_true)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / 1024.0;
    assert!(mse < 1e-3, "{mse}");
}

#[test]
fn sigma_profile_recovers_a_constant_level() {
    let f = build_filter(FilterName::Db6);
    let cfg = McConfig {
        n: 1024,
        ..McConfig::default()
    };
    let mut total = 0.0;
    for rep in 1..=100 {
        let data = simulate_dataset(&cfg, 0.0, rep).unwrap();
        let p = estimate_sigma_profile(&data.sample, &f).unwrap();
        let m = p.values().iter().sum::<f64>() / p.len() as f64;
        assert!((m - 0.1).abs() < 0.04, "rep {rep}: {m}");
        total += m;
    }
    let avg = total / 100.0;
    assert!((avg - 0.1).abs() < 0.02, "{avg}");
}

#[test]
fn sigma_profile_of_noiseless_data_is_small() {
    let f = build_filter(FilterName::Db6);
    let cfg = McConfig {
        n: 1024,
        design: Design::RegularGrid,
        noise_scale: 0.0,
        ..McConfig::default()
    };
    let data = simulate_dataset(&cfg, 0.0, 1).unwrap();
    let p = estimate_sigma_profile(&data.sample, &f).unwrap();
    let m = p.values().iter().sum::<f64>() / p.len() as f64;
    assert!(m < 0.01, "{m}");
}

#[test]
fn sigma_profile_tracks_an_increasing_level() {
    // smooth regression function: the pilot leaves no bias in the residuals
    let f = build_filter(FilterName::Db6);
    let grid: Vec<f64> = (1..=1024).map(|i| i as f64 / 1024.0).collect();
    let mut total = 0.0;
    for rep in 1..=100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(rep);
        let xs: Vec<f64> = (0..1024).map(|_| rng.random::<f64>()).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| {
                let e: f64 = rng.sample(StandardNormal);
                (2.0 * PI * x).sin() + scenario_sigma(Scenario::B, x) * e
            })
            .collect();
        let p = estimate_sigma_profile(&RegressionSample::new(xs, ys).unwrap(), &f).unwrap();
        total += spearman(p.values(), &grid);
    }
    let rho = total / 100.0;
    assert!(rho > 0.8, "{rho}");
}

#[test]
fn shape_plus_mean_is_the_function_fit() {
    let s = noisy(512, 3);
    let mean = s.ys().iter().sum::<f64>() / s.len() as f64;
    for source in [ThresholdSource::Dj, ThresholdSource::Lrd] {
        let cfg = EstimatorConfig::default().with_source(source).with_alpha(0.6);
        let f = estimate_function(&s, &cfg).unwrap();
        let g = estimate_shape(&s, &cfg).unwrap();
        assert_eq!(f.plan, g.plan);
        assert_eq!(f.retained, g.retained);
        for (a, b) in f.fitted.iter().zip(&g.fitted) {
            assert!((a - (b + mean)).abs() < 1e-10);
        }
        let shape_mean = g.fitted.iter().sum::<f64>() / g.len() as f64;
        assert!(shape_mean.abs() < 1e-12);
    }
}

#[test]
fn fit_scales_with_the_responses() {
    let s = noisy(256, 4);
    let cfg = EstimatorConfig::default();
    let base = estimate_function(&s, &cfg).unwrap();
    for c in [0.25, 2.0, 8.0] {
        let ys: Vec<f64> = s.ys().iter().map(|y| c * y).collect();
        let scaled = RegressionSample::new(s.xs().to_vec(), ys).unwrap();
        let fit = estimate_function(&scaled, &cfg).unwrap();
        assert_eq!(fit.retained, base.retained);
        for (a, b) in fit.fitted.iter().zip(&base.fitted) {
            assert_eq!(*a, c * b);
        }
    }
}

#[test]
fn predictions_hit_the_grid_values() {
    let s = noisy(256, 5);
    let fit = estimate_function(&s, &EstimatorConfig::default()).unwrap();
    for i in [0, 17, 128, 255] {
        assert_eq!(fit.predict(fit.sorted_xs[i]), fit.fitted[i]);
    }
    let mid = 0.5 * (fit.sorted_xs[10] + fit.sorted_xs[11]);
    let lo = fit.fitted[10].min(fit.fitted[11]);
    let hi = fit.fitted[10].max(fit.fitted[11]);
    assert!((lo..=hi).contains(&fit.predict(mid)));
}

#[test]
fn full_adaptivity_keeps_fewer_levels() {
    let s = noisy(1024, 6);
    let partial = estimate_function(&s, &EstimatorConfig::default()).unwrap();
    let full = estimate_function(&s, &EstimatorConfig::default().with_adaptivity(Adaptivity::Full)).unwrap();
    assert_eq!(partial.top_level, 9);
    assert_eq!(full.top_level, 3);
    assert!(full.retained[4..].iter().all(|&k| k == 0));
    assert!(full.retained.iter().sum::<usize>() <= partial.retained.iter().sum::<usize>());
}

#[test]
fn split_mode_runs_on_two_halves() {
    let s = noisy(1024, 7);
    let cfg = EstimatorConfig {
        coefficients: CoefficientMode::Split,
        ..EstimatorConfig::default()
    };
    let fit = estimate_function(&s, &cfg).unwrap();
    assert_eq!(fit.len(), 512);
    let t = StandardizedTarget::new(Target::Doppler);
    let mse = fit
        .sorted_xs
        .iter()
        .zip(&fit.fitted)
        .map(|(x, f)| (t.eval(*x) - f).powi(2))
        .sum::<f64>()
        / 512.0;
    assert!(mse < 0.2, "{mse}");
}

#[test]
fn supplied_profile_must_match_the_grid() {
    let s = noisy(256, 8);
    let cfg = EstimatorConfig::default()
        .with_source(ThresholdSource::Lrd)
        .with_alpha(0.5)
        .with_sigma_profile(SigmaProfile::constant(128, 0.1).unwrap());
    assert!(estimate_function(&s, &cfg).is_err());
}

fn pyramid_input() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, 128)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn retained_count_falls_as_the_threshold_grows(ys in pyramid_input(), l1 in 0.0f64..0.5, extra in 0.0f64..0.5) {
        let f = build_filter(FilterName::Db4);
        let pyr = proxy_coefficients(&ys, &f, 0).unwrap();
        let count = |lambda: f64| {
            let plan = ThresholdPlan::fixed(ThresholdPolicy::Hard, 0, vec![lambda; 7]).unwrap();
            let kept = apply_threshold(&pyr, &plan).unwrap();
            kept.details().map(|(_, c)| c.iter().filter(|b| **b != 0.0).count()).sum::<usize>()
        };
        prop_assert!(count(l1 + extra) <= count(l1));
    }

    #[test]
    fn soft_never_exceeds_hard(ys in pyramid_input(), lambda in 0.0f64..0.5) {
        let f = build_filter(FilterName::Db2);
        let pyr = proxy_coefficients(&ys, &f, 0).unwrap();
        let hard = apply_threshold(&pyr, &ThresholdPlan::fixed(ThresholdPolicy::Hard, 0, vec![lambda; 7]).unwrap()).unwrap();
        let soft = apply_threshold(&pyr, &ThresholdPlan::fixed(ThresholdPolicy::Soft, 0, vec![lambda; 7]).unwrap()).unwrap();
        for (h, s) in hard.to_flat().iter().zip(soft.to_flat()) {
            prop_assert!(s.abs() <= h.abs());
            prop_assert!(s == 0.0 || s.signum() == h.signum());
        }
    }

    #[test]
    fn thresholding_commutes_with_scaling(ys in pyramid_input(), lambda in 0.0f64..0.5, e in -3i32..4) {
        let c = 2f64.powi(e);
        let f = build_filter(FilterName::Db6);
        let pyr = proxy_coefficients(&ys, &f, 0).unwrap();
        let plan = ThresholdPlan::fixed(ThresholdPolicy::Soft, 0, vec![lambda; 7]).unwrap();
        let a = apply_threshold(&pyr, &plan).unwrap().scaled(c);
        let b = apply_threshold(&pyr.clone().scaled(c), &plan.scaled(c)).unwrap();
        prop_assert_eq!(a.to_flat(), b.to_flat());
    }

    #[test]
    fn shape_fit_of_a_constant_shift_is_unchanged(shift in -5.0f64..5.0, seed in 0u64..1000) {
        let s = noisy(256, seed);
        let ys: Vec<f64> = s.ys().iter().map(|y| y + shift).collect();
        let moved = RegressionSample::new(s.xs().to_vec(), ys).unwrap();
        let cfg = EstimatorConfig::default().with_filter(FilterName::Db4);
        let a = estimate_shape(&s, &cfg).unwrap();
        let b = estimate_shape(&moved, &cfg).unwrap();
        for (u, v) in a.fitted.iter().zip(&b.fitted) {
            prop_assert!((u - v).abs() < 1e-9);
        }
    }
}
