//! Besov seminorms and weak-`ℓ_q` quasi-norms of the test functions'
//! coefficient pyramids, with the embedding ratio as the resolution grows.

use warpwave::design::proxy_coefficients;
use warpwave::harness::{StandardizedTarget, Target};
use warpwave::rates::{besov_seminorm, embedding_check, BesovIndices};
use warpwave::wavelet::{build_filter, wavelet_lp_norm, FilterName};

fn main() -> warpwave::Result<()> {
    let filter = build_filter(FilterName::Db6);
    let p = 2.0;
    let psi = wavelet_lp_norm(&filter, p, 12)?;
    for target in [Target::Doppler, Target::Bumps] {
        println!("{target}");
        let t = StandardizedTarget::new(target);
        for levels in [8u32, 10, 12] {
            let pyr = proxy_coefficients(&t.on_regular_grid(1 << levels), &filter, 0)?;
            let semi: Vec<String> = [0.5, 1.0, 1.5]
                .iter()
                .map(|&s| {
                    let v = besov_seminorm(&pyr, &BesovIndices::new(s, 2.0, f64::INFINITY)).unwrap();
                    format!("s={s}: {v:9.3}")
                })
                .collect();
            let emb = embedding_check(&pyr, &BesovIndices::new(0.5, 2.0, f64::INFINITY), p, psi)?;
            println!(
                "  J = {levels:>2}  {}  weak q={:.2}: {:.4}  ratio {:.4}",
                semi.join("  "),
                emb.q,
                emb.weak_norm,
                emb.ratio
            );
        }
    }
    Ok(())
}
