//! Character map of the rate phases over smoothness `s` and memory index
//! `α`, for `π = 1` and `L^4` loss. `D` dense, `S` sparse, `L` long memory,
//! `+` the dense/sparse boundary.

use warpwave::rates::{classify_phase, Phase};

fn main() -> warpwave::Result<()> {
    let (pi, p) = (1.0, 4.0);
    let cols = 60;
    let rows = 20;
    println!("alpha");
    for r in 0..rows {
        let alpha = 1.0 - r as f64 / rows as f64;
        let mut line = String::with_capacity(cols);
        for c in 0..cols {
            // s on a grid that hits the boundary s = 1.5 exactly
            let s = 0.6 + 2.4 * c as f64 / cols as f64;
            let diag = classify_phase(s, pi, p, alpha)?;
            line.push(match diag.phase {
                Phase::Dense => 'D',
                Phase::Sparse => 'S',
                Phase::Lrd => 'L',
                Phase::Boundary => '+',
            });
        }
        println!("{alpha:>5.2} {line}");
    }
    println!("      s from 0.6 to 3.0");

    for (s, alpha) in [(2.0, 0.9), (2.0, 0.3), (1.2, 0.9), (1.5, 0.9)] {
        let d = classify_phase(s, pi, p, alpha)?;
        println!(
            "s = {s}, alpha = {alpha}: {} gamma {:.4} kappa {:.4} (alpha_D {:.4}, alpha_S {:.4})",
            d.phase, d.gamma, d.kappa, d.alpha_d, d.alpha_s
        );
    }
    Ok(())
}
