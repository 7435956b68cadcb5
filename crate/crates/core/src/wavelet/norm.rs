use super::filter::WaveletFilter;
use super::transform::{dwt_inverse, CoefficientPyramid};
use crate::error::{Error, Result};

/// Approximates `‖ψ‖_p` for the mother wavelet of `filter`.
///
/// A single detail coefficient is synthesized on a grid of
/// `2^refinement_depth` points and integrated with a Riemann sum. The atom
/// is placed at the first level whose cells hold the whole support, so
/// periodization never folds it, and the level factor `2^{j(p/2-1)}` is
/// divided back out.
pub fn wavelet_lp_norm(filter: &WaveletFilter, p: f64, refinement_depth: u32) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::domain(format!("Lp norm needs finite p >= 1, got {p}")));
    }
    let place = placement_level(filter);
    if refinement_depth < 8 || refinement_depth <= place + 1 {
        return Err(Error::domain(format!(
            "refinement depth {refinement_depth} too small (need >= 8 and > {})",
            place + 1
        )));
    }
    if refinement_depth > 26 {
        return Err(Error::domain(format!(
            "refinement depth {refinement_depth} exceeds the supported maximum 26"
        )));
    }

    let mut pyramid = CoefficientPyramid::zeros(0, refinement_depth - 1)?;
    pyramid.detail_mut(place)[0] = 1.0;
    let samples = dwt_inverse(&pyramid, filter);

    // unit-norm basis vector ~ psi_{j,0}(t_i) / sqrt(N)
    let n = samples.len() as f64;
    let root_n = n.sqrt();
    let atom_norm_p: f64 = samples.iter().map(|v| (v * root_n).abs().powf(p)).sum::<f64>() / n;
    let level_factor = 2f64.powf(place as f64 * (p / 2.0 - 1.0));
    Ok((atom_norm_p / level_factor).powf(1.0 / p))
}

fn placement_level(filter: &WaveletFilter) -> u32 {
    let support = filter.len().max(2);
    support.next_power_of_two().trailing_zeros()
}
