//! Minimax rate exponents, phase classification and Besov-type functionals
//! of coefficient pyramids.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavelet::CoefficientPyramid;

/// Besov indices `(s, π, r)`; `r` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovIndices {
    pub s: f64,
    pub pi: f64,
    pub r: f64,
}

impl BesovIndices {
    pub fn new(s: f64, pi: f64, r: f64) -> Self {
        BesovIndices { s, pi, r }
    }

    /// Whether `s > max(1/π, 1/2)`, the range covered by the risk bounds.
    pub fn in_rate_scope(&self) -> bool {
        self.s > (1.0 / self.pi).max(0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Dense,
    Sparse,
    Lrd,
    /// `s = (p - π) / (2π)` with `α` above the long-memory threshold.
    Boundary,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Dense => "dense",
            Phase::Sparse => "sparse",
            Phase::Lrd => "lrd",
            Phase::Boundary => "boundary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagnosis {
    pub phase: Phase,
    pub gamma: f64,
    pub kappa: f64,
    pub alpha_d: f64,
    pub alpha_s: f64,
    /// False when `s <= 1/π`, where the sparse bound is not established.
    pub in_scope: bool,
}

/// `(α_D, α_S)` with `α_D = 2s/(2s+1)` and
/// `α_S = 2(s - 1/π + 1/p) / (2(s - 1/π) + 1)`.
pub fn rate_exponents(s: f64, pi: f64, p: f64) -> Result<(f64, f64)> {
    if !(p >= 2.0) || !p.is_finite() {
        return Err(Error::domain(format!("loss index p must be >= 2, got {p}")));
    }
    if !(pi >= 1.0) {
        return Err(Error::domain(format!("Besov index pi must be >= 1, got {pi}")));
    }
    if !s.is_finite() {
        return Err(Error::domain("smoothness s must be finite"));
    }
    let dense_den = 2.0 * s + 1.0;
    let sparse_den = 2.0 * (s - 1.0 / pi) + 1.0;
    if dense_den <= 0.0 {
        return Err(Error::domain(format!("2s + 1 = {dense_den} is not positive")));
    }
    if sparse_den <= 0.0 {
        return Err(Error::domain(format!(
            "2(s - 1/pi) + 1 = {sparse_den} is not positive"
        )));
    }
    Ok((2.0 * s / dense_den, 2.0 * (s - 1.0 / pi + 1.0 / p) / sparse_den))
}

/// Smoothness at which the dense and sparse regimes meet.
pub fn dense_sparse_boundary(pi: f64, p: f64) -> f64 {
    (p - pi) / (2.0 * pi)
}

/// Assigns the phase for a target in `B^s_{π,r}`, `L^p` loss and
/// long-memory index `α ∈ (0, 1]`.
pub fn classify_phase(s: f64, pi: f64, p: f64, alpha: f64) -> Result<PhaseDiagnosis> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let (alpha_d, alpha_s) = rate_exponents(s, pi, p)?;
    let in_scope = s > 1.0 / pi;
    let boundary = dense_sparse_boundary(pi, p);
    let on_boundary = (s - boundary).abs() <= 1e-12 * boundary.abs().max(1.0);

    let (phase, gamma) = if alpha <= alpha_d.min(alpha_s) {
        (Phase::Lrd, alpha)
    } else if on_boundary {
        (Phase::Boundary, alpha_d.min(alpha_s))
    } else if s > boundary {
        (Phase::Dense, alpha_d)
    } else {
        (Phase::Sparse, alpha_s)
    };
    let kappa = if phase == Phase::Lrd { 1.0 } else { p * gamma };
    Ok(PhaseDiagnosis {
        phase,
        gamma,
        kappa,
        alpha_d,
        alpha_s,
        in_scope,
    })
}

/// `n^{-pγ/2} (ln n)^κ`, the risk bound with unit constant.
pub fn theoretical_risk(n: usize, diag: &PhaseDiagnosis, p: f64) -> f64 {
    let nf = n as f64;
    nf.powf(-p * diag.gamma / 2.0) * nf.ln().powf(diag.kappa)
}

/// `(Σ_j [2^{j(s+1/2-1/π)} ‖β_j‖_π]^r)^{1/r}` over the detail levels, or
/// the supremum over `j` when `r` is infinite.
pub fn besov_seminorm(pyramid: &CoefficientPyramid, idx: &BesovIndices) -> Result<f64> {
    if !(idx.pi > 0.0) || !idx.pi.is_finite() {
        return Err(Error::domain(format!("pi must be positive, got {}", idx.pi)));
    }
    if !(idx.r > 0.0) {
        return Err(Error::domain(format!("r must be positive, got {}", idx.r)));
    }
    let exponent = idx.s + 0.5 - 1.0 / idx.pi;
    let terms = pyramid.details().map(|(j, level)| {
        let lp = level.iter().map(|b| b.abs().powf(idx.pi)).sum::<f64>().powf(1.0 / idx.pi);
        2f64.powf(j as f64 * exponent) * lp
    });
    if idx.r.is_infinite() {
        Ok(terms.fold(0.0, f64::max))
    } else {
        Ok(terms.map(|t| t.powf(idx.r)).sum::<f64>().powf(1.0 / idx.r))
    }
}

/// `sup_{λ>0} λ^q μ{(j,k): |β_jk| > λ}` with `μ(j,k) = 2^{j(p/2-1)} ‖ψ‖_p^p`.
///
/// The supremum is approached as `λ` rises to a coefficient magnitude, so
/// scanning the sorted magnitudes is exact.
pub fn weak_lq_norm(pyramid: &CoefficientPyramid, q: f64, p: f64, psi_p_norm: f64) -> Result<f64> {
    if !(q > 0.0) || !(p > 0.0) {
        return Err(Error::domain(format!("q and p must be positive, got q={q}, p={p}")));
    }
    let atom = psi_p_norm.powf(p);
    let mut weighted: Vec<(f64, f64)> = pyramid
        .details()
        .flat_map(|(j, level)| {
            let mass = 2f64.powf(j as f64 * (p / 2.0 - 1.0)) * atom;
            level.iter().map(move |b| (b.abs(), mass))
        })
        .filter(|(b, _)| *b > 0.0)
        .collect();
    weighted.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut best = 0.0f64;
    let mut cumulative = 0.0;
    let mut i = 0;
    while i < weighted.len() {
        let b = weighted[i].0;
        while i < weighted.len() && weighted[i].0 == b {
            cumulative += weighted[i].1;
            i += 1;
        }
        best = best.max(b.powf(q) * cumulative);
    }
    Ok(best)
}

/// Which part of the embedding applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingRegime {
    /// `π > q_D = p/(2s+1)`.
    Dense,
    /// `2/(2s+1) < π < q_D`.
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub regime: EmbeddingRegime,
    pub q: f64,
    pub weak_norm: f64,
    pub seminorm: f64,
    /// `weak_norm^{1/q} / seminorm`; 0 for a zero pyramid.
    pub ratio: f64,
    pub bounded: bool,
}

/// Compares the weak-`ℓ_q` quasi-norm with the `B^s_{π,∞}` seminorm of the
/// same pyramid. The ratio is diagnostic; its bound is not quantified.
pub fn embedding_check(
    pyramid: &CoefficientPyramid,
    idx: &BesovIndices,
    p: f64,
    psi_p_norm: f64,
) -> Result<EmbeddingReport> {
    let s = idx.s;
    let pi = idx.pi;
    if !(s > 0.0) {
        return Err(Error::domain(format!("embedding needs s > 0, got {s}")));
    }
    if !(p >= 2.0) {
        return Err(Error::domain(format!("embedding needs p >= 2, got {p}")));
    }
    let q_dense = p / (2.0 * s + 1.0);
    let lower = 2.0 / (2.0 * s + 1.0);
    let (regime, q) = if pi > q_dense {
        (EmbeddingRegime::Dense, q_dense)
    } else if pi > lower && pi < q_dense {
        let den = s + 0.5 - 1.0 / pi;
        if den <= 0.0 {
            return Err(Error::domain(format!(
                "hypothesis s + 1/2 - 1/pi > 0 fails ({den})"
            )));
        }
        (EmbeddingRegime::Sparse, (p / 2.0 - 1.0) / den)
    } else if pi <= lower {
        return Err(Error::domain(format!(
            "hypothesis pi > 2/(2s+1) = {lower} fails for pi = {pi}"
        )));
    } else {
        return Err(Error::domain(format!(
            "pi = {pi} sits on q_D = p/(2s+1); neither regime applies"
        )));
    };
    if !(q > 0.0) {
        return Err(Error::domain(format!("embedding index q = {q} is not positive")));
    }
    let weak_norm = weak_lq_norm(pyramid, q, p, psi_p_norm)?;
    let seminorm = besov_seminorm(pyramid, &BesovIndices::new(s, pi, f64::INFINITY))?;
    let ratio = if weak_norm == 0.0 {
        0.0
    } else {
        weak_norm.powf(1.0 / q) / seminorm
    };
    Ok(EmbeddingReport {
        regime,
        q,
        weak_norm,
        seminorm,
        ratio,
        bounded: ratio.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_examples() {
        let (ad, _) = rate_exponents(1.0, 3.0, 7.0).unwrap();
        assert!((ad - 2.0 / 3.0).abs() < 1e-15);
        let (_, as_) = rate_exponents(1.0, 1.0, 4.0).unwrap();
        assert!((as_ - 0.5).abs() < 1e-15);
        assert!(matches!(rate_exponents(0.5, 1.0, 4.0), Err(Error::Domain(_))));
    }

    #[test]
    fn dense_and_lrd_examples() {
        let d = classify_phase(2.0, 1.0, 4.0, 0.9).unwrap();
        assert_eq!(d.phase, Phase::Dense);
        assert!((d.gamma - 0.8).abs() < 1e-12 && (d.kappa - 3.2).abs() < 1e-12);
        let d = classify_phase(2.0, 1.0, 4.0, 0.3).unwrap();
        assert_eq!(d.phase, Phase::Lrd);
        assert_eq!((d.gamma, d.kappa), (0.3, 1.0));
    }

    #[test]
    fn boundary_is_explicit() {
        let d = classify_phase(1.5, 1.0, 4.0, 0.9).unwrap();
        assert_eq!(d.phase, Phase::Boundary);
        assert!((d.gamma - 0.75).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(classify_phase(2.0, 1.0, 4.0, 0.0).is_err());
        assert!(classify_phase(2.0, 1.0, 4.0, 1.2).is_err());
    }

    #[test]
    fn single_coefficient_seminorm() {
        let mut p = CoefficientPyramid::zeros(0, 3).unwrap();
        p.detail_mut(2)[1] = 1.0;
        let v = besov_seminorm(&p, &BesovIndices::new(1.0, 2.0, 1.0)).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn weak_norm_atoms() {
        let mut p = CoefficientPyramid::zeros(0, 3).unwrap();
        p.detail_mut(2)[0] = 0.5;
        let single = weak_lq_norm(&p, 1.5, 4.0, 1.3).unwrap();
        let want = 0.5f64.powf(1.5) * 2f64.powf(2.0) * 1.3f64.powf(4.0);
        assert!((single - want).abs() < 1e-12);

        let mut p = CoefficientPyramid::zeros(0, 1).unwrap();
        p.detail_mut(1)[0] = 0.7;
        p.detail_mut(1)[1] = -0.7;
        let two = weak_lq_norm(&p, 1.0, 2.0, 1.0).unwrap();
        assert!((two - 2.0 * 0.7).abs() < 1e-12);
    }

    #[test]
    fn embedding_domain() {
        let p = CoefficientPyramid::zeros(0, 3).unwrap();
        let r = embedding_check(&p, &BesovIndices::new(1.0, 2.0, 1.0), 2.0, 1.0).unwrap();
        assert_eq!(r.ratio, 0.0);
        assert!(embedding_check(&p, &BesovIndices::new(1.0, 0.5, 1.0), 4.0, 1.0).is_err());
    }
}
