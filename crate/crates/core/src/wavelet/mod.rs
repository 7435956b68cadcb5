//! Orthonormal periodized wavelet machinery: Daubechies filter banks, the
//! Mallat pyramid transform and its inverse, and numerical Lp norms of the
//! mother wavelet.

mod filter;
mod norm;
mod transform;

pub use filter::{build_filter, FilterName, WaveletFilter};
pub use norm::wavelet_lp_norm;
pub use transform::{dwt_forward, dwt_inverse, dyadic_exponent, CoefficientPyramid};
