//! Adaptive warped-wavelet regression for randomly designed data with
//! heteroscedastic, long-range-dependent noise.
//!
//! The crate is organized by capability:
//!
//! - [`wavelet`]: filters, pyramid transform, wavelet norms
//! - [`design`]: ranking of random designs and warped empirical coefficients
//! - [`lrd`]: long-memory Gaussian noise generation and estimation
//! - [`estimators`]: thresholds and the function / shape estimators
//! - [`rates`]: rate exponents, phase classification, Besov functionals
//! - [`harness`]: test targets, noise scenarios and Monte Carlo experiments
//! - [`cli`]: the `warpwave` command-line front end
//!
//! Runnable walkthroughs live in `crates/core/examples/`.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod design;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod lrd;
pub mod rates;
pub mod rng;
pub(crate) mod stats;
pub mod wavelet;

pub use error::{Error, Result};
