//! Online kernel sparsification (OKS) and the numerical machinery around it.
//!
//! The crate builds approximate-linear-dependence dictionaries over a kernel
//! feature space and provides the tools used to reason about how large those
//! dictionaries get:
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`kernels`] | kernel specs, Gram matrices, PSD log-determinants |
//! | [`symfun`] | k!-scaled elementary symmetric polynomials in log domain |
//! | [`spectrum`] | empirical and synthetic eigenvalue spectra |
//! | [`sparsifier`] | the streaming ALD dictionary and brute-force oracles |
//! | [`bounds`] | dictionary-size tail bounds, sample thresholds, moment bounds |
//! | [`regress`] | least squares on dictionary features |
//! | [`harness`] | seeded samplers, Monte Carlo estimators, experiments |
//!
//! Every quantity that can under- or overflow (determinants, symmetric
//! polynomials, probability bounds) is carried as a [`LogValue`].

pub mod bounds;
pub mod error;
pub mod harness;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod logvalue;
pub mod regress;
pub mod sparsifier;
pub mod spectrum;
pub mod symfun;

pub use error::{Error, Result};
pub use kernels::{eval_kernel, gram, log_det_psd, KernelSpec, Point, SymMatrix};
pub use logvalue::LogValue;
pub use sparsifier::{Dictionary, GrowthRecord, GrowthTrace, Offer};
pub use symfun::{EspTable, Spectrum};

/// Default relative pivot tolerance for PSD log-determinants.
pub const DEFAULT_PIVOT_TOL: f64 = 1e-12;

/// Default relative clamp tolerance for empirical eigenvalues.
pub const DEFAULT_CLAMP_TOL: f64 = 1e-10;
