//! Seeded samplers, Monte Carlo estimators and end-to-end experiments.
//!
//! Randomness is a pure function of `(seed, stream)`: trial `i` draws from
//! ChaCha8 stream `i`, and the long-running experiments use reserved
//! streams at the top of the range. Trial results are collected by index
//! and reduced serially, so [`Exec::serial`] and any thread count produce
//! bit-identical estimates.

mod exec;
mod experiments;
mod manifest;
mod monte_carlo;
mod sampler;

pub use exec::{Exec, THREADS_ENV};
pub use experiments::{
    growth_experiment, nystrom_compare, regression_experiment, smooth_target, NystromRecord, RegressionRecord,
    GROWTH_MAX_N, NOISE_STREAM, NYSTROM_MAX_N,
};
pub use manifest::{content_hash, RunManifest};
pub use monte_carlo::{
    gaussian_quadratic_moment, mc_det_moment, mc_expected_gram_det, mc_kstar_tail, McEstimate, EXACT_SLACK,
    KSTAR_TAIL_MAX_N, MC_MAX_K, MC_MIN_TRIALS,
};
pub use sampler::{Sampler, SamplerKind, AUX_STREAM, NYSTROM_STREAM, SAMPLE_STREAM};
