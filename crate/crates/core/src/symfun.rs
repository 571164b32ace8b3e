//! Elementary symmetric polynomials over eigenvalue spectra, in log domain.
//!
//! Throughout, `ν_{n,k}` carries the extra `k!` factor:
//! `ν_{n,k}(λ) = k! · Σ_{i_1<…<i_k≤n} λ_{i_1}⋯λ_{i_k}`. With that scaling `ν_k`
//! is the expected Gram determinant of `k` i.i.d. samples whose covariance
//! operator has spectrum `λ`.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::logvalue::LogValue;

/// Descending nonnegative eigenvalues plus an upper bound on the mass of any
/// truncated remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    declared_tail: f64,
}

impl Spectrum {
    /// `values` must already be descending.
    pub fn new(values: Vec<f64>, declared_tail: f64) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) || !declared_tail.is_finite() {
            return Err(Error::NonFinite("spectrum"));
        }
        if let Some(v) = values.iter().find(|v| **v < 0.0) {
            return Err(Error::invalid(format!("negative eigenvalue {v}")));
        }
        if declared_tail < 0.0 {
            return Err(Error::invalid(format!("negative declared tail {declared_tail}")));
        }
        if let Some(i) = values.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::invalid(format!("spectrum not descending at index {}", i + 1)));
        }
        Ok(Spectrum { values, declared_tail })
    }

    /// Sorts descending first.
    pub fn from_unsorted(mut values: Vec<f64>, declared_tail: f64) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::NonFinite("spectrum"));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Self::new(values, declared_tail)
    }

    pub fn finite(values: Vec<f64>) -> Result<Self> {
        Self::from_unsorted(values, 0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn declared_tail(&self) -> f64 {
        self.declared_tail
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|v| **v > 0.0).count()
    }

    /// Every eigenvalue multiplied by `c > 0`, tail included.
    pub fn scaled(&self, c: f64) -> Result<Spectrum> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid("scale factor must be positive"));
        }
        Spectrum::new(self.values.iter().map(|v| v * c).collect(), self.declared_tail * c)
    }
}

/// DP table `entries(n, k)` for `0 ≤ n ≤ N`, `0 ≤ k ≤ k_max`. Entries with
/// `n < k` are zero.
#[derive(Debug, Clone)]
pub struct EspTable {
    n_max: usize,
    k_max: usize,
    entries: Vec<LogValue>,
}

impl EspTable {
    pub fn get(&self, n: usize, k: usize) -> LogValue {
        assert!(n <= self.n_max && k <= self.k_max, "EspTable index ({n},{k}) out of range");
        self.entries[n * (self.k_max + 1) + k]
    }

    /// `ν_{N,k}`, the full-spectrum column.
    pub fn nu(&self, k: usize) -> LogValue {
        self.get(self.n_max, k)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }
}

/// Fills `ν_{n,k}` through `ν_{n,k} = k·λ_n·ν_{n−1,k−1} + ν_{n−1,k}` in
/// O(N·k_max) log-domain steps.
pub fn esp_table(spec: &Spectrum, k_max: usize) -> Result<EspTable> {
    let n_max = spec.len();
    if k_max > n_max {
        return Err(Error::invalid(format!("k_max {k_max} exceeds spectrum length {n_max}")));
    }
    let width = k_max + 1;
    let mut entries = vec![LogValue::Zero; (n_max + 1) * width];
    entries[0] = LogValue::ONE;
    for n in 1..=n_max {
        let ln_lambda = LogValue::from_linear(spec.values[n - 1]);
        entries[n * width] = LogValue::ONE;
        for k in 1..=k_max.min(n) {
            let take = LogValue::Finite((k as f64).ln()) * ln_lambda * entries[(n - 1) * width + k - 1];
            let skip = entries[(n - 1) * width + k];
            entries[n * width + k] = take + skip;
        }
    }
    Ok(EspTable { n_max, k_max, entries })
}

/// `ν_k` for `0 ≤ k ≤ k_max` over the full spectrum, by the same recursion
/// as [`esp_table`] but keeping a single row: O(k_max) memory, bit-identical
/// to `esp_table(spec, k_max)?.nu(k)`.
pub fn esp_nu(spec: &Spectrum, k_max: usize) -> Result<Vec<LogValue>> {
    let n_max = spec.len();
    if k_max > n_max {
        return Err(Error::invalid(format!("k_max {k_max} exceeds spectrum length {n_max}")));
    }
    let mut row = vec![LogValue::Zero; k_max + 1];
    row[0] = LogValue::ONE;
    for n in 1..=n_max {
        let ln_lambda = LogValue::from_linear(spec.values[n - 1]);
        for k in (1..=k_max.min(n)).rev() {
            let take = LogValue::Finite((k as f64).ln()) * ln_lambda * row[k - 1];
            row[k] = take + row[k];
        }
    }
    Ok(row)
}

/// Largest spectrum length accepted by [`esp_brute`].
pub const BRUTE_MAX_LEN: usize = 22;

/// `ν_{N,k}` by direct enumeration of all k-subsets.
pub fn esp_brute(spec: &Spectrum, k: usize) -> Result<LogValue> {
    let n = spec.len();
    if n > BRUTE_MAX_LEN {
        return Err(Error::invalid(format!("esp_brute supports at most {BRUTE_MAX_LEN} values, got {n}")));
    }
    if k > n {
        return Ok(LogValue::Zero);
    }
    if k == 0 {
        return Ok(LogValue::ONE);
    }
    let logs: Vec<f64> = spec.values.iter().map(|v| v.ln()).collect();
    let mut terms = Vec::new();
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let t: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| logs[i]).sum();
        if t > f64::NEG_INFINITY {
            terms.push(t);
        }
    }
    if terms.is_empty() {
        return Ok(LogValue::Zero);
    }
    let peak = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - peak).exp()).sum();
    Ok(LogValue::Finite(ln_factorial(k as u64) + peak + sum.ln()))
}

/// `λ^{(k)} = Σ_{i>k} λ_i`, including the declared tail. For `k ≥ N` this is
/// the declared tail alone.
pub fn tail_sum(spec: &Spectrum, k: usize) -> f64 {
    let head: f64 = spec.values.iter().skip(k).sum();
    head + spec.declared_tail
}

/// Upper bound on `log ν_{k+s}` from `log ν_k` and the tail mass past `k`:
/// `log ν_k + s·log λ^{(k)} + log C(k+s, k)`.
pub fn decay_bound(log_nu_k: LogValue, k: usize, s: usize, lambda_tail_k: f64) -> LogValue {
    if s == 0 {
        return log_nu_k;
    }
    if lambda_tail_k <= 0.0 {
        return LogValue::Zero;
    }
    log_nu_k * LogValue::Finite(s as f64 * lambda_tail_k.ln() + ln_binomial((k + s) as u64, k as u64))
}

/// `log ν_k` for the infinite geometric spectrum `λ_i = σ^{-i}`, `i ≥ 1`:
/// `log k! − Σ_{i=1..k} log(σ^i − 1)`.
///
/// Another closed form in circulation carries an extra `σ^{-k}` factor; it
/// corresponds to indexing the spectrum from `λ_0 = 1`. Both share the
/// asymptotic `−(k²/2)·log σ + log k! + O(k)`.
pub fn nu_geometric(sigma: f64, k: usize) -> Result<LogValue> {
    if sigma <= 1.0 || !sigma.is_finite() {
        return Err(Error::invalid(format!("geometric ratio must exceed 1, got {sigma}")));
    }
    let ln_sigma = sigma.ln();
    let denom: f64 = (1..=k)
        .map(|i| {
            let e = i as f64 * ln_sigma;
            // log(σ^i − 1) = i·log σ + log(1 − σ^{-i})
            e + (-(-e).exp()).ln_1p()
        })
        .sum();
    Ok(LogValue::Finite(ln_factorial(k as u64) - denom))
}

pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// `log C(n, k)` via log-gamma. `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}
