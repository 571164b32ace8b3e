//! Closed-form dictionary-size bounds.
//!
//! All probability bounds come back raw in log domain; values above one are
//! vacuous but kept so callers can see how far from useful they are.

use crate::error::{Error, Result};
use crate::logvalue::LogValue;
use crate::spectrum::{synthetic_spectrum, SyntheticKind};
use crate::symfun::{esp_nu, ln_binomial, Spectrum};

/// `log[α^{-k}·C(n,k)·ν_k]`, an upper bound on `log P[|D_n| ≥ k]`.
pub fn dict_tail_bound(n: usize, k: usize, alpha: f64, spec: &Spectrum) -> Result<LogValue> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    check_alpha(alpha)?;
    let nu = nu_k(spec, k)?;
    Ok(nu * LogValue::Finite(ln_binomial(n as u64, k as u64) - k as f64 * alpha.ln()))
}

/// Sample-count threshold below which `P[|D_n| > k] < δ` is certified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Finite(f64),
    /// `ν_k = 0`: the dictionary can never exceed `k`.
    Unbounded,
}

impl Threshold {
    pub fn exceeds(&self, n: f64) -> bool {
        match self {
            Threshold::Finite(t) => *t > n,
            Threshold::Unbounded => true,
        }
    }
}

/// `(αk/e)·(δ/ν_k)^{1/k}`.
pub fn sample_threshold(k: usize, alpha: f64, delta: f64, spec: &Spectrum) -> Result<Threshold> {
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    check_alpha(alpha)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0,1), got {delta}")));
    }
    let nu = nu_k(spec, k)?;
    Ok(threshold_from_nu(nu, k, alpha, delta))
}

fn threshold_from_nu(nu: LogValue, k: usize, alpha: f64, delta: f64) -> Threshold {
    match nu {
        LogValue::Zero => Threshold::Unbounded,
        LogValue::Finite(ln_nu) => {
            let kf = k as f64;
            Threshold::Finite(alpha * kf / std::f64::consts::E * ((delta.ln() - ln_nu) / kf).exp())
        }
    }
}

/// Decay family for [`growth_prediction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayLaw {
    Geometric { sigma: f64 },
    Polynomial { p: f64 },
}

impl DecayLaw {
    fn kind(self) -> SyntheticKind {
        match self {
            DecayLaw::Geometric { sigma } => SyntheticKind::Geometric { sigma },
            DecayLaw::Polynomial { p } => SyntheticKind::Polynomial { p },
        }
    }
}

/// Minimum truncation length used when evaluating `ν_k` for a decay law.
pub fn prediction_truncation(k: usize) -> usize {
    (4 * k).max(64)
}

/// Smallest `k` at which the sample threshold exceeds `n`, scanning upward;
/// capped at `n` since `|D_n| ≤ n` always holds.
///
/// The scan runs over doubling windows of `k`; every `ν_k` in a window comes
/// from one spectrum truncated at `prediction_truncation` of the window's
/// largest `k`, so each sees at least `max(4k, 64)` terms.
pub fn growth_prediction(law: DecayLaw, n: usize, alpha: f64, delta: f64) -> Result<usize> {
    if n == 0 {
        return Err(Error::invalid("n must be >= 1"));
    }
    check_alpha(alpha)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0,1), got {delta}")));
    }
    let kind = law.kind();
    let (mut lo, mut hi) = (1, 64usize);
    while lo < n {
        let top = hi.min(n - 1);
        let nus = esp_nu(&synthetic_spectrum(&kind, prediction_truncation(top))?, top)?;
        if let Some(k) = (lo..=top).find(|&k| threshold_from_nu(nus[k], k, alpha, delta).exceeds(n as f64)) {
            return Ok(k);
        }
        lo = top + 1;
        hi *= 2;
    }
    Ok(n)
}

/// `log ν_k` on the spectrum of a power kernel, bounding `E[(det G_k)^m]`.
pub fn moment_bound(power_spec: &Spectrum, k: usize) -> Result<LogValue> {
    nu_k(power_spec, k)
}

fn nu_k(spec: &Spectrum, k: usize) -> Result<LogValue> {
    if k > spec.len() {
        return Err(Error::invalid(format!("k={k} exceeds spectrum length {}", spec.len())));
    }
    Ok(esp_nu(spec, k)?[k])
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("alpha must be positive, got {alpha}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfun::esp_table;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::finite(v.to_vec()).unwrap()
    }

    #[test]
    fn tail_bound_examples() {
        let b = dict_tail_bound(4, 2, 2.0, &spec(&[1.0, 0.5])).unwrap();
        assert!((b.ln() - 1.5f64.ln()).abs() < 1e-12);

        let s = spec(&[0.9, 0.4, 0.3]);
        let b = dict_tail_bound(3, 3, 1.0, &s).unwrap();
        let nu3 = esp_table(&s, 3).unwrap().nu(3);
        assert!((b.ln() - nu3.ln()).abs() < 1e-12);

        assert_eq!(dict_tail_bound(5, 2, 0.1, &spec(&[1.0, 0.0])).unwrap(), LogValue::Zero);
        assert!(dict_tail_bound(2, 3, 0.1, &spec(&[1.0, 0.5, 0.1])).is_err());
    }

    #[test]
    fn threshold_examples() {
        let s = spec(&[1.0, 0.5]);
        match sample_threshold(2, 1.0, 0.1, &s).unwrap() {
            Threshold::Finite(t) => assert!((t - 2.0 / std::f64::consts::E * 0.1f64.sqrt()).abs() < 1e-12),
            t => panic!("unexpected {t:?}"),
        }
        // δ = ν_k, α = e  ⇒  threshold = k
        let s = spec(&[0.3, 0.2, 0.1]);
        let nu2 = esp_table(&s, 2).unwrap().nu(2).exp();
        match sample_threshold(2, std::f64::consts::E, nu2, &s).unwrap() {
            Threshold::Finite(t) => assert!((t - 2.0).abs() < 1e-12),
            t => panic!("unexpected {t:?}"),
        }
        assert_eq!(sample_threshold(2, 1.0, 0.1, &spec(&[1.0, 0.0])).unwrap(), Threshold::Unbounded);
    }

    #[test]
    fn prediction_single_sample() {
        for law in [DecayLaw::Geometric { sigma: 2.0 }, DecayLaw::Polynomial { p: 1.0 }] {
            assert!(growth_prediction(law, 1, 0.01, 0.1).unwrap() <= 1);
        }
    }

    #[test]
    fn moment_bound_examples() {
        let s = spec(&[0.7, 0.2, 0.1]);
        let t = esp_table(&s, 2).unwrap();
        assert_eq!(moment_bound(&s, 2).unwrap(), t.nu(2));
        assert!((moment_bound(&s, 1).unwrap().ln() - 1f64.ln()).abs() < 1e-15);
        assert!(moment_bound(&s, 4).is_err());
    }
}
