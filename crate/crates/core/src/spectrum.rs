//! Building spectra: from Gram matrices, from decay laws, and comparing them.

use crate::error::{Error, Result};
use crate::kernels::SymMatrix;
use crate::symfun::Spectrum;

/// Eigenvalues of `g / n`, descending, with small negatives clamped to zero.
///
/// Eigenvalues in `[-clamp_tol·λ_max, 0)` become zero; anything lower is
/// reported as [`Error::NotPsd`].
pub fn empirical_spectrum(g: &SymMatrix, clamp_tol: f64) -> Result<Spectrum> {
    let n = g.order();
    if n == 0 {
        return Err(Error::invalid("empirical spectrum needs a Gram matrix of order >= 1"));
    }
    let scaled = g.to_dmatrix() / n as f64;
    let mut values: Vec<f64> = scaled.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let threshold = clamp_tol * values[0].max(0.0);
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < -threshold {
                return Err(Error::NotPsd { pivot: *v, threshold });
            }
            *v = 0.0;
        }
    }
    Spectrum::new(values, 0.0)
}

/// Decay laws and explicit lists for [`synthetic_spectrum`].
#[derive(Debug, Clone, PartialEq)]
pub enum SyntheticKind {
    /// `λ_i = σ^{-i}`
    Geometric {
        sigma: f64,
    },
    /// `λ_i = i^{-(1+p)}`
    Polynomial {
        p: f64,
    },
    Explicit(Vec<f64>),
}

/// A spectrum of `size` terms with a declared tail covering the truncated
/// remainder: `σ^{-size}/(σ−1)` for geometric decay, `size^{-p}/p` for
/// polynomial decay.
///
/// The polynomial tail follows the `k^{-p}/p` asymptotic; the exact remainder
/// `Σ_{i>size} i^{-(1+p)}` is strictly smaller.
pub fn synthetic_spectrum(kind: &SyntheticKind, size: usize) -> Result<Spectrum> {
    if size == 0 {
        return Err(Error::invalid("synthetic spectrum size must be >= 1"));
    }
    match kind {
        SyntheticKind::Geometric { sigma } => {
            if !(*sigma > 1.0 && sigma.is_finite()) {
                return Err(Error::invalid(format!("geometric ratio must exceed 1, got {sigma}")));
            }
            let values = (1..=size).map(|i| sigma.powi(-(i as i32))).collect();
            let tail = sigma.powi(-(size as i32)) / (sigma - 1.0);
            Spectrum::new(values, tail)
        }
        SyntheticKind::Polynomial { p } => {
            if !(*p > 0.0 && p.is_finite()) {
                return Err(Error::invalid(format!("polynomial decay exponent must be positive, got {p}")));
            }
            let values = (1..=size).map(|i| (i as f64).powf(-(1.0 + p))).collect();
            let tail = (size as f64).powf(-p) / p;
            Spectrum::new(values, tail)
        }
        SyntheticKind::Explicit(values) => {
            if values.len() != size {
                return Err(Error::invalid(format!(
                    "explicit spectrum has {} values, size {size} requested",
                    values.len()
                )));
            }
            Spectrum::from_unsorted(values.clone(), 0.0)
        }
    }
}

/// `Σ_i |a_i − b_i|` over zero-padded sequences plus both declared tails.
pub fn spectrum_l1_gap(a: &Spectrum, b: &Spectrum) -> f64 {
    let len = a.len().max(b.len());
    let at = |s: &Spectrum, i: usize| s.values().get(i).copied().unwrap_or(0.0);
    let body: f64 = (0..len).map(|i| (at(a, i) - at(b, i)).abs()).sum();
    body + a.declared_tail() + b.declared_tail()
}
