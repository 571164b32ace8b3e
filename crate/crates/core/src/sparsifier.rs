//! Online kernel sparsification.
//!
//! A sample `x` joins the dictionary `D` when its approximate-linear-dependence
//! residual
//!
//! ```text
//! δ(x) = k(x,x) − gᵀ G_D⁻¹ g = min_{ψ ∈ span D} ‖φ(x) − ψ‖²,   g_i = k(x, d_i)
//! ```
//!
//! exceeds `α`. Since `δ` is also the ratio `det G_{D∪{x}} / det G_D`, the
//! dictionary Gram always satisfies `det G_D > α^{|D|}`.
//!
//! `G_D⁻¹` is never formed; the dictionary keeps a lower-triangular factor
//! `G_D = L·Lᵀ` that grows by one row per admission, so each offer costs
//! `O(|D|²)`.

use crate::error::{Error, Result};
use crate::kernels::{gram, log_det_psd, KernelSpec, Point};
use crate::linalg::forward_substitute;
use crate::logvalue::LogValue;
use crate::DEFAULT_PIVOT_TOL;

/// Base relative tolerance for negative residuals; see [`Dictionary::ald_residual`].
pub const RESIDUAL_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Dictionary {
    kernel: KernelSpec,
    alpha: f64,
    members: Vec<Point>,
    /// Row `i` holds `L[i][0..=i]`.
    factor: Vec<Vec<f64>>,
    log_det: LogValue,
}

/// What happened to an offered sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Offer {
    pub admitted: bool,
    pub residual: f64,
}

impl Dictionary {
    pub fn new(kernel: KernelSpec, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
        }
        kernel.validate()?;
        Ok(Dictionary { kernel, alpha, members: Vec::new(), factor: Vec::new(), log_det: LogValue::ONE })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn members(&self) -> &[Point] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn log_det(&self) -> LogValue {
        self.log_det
    }

    /// Diagonal of the Cholesky factor of `G_D`.
    pub fn factor_diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        self.factor.iter().enumerate().map(|(i, row)| row[i])
    }

    /// `L[i][j]` for `j <= i`.
    pub fn factor_entry(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.factor[i][j]
        }
    }

    fn check_dim(&self, x: &Point) -> Result<()> {
        match self.members.first() {
            Some(m) if m.dim() != x.dim() => Err(Error::DimensionMismatch { expected: m.dim(), found: x.dim() }),
            _ => Ok(()),
        }
    }

    /// Kernel column `g` and its whitened form `w = L⁻¹g`, plus `δ`.
    fn project(&self, x: &Point) -> Result<(Vec<f64>, f64)> {
        self.check_dim(x)?;
        let kxx = crate::kernels::eval_kernel(&self.kernel, x, x)?;
        let g: Vec<f64> =
            self.members.iter().map(|m| crate::kernels::eval_kernel(&self.kernel, m, x)).collect::<Result<_>>()?;
        let w = forward_substitute(&self.factor, &g);
        let projected = w.iter().map(|v| v * v).sum::<f64>();
        let residual = kxx - projected;
        if residual < 0.0 {
            if residual < -self.clamp_tolerance(kxx.abs().max(projected)) {
                return Err(Error::NumericalInconsistency { residual });
            }
            return Ok((w, 0.0));
        }
        Ok((w, residual))
    }

    /// `RESIDUAL_CLAMP · max(1, scale) · (largest / smallest pivot)`. The
    /// pivot spread bounds the conditioning of the factor, which is what
    /// amplifies rounding once the dictionary spans a finite feature space.
    fn clamp_tolerance(&self, scale: f64) -> f64 {
        let (lo, hi) =
            self.factor_diagonal().fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d * d), hi.max(d * d)));
        let spread = if self.is_empty() { 1.0 } else { hi / lo };
        RESIDUAL_CLAMP * scale.max(1.0) * spread
    }

    /// Squared distance from `φ(x)` to the span of the dictionary.
    ///
    /// Negative values down to the clamp tolerance are returned as zero;
    /// anything lower is a [`Error::NumericalInconsistency`].
    pub fn ald_residual(&self, x: &Point) -> Result<f64> {
        self.project(x).map(|(_, r)| r)
    }

    /// Admits `x` iff its residual strictly exceeds `alpha`.
    pub fn offer(&mut self, x: &Point) -> Result<Offer> {
        let (mut w, residual) = self.project(x)?;
        let admitted = residual > self.alpha;
        if admitted {
            w.push(residual.sqrt());
            self.factor.push(w);
            self.members.push(x.clone());
            self.log_det = self.log_det * LogValue::Finite(residual.ln());
        }
        Ok(Offer { admitted, residual })
    }
}

/// `(n, |D_n|, log det G_{D_n})`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthRecord {
    pub n: usize,
    pub dict_size: usize,
    pub log_det: LogValue,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GrowthTrace {
    pub records: Vec<GrowthRecord>,
}

impl GrowthTrace {
    pub fn sizes(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.dict_size).collect()
    }

    /// CSV with header `n,dict_size,log_det`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,dict_size,log_det\n");
        for r in &self.records {
            out.push_str(&format!("{},{},{}\n", r.n, r.dict_size, r.log_det));
        }
        out
    }
}

/// Offers `points` in order, recording at every `trace_every`-th sample
/// (never, if zero) and after the last one.
pub fn run_stream(
    kernel: &KernelSpec,
    alpha: f64,
    points: &[Point],
    trace_every: usize,
) -> Result<(Dictionary, GrowthTrace)> {
    run_stream_at(kernel, alpha, points, |n| trace_every > 0 && n % trace_every == 0)
}

/// Like [`run_stream`] with an explicit predicate on the 1-based sample count.
pub fn run_stream_at(
    kernel: &KernelSpec,
    alpha: f64,
    points: &[Point],
    mut record_at: impl FnMut(usize) -> bool,
) -> Result<(Dictionary, GrowthTrace)> {
    if points.is_empty() {
        return Err(Error::invalid("stream must contain at least one point"));
    }
    let mut dict = Dictionary::new(kernel.clone(), alpha)?;
    let mut trace = GrowthTrace::default();
    for (i, x) in points.iter().enumerate() {
        dict.offer(x)?;
        let n = i + 1;
        if record_at(n) || n == points.len() {
            trace.records.push(GrowthRecord { n, dict_size: dict.len(), log_det: dict.log_det() });
        }
    }
    Ok((dict, trace))
}

/// True iff every prefix ratio `det G_{1..j} / det G_{1..j−1}` exceeds
/// `alpha`, each computed from dense log-determinants.
pub fn check_alpha_compatible(kernel: &KernelSpec, alpha: f64, seq: &[Point]) -> Result<bool> {
    let ln_alpha = alpha.ln();
    let g = gram(kernel, seq)?;
    let mut prev = LogValue::ONE;
    for j in 1..=seq.len() {
        let idx: Vec<usize> = (0..j).collect();
        let cur = log_det_psd(&g.principal(&idx), DEFAULT_PIVOT_TOL)?;
        if cur.is_zero() || cur.ln() - prev.ln() <= ln_alpha {
            return Ok(false);
        }
        prev = cur;
    }
    Ok(true)
}

/// Largest subset size accepted by [`kstar_oracle`].
pub const KSTAR_MAX_POINTS: usize = 14;

/// Largest `k` for which some k-subset `A` has `det G_A > α^k`, by
/// enumerating every subset. Zero if no subset qualifies.
pub fn kstar_oracle(kernel: &KernelSpec, alpha: f64, points: &[Point]) -> Result<usize> {
    let n = points.len();
    if n > KSTAR_MAX_POINTS {
        return Err(Error::invalid(format!("kstar_oracle supports at most {KSTAR_MAX_POINTS} points, got {n}")));
    }
    let ln_alpha = alpha.ln();
    let g = gram(kernel, points)?;
    let mut best = 0;
    let mut idx = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        let k = mask.count_ones() as usize;
        if k <= best {
            continue;
        }
        idx.clear();
        idx.extend((0..n).filter(|i| mask >> i & 1 == 1));
        let ld = log_det_psd(&g.principal(&idx), DEFAULT_PIVOT_TOL)?;
        if !ld.is_zero() && ld.ln() > k as f64 * ln_alpha {
            best = k;
        }
    }
    Ok(best)
}
