//! Small dense kernels shared by the determinant, sparsifier and harness code.

use crate::error::{Error, Result};
use crate::kernels::SymMatrix;

/// Result of a diagonally pivoted Cholesky factorization that stops at the
/// numerical rank.
///
/// `perm[j]` is the original index of the j-th pivot. `l` is row-major
/// `order × rank`, rows in pivot order, so `A[perm, perm] ≈ L·Lᵀ` on the
/// leading `rank` block.
#[derive(Debug, Clone)]
pub struct PivotedCholesky {
    pub order: usize,
    pub rank: usize,
    pub perm: Vec<usize>,
    pub pivots: Vec<f64>,
    l: Vec<f64>,
}

impl PivotedCholesky {
    /// Entry `(i, j)` of the factor, rows in pivot order.
    pub fn l(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.rank + j]
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.order
    }
}

/// Pivoted Cholesky with a relative tolerance `tol`.
///
/// Stops once every remaining pivot is below `tol · max_diag`. Fails with
/// [`Error::NotPsd`] if a pivot is below `-tol · max_diag` or the
/// remaining block cannot belong to a PSD matrix.
pub fn pivoted_cholesky(m: &SymMatrix, tol: f64) -> Result<PivotedCholesky> {
    let n = m.order();
    let mut a: Vec<f64> = m.as_slice().to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::with_capacity(n);

    let max_diag = (0..n).map(|i| a[i * n + i]).fold(0.0f64, f64::max);
    let threshold = tol * max_diag;

    let mut rank = 0;
    for j in 0..n {
        let (mut p, mut best, mut worst) = (j, f64::NEG_INFINITY, f64::INFINITY);
        for i in j..n {
            let d = a[i * n + i];
            if d > best {
                best = d;
                p = i;
            }
            worst = worst.min(d);
        }
        if worst < -threshold || (max_diag == 0.0 && worst < 0.0) {
            return Err(Error::NotPsd { pivot: worst, threshold });
        }
        if best <= threshold {
            // A PSD remainder with tiny diagonal has tiny off-diagonals too.
            for r in j..n {
                for c in j..r {
                    if a[r * n + c].abs() > threshold.max(f64::MIN_POSITIVE) {
                        return Err(Error::NotPsd { pivot: -a[r * n + c].abs(), threshold });
                    }
                }
            }
            break;
        }

        if p != j {
            for c in 0..n {
                a.swap(j * n + c, p * n + c);
            }
            for r in 0..n {
                a.swap(r * n + j, r * n + p);
            }
            perm.swap(j, p);
        }

        let ljj = best.sqrt();
        a[j * n + j] = ljj;
        for i in j + 1..n {
            a[i * n + j] /= ljj;
        }
        for i in j + 1..n {
            let lij = a[i * n + j];
            for c in j + 1..=i {
                let v = a[i * n + c] - lij * a[c * n + j];
                a[i * n + c] = v;
                a[c * n + i] = v;
            }
        }
        pivots.push(best);
        rank += 1;
    }

    let mut l = vec![0.0; n * rank];
    for i in 0..n {
        for c in 0..rank.min(i + 1) {
            l[i * rank + c] = a[i * n + c];
        }
    }
    Ok(PivotedCholesky { order: n, rank, perm, pivots, l })
}

/// Solves `L·w = g` for a lower-triangular `L` stored as ragged rows
/// (row `i` has `i + 1` entries).
pub fn forward_substitute(rows: &[Vec<f64>], g: &[f64]) -> Vec<f64> {
    debug_assert_eq!(rows.len(), g.len());
    let mut w = Vec::with_capacity(g.len());
    for (i, row) in rows.iter().enumerate() {
        let s: f64 = row[..i].iter().zip(&w).map(|(l, w)| l * w).sum();
        w.push((g[i] - s) / row[i]);
    }
    w
}

/// Largest absolute eigenvalue of a dense symmetric matrix by power
/// iteration: at most `max_iter` steps, stopping once the Rayleigh quotient
/// changes by less than `rel_tol` relative.
pub fn spectral_norm_sym(a: &[f64], n: usize, max_iter: usize, rel_tol: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let matvec = |v: &[f64], out: &mut [f64]| {
        for (i, o) in out.iter_mut().enumerate() {
            *o = a[i * n..(i + 1) * n].iter().zip(v).map(|(x, y)| x * y).sum();
        }
    };
    // deterministic, not orthogonal to any coordinate direction
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 13) as f64 / 13.0).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);

    let mut av = vec![0.0; n];
    let mut rayleigh_prev = f64::NAN;
    let mut estimate = 0.0;
    for _ in 0..max_iter {
        matvec(&v, &mut av);
        let rayleigh: f64 = v.iter().zip(&av).map(|(x, y)| x * y).sum();
        let norm = av.iter().map(|x| x * x).sum::<f64>().sqrt();
        estimate = norm;
        if norm == 0.0 {
            return 0.0;
        }
        for (x, y) in v.iter_mut().zip(&av) {
            *x = y / norm;
        }
        if rayleigh_prev.is_finite()
            && (rayleigh - rayleigh_prev).abs() <= rel_tol * rayleigh.abs().max(f64::MIN_POSITIVE)
        {
            break;
        }
        rayleigh_prev = rayleigh;
    }
    estimate
}
