//! Least squares over dictionary features `ψ(x) = (k(x, d_1), …, k(x, d_|D|))`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::{eval_kernel, Point};
use crate::sparsifier::Dictionary;

/// Columns whose `|R_ii|` falls below this fraction of the largest are
/// treated as dependent.
const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct RegressionModel {
    dictionary: Dictionary,
    weights: Vec<f64>,
    ridge: f64,
}

impl RegressionModel {
    /// Assembles a model from parts; `weights` must match the dictionary.
    pub fn from_parts(dictionary: Dictionary, weights: Vec<f64>, ridge: f64) -> Result<Self> {
        if weights.len() != dictionary.len() {
            return Err(Error::DimensionMismatch { expected: dictionary.len(), found: weights.len() });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("weights"));
        }
        Ok(RegressionModel { dictionary, weights, ridge })
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dictionary
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }
}

fn features(dict: &Dictionary, x: &Point) -> Result<Vec<f64>> {
    dict.members().iter().map(|d| eval_kernel(dict.kernel(), x, d)).collect()
}

/// Minimizes `Σ (ψ(x_i)·w − y_i)² + ridge·‖w‖²` by Householder QR of the
/// design, augmented with `√ridge·I` rows when `ridge > 0`.
pub fn fit(dict: &Dictionary, xs: &[Point], ys: &[f64], ridge: f64) -> Result<RegressionModel> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), found: ys.len() });
    }
    if xs.is_empty() {
        return Err(Error::invalid("fit needs at least one sample"));
    }
    if dict.is_empty() {
        return Err(Error::invalid("fit needs a nonempty dictionary"));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::invalid(format!("ridge must be >= 0, got {ridge}")));
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::NonFinite("targets"));
    }

    let p = dict.len();
    let extra = if ridge > 0.0 { p } else { 0 };
    let rows = xs.len() + extra;
    let mut design = DMatrix::<f64>::zeros(rows, p);
    for (i, x) in xs.iter().enumerate() {
        for (j, v) in features(dict, x)?.into_iter().enumerate() {
            design[(i, j)] = v;
        }
    }
    let shrink = ridge.sqrt();
    for j in 0..extra {
        design[(xs.len() + j, j)] = shrink;
    }
    let mut rhs = DVector::<f64>::zeros(rows);
    for (i, y) in ys.iter().enumerate() {
        rhs[i] = *y;
    }

    if rows < p {
        return Err(Error::RankDeficient { rank: rows, cols: p });
    }
    let qr = design.qr();
    let r = qr.r();
    let diag_max = (0..p).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    let rank = (0..p).filter(|&i| r[(i, i)].abs() > RANK_TOL * diag_max).count();
    if rank < p {
        return Err(Error::RankDeficient { rank, cols: p });
    }
    qr.q_tr_mul(&mut rhs);

    // back substitution on the leading p×p block of R
    let mut w = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = (i + 1..p).map(|j| r[(i, j)] * w[j]).sum();
        w[i] = (rhs[i] - s) / r[(i, i)];
    }
    RegressionModel::from_parts(dict.clone(), w, ridge)
}

pub fn predict(model: &RegressionModel, x: &Point) -> Result<f64> {
    let psi = features(&model.dictionary, x)?;
    Ok(psi.iter().zip(&model.weights).map(|(a, b)| a * b).sum())
}

/// Mean squared prediction error.
pub fn evaluate(model: &RegressionModel, xs: &[Point], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), found: ys.len() });
    }
    if xs.is_empty() {
        return Err(Error::invalid("evaluate needs at least one sample"));
    }
    let mut sse = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let e = predict(model, x)? - y;
        sse += e * e;
    }
    Ok(sse / xs.len() as f64)
}
