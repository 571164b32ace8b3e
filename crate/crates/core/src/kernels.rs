//! Kernel evaluation, Gram matrices and PSD log-determinants.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::pivoted_cholesky;
use crate::logvalue::LogValue;

/// A point in input space. Coordinates are finite and the dimension is at
/// least one.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("point must have dimension >= 1"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("point coordinates"));
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.0
    }
}

/// Declarative kernel description.
///
/// Text form: `linear`, `rbf:<bandwidth>`, `poly:<degree>:<offset>:<scale>`,
/// `pow:<m>:<base>`.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// `⟨x, y⟩`
    Linear,
    /// `exp(-‖x − y‖² / (2·bandwidth²))`
    Rbf { bandwidth: f64 },
    /// `(scale·⟨x, y⟩ + offset)^degree`
    Polynomial { degree: u32, offset: f64, scale: f64 },
    /// `base(x, y)^m`
    Power { base: Box<KernelSpec>, m: u32 },
}

impl KernelSpec {
    pub fn rbf(bandwidth: f64) -> Result<Self> {
        let k = KernelSpec::Rbf { bandwidth };
        k.validate()?;
        Ok(k)
    }

    pub fn polynomial(degree: u32, offset: f64, scale: f64) -> Result<Self> {
        let k = KernelSpec::Polynomial { degree, offset, scale };
        k.validate()?;
        Ok(k)
    }

    pub fn power(base: KernelSpec, m: u32) -> Result<Self> {
        let k = KernelSpec::Power { base: Box::new(base), m };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Rbf { bandwidth } => {
                if !(bandwidth.is_finite() && *bandwidth > 0.0) {
                    return Err(Error::invalid(format!("rbf bandwidth must be positive, got {bandwidth}")));
                }
                Ok(())
            }
            KernelSpec::Polynomial { degree, offset, scale } => {
                if *degree == 0 {
                    return Err(Error::invalid("polynomial degree must be >= 1"));
                }
                if !(offset.is_finite() && *offset >= 0.0) {
                    return Err(Error::invalid(format!("polynomial offset must be >= 0, got {offset}")));
                }
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::invalid(format!("polynomial scale must be positive, got {scale}")));
                }
                Ok(())
            }
            KernelSpec::Power { base, m } => {
                if *m == 0 {
                    return Err(Error::invalid("power exponent m must be >= 1"));
                }
                base.validate()
            }
        }
    }

    /// Evaluates on raw coordinate slices of equal length.
    fn eval_raw(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            KernelSpec::Linear => dot(x, y),
            KernelSpec::Rbf { bandwidth } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / (2.0 * bandwidth * bandwidth)).exp()
            }
            KernelSpec::Polynomial { degree, offset, scale } => (scale * dot(x, y) + offset).powi(*degree as i32),
            KernelSpec::Power { base, m } => base.eval_raw(x, y).powi(*m as i32),
        }
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Linear => f.write_str("linear"),
            KernelSpec::Rbf { bandwidth } => write!(f, "rbf:{bandwidth}"),
            KernelSpec::Polynomial { degree, offset, scale } => {
                write!(f, "poly:{degree}:{offset}:{scale}")
            }
            KernelSpec::Power { base, m } => write!(f, "pow:{m}:{base}"),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |what: &str| Error::invalid(format!("bad kernel spec '{s}': {what}"));
        let num = |v: &str| v.parse::<f64>().map_err(|_| bad("expected a number"));
        let int = |v: &str| v.parse::<u32>().map_err(|_| bad("expected an integer"));

        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        let spec = match head {
            "linear" if rest.is_empty() => KernelSpec::Linear,
            "rbf" => KernelSpec::Rbf { bandwidth: num(rest)? },
            "poly" => {
                let parts: Vec<&str> = rest.split(':').collect();
                if parts.len() != 3 {
                    return Err(bad("expected poly:<degree>:<offset>:<scale>"));
                }
                KernelSpec::Polynomial { degree: int(parts[0])?, offset: num(parts[1])?, scale: num(parts[2])? }
            }
            "pow" => {
                let (m, base) = rest.split_once(':').ok_or_else(|| bad("expected pow:<m>:<base>"))?;
                KernelSpec::Power { base: Box::new(base.parse()?), m: int(m)? }
            }
            _ => return Err(bad("unknown kernel")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Evaluates `spec` at `(x, y)`.
pub fn eval_kernel(spec: &KernelSpec, x: &Point, y: &Point) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), found: y.dim() });
    }
    Ok(spec.eval_raw(x.coords(), y.coords()))
}

/// Dense symmetric matrix, row-major with both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Entries must be finite and exactly symmetric.
    pub fn new(order: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != order * order {
            return Err(Error::DimensionMismatch { expected: order * order, found: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        for i in 0..order {
            for j in 0..i {
                if data[i * order + j] != data[j * order + i] {
                    return Err(Error::invalid(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(SymMatrix { order, data })
    }

    /// Builds from the lower triangle `f(i, j)` with `j <= i`.
    pub fn from_lower_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; order * order];
        for i in 0..order {
            for j in 0..=i {
                let v = f(i, j);
                data[i * order + j] = v;
                data[j * order + i] = v;
            }
        }
        SymMatrix { order, data }
    }

    pub fn identity(order: usize) -> Self {
        Self::from_lower_fn(order, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    pub fn max_diag(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).fold(0.0, f64::max)
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn principal(&self, idx: &[usize]) -> SymMatrix {
        Self::from_lower_fn(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }

    /// Entrywise product.
    pub fn hadamard(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.order != other.order {
            return Err(Error::DimensionMismatch { expected: self.order, found: other.order });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect();
        Ok(SymMatrix { order: self.order, data })
    }

    pub fn to_dmatrix(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.order, self.order, &self.data)
    }
}

/// Gram matrix of `points` under `spec`.
pub fn gram(spec: &KernelSpec, points: &[Point]) -> Result<SymMatrix> {
    if let Some(first) = points.first() {
        if let Some(p) = points.iter().find(|p| p.dim() != first.dim()) {
            return Err(Error::DimensionMismatch { expected: first.dim(), found: p.dim() });
        }
    }
    Ok(SymMatrix::from_lower_fn(points.len(), |i, j| spec.eval_raw(points[i].coords(), points[j].coords())))
}

/// Log-determinant of a PSD matrix via pivoted Cholesky.
///
/// Returns [`LogValue::Zero`] when a pivot falls below `tol · max_diag`,
/// and [`Error::NotPsd`] when one falls below `-tol · max_diag`. The empty
/// matrix has determinant one.
pub fn log_det_psd(m: &SymMatrix, tol: f64) -> Result<LogValue> {
    if m.order() == 0 {
        return Ok(LogValue::ONE);
    }
    let f = pivoted_cholesky(m, tol)?;
    if !f.is_full_rank() {
        return Ok(LogValue::Zero);
    }
    Ok(LogValue::Finite(f.pivots.iter().map(|p| p.ln()).sum()))
}
