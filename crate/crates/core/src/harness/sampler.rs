use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::io::read_table;
use crate::kernels::Point;
use crate::symfun::Spectrum;

/// Stream used by [`Sampler::stream`].
pub const SAMPLE_STREAM: u64 = u64::MAX;
/// Stream for the random Nyström subset.
pub const NYSTROM_STREAM: u64 = u64::MAX - 1;
/// Stream for auxiliary draws, such as the sample behind an empirical spectrum.
pub const AUX_STREAM: u64 = u64::MAX - 2;

#[derive(Debug, Clone, PartialEq)]
pub enum SamplerKind {
    /// Coordinates `√λ_i · z_i`; with the linear kernel the covariance
    /// operator has exactly this spectrum.
    DiagGaussian(Spectrum),
    /// `scale · z` in `dim` dimensions.
    GaussianInput { dim: usize, scale: f64 },
    /// Rows of a CSV file. Streams replay them in order; trials draw rows
    /// uniformly with replacement.
    Dataset(Arc<Vec<Point>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sampler {
    pub kind: SamplerKind,
    pub seed: u64,
}

impl Sampler {
    pub fn new(kind: SamplerKind, seed: u64) -> Result<Self> {
        match &kind {
            SamplerKind::DiagGaussian(s) if s.is_empty() => {
                return Err(Error::invalid("diag sampler needs at least one eigenvalue"))
            }
            SamplerKind::GaussianInput { dim, scale } if *dim == 0 || !(*scale > 0.0 && scale.is_finite()) => {
                return Err(Error::invalid("gaussian sampler needs dim >= 1 and scale > 0"))
            }
            SamplerKind::Dataset(rows) if rows.is_empty() => return Err(Error::invalid("dataset is empty")),
            _ => {}
        }
        Ok(Sampler { kind, seed })
    }

    pub fn diag(values: &[f64], seed: u64) -> Result<Self> {
        Self::new(SamplerKind::DiagGaussian(Spectrum::finite(values.to_vec())?), seed)
    }

    pub fn gaussian(dim: usize, scale: f64, seed: u64) -> Result<Self> {
        Self::new(SamplerKind::GaussianInput { dim, scale }, seed)
    }

    /// Parses `diag:<v1>,<v2>,…`, `gauss:<dim>:<scale>` or `dataset:<path>`.
    pub fn parse(text: &str, seed: u64) -> Result<Self> {
        let bad = || Error::invalid(format!("bad sampler '{text}'"));
        let (head, rest) = text.trim().split_once(':').ok_or_else(bad)?;
        match head {
            "diag" => {
                let values =
                    rest.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
                Self::diag(&values, seed)
            }
            "gauss" => {
                let (d, s) = rest.split_once(':').ok_or_else(bad)?;
                Self::gaussian(d.parse().map_err(|_| bad())?, s.parse().map_err(|_| bad())?, seed)
            }
            "dataset" => {
                let table = read_table(Path::new(rest))?;
                Self::new(SamplerKind::Dataset(Arc::new(table.points)), seed)
            }
            _ => Err(bad()),
        }
    }

    /// Text form accepted by [`Sampler::parse`]; `None` for datasets, whose
    /// path is not retained.
    pub fn describe(&self) -> Option<String> {
        match &self.kind {
            SamplerKind::DiagGaussian(s) => {
                let v: Vec<String> = s.values().iter().map(|x| x.to_string()).collect();
                Some(format!("diag:{}", v.join(",")))
            }
            SamplerKind::GaussianInput { dim, scale } => Some(format!("gauss:{dim}:{scale}")),
            SamplerKind::Dataset(_) => None,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            SamplerKind::DiagGaussian(s) => s.len(),
            SamplerKind::GaussianInput { dim, .. } => *dim,
            SamplerKind::Dataset(rows) => rows[0].dim(),
        }
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// `count` i.i.d. draws from `rng`.
    pub fn draw(&self, rng: &mut ChaCha8Rng, count: usize) -> Vec<Point> {
        (0..count).map(|_| self.draw_one(rng)).collect()
    }

    fn draw_one(&self, rng: &mut ChaCha8Rng) -> Point {
        let coords = match &self.kind {
            SamplerKind::DiagGaussian(s) => s
                .values()
                .iter()
                .map(|l| {
                    let z: f64 = rng.sample(StandardNormal);
                    l.sqrt() * z
                })
                .collect(),
            SamplerKind::GaussianInput { dim, scale } => (0..*dim)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    scale * z
                })
                .collect(),
            SamplerKind::Dataset(rows) => return rows[rng.random_range(0..rows.len())].clone(),
        };
        Point::new(coords).expect("sampler produced a finite point")
    }

    /// Points for trial `trial`.
    pub fn trial(&self, trial: u64, count: usize) -> Vec<Point> {
        self.draw(&mut self.rng(trial), count)
    }

    /// The first `n` points of the sampler's stream. Datasets replay rows in
    /// order and fail if they hold fewer than `n`.
    pub fn stream(&self, n: usize) -> Result<Vec<Point>> {
        match &self.kind {
            SamplerKind::Dataset(rows) => {
                if rows.len() < n {
                    return Err(Error::invalid(format!("dataset has {} rows, {n} requested", rows.len())));
                }
                Ok(rows[..n].to_vec())
            }
            _ => Ok(self.draw(&mut self.rng(SAMPLE_STREAM), n)),
        }
    }

    /// `n` i.i.d. draws from a reserved auxiliary stream.
    pub fn aux(&self, n: usize) -> Vec<Point> {
        self.draw(&mut self.rng(AUX_STREAM), n)
    }
}
