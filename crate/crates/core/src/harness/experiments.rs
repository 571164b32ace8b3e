use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::harness::{Sampler, NYSTROM_STREAM};
use crate::kernels::{eval_kernel, gram, log_det_psd, KernelSpec, Point, SymMatrix};
use crate::linalg::{pivoted_cholesky, spectral_norm_sym};
use crate::logvalue::LogValue;
use crate::regress::{evaluate, fit};
use crate::sparsifier::{run_stream, run_stream_at, Dictionary, GrowthTrace};
use crate::DEFAULT_PIVOT_TOL;

/// Largest stream length for [`growth_experiment`].
pub const GROWTH_MAX_N: usize = 100_000;
/// Largest sample size for [`nystrom_compare`].
pub const NYSTROM_MAX_N: usize = 3000;

const POWER_ITERS: usize = 200;
const POWER_REL_TOL: f64 = 1e-9;

/// Streams `n_max` points through OKS, recording at each checkpoint.
pub fn growth_experiment(
    sampler: &Sampler,
    kernel: &KernelSpec,
    alpha: f64,
    n_max: usize,
    checkpoints: &[usize],
) -> Result<GrowthTrace> {
    if n_max == 0 || n_max > GROWTH_MAX_N {
        return Err(Error::invalid(format!("n_max must lie in 1..={GROWTH_MAX_N}, got {n_max}")));
    }
    let points = sampler.stream(n_max)?;
    let (_, trace) = run_stream_at(kernel, alpha, &points, |n| checkpoints.contains(&n))?;
    Ok(trace)
}

/// OKS dictionary versus a uniformly random subset of the same size.
#[derive(Debug, Clone, PartialEq)]
pub struct NystromRecord {
    pub n: usize,
    pub oks_size: usize,
    /// Pivots retained from the random subset's Gram after tolerance pivoting.
    pub nystrom_rank: usize,
    pub log_det_oks: LogValue,
    pub log_det_nystrom: LogValue,
    pub entrywise_err_oks: f64,
    pub entrywise_err_nystrom: f64,
    pub spectral_err_oks: f64,
    pub spectral_err_nystrom: f64,
    pub entrywise_bound: f64,
}

impl NystromRecord {
    pub const CSV_HEADER: &'static str = "n,oks_size,nystrom_rank,log_det_oks,log_det_nystrom,entrywise_err_oks,\
entrywise_err_nystrom,spectral_err_oks,spectral_err_nystrom,entrywise_bound";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.oks_size,
            self.nystrom_rank,
            self.log_det_oks,
            self.log_det_nystrom,
            self.entrywise_err_oks,
            self.entrywise_err_nystrom,
            self.spectral_err_oks,
            self.spectral_err_nystrom,
            self.entrywise_bound
        )
    }

    pub fn bound_holds(&self) -> bool {
        self.entrywise_err_oks < self.entrywise_bound
    }
}

/// Approximation `K_nS·K_SS⁻¹·K_Sn` restricted to the pivots of `K_SS` that
/// survive tolerance pivoting. Returns `(kept, max |G − Ĝ|, ‖G − Ĝ‖₂)`.
fn projection_error(g: &SymMatrix, subset: &[usize]) -> Result<(usize, f64, f64)> {
    let n = g.order();
    let f = pivoted_cholesky(&g.principal(subset), DEFAULT_PIVOT_TOL)?;
    let r = f.rank;
    let kept: Vec<usize> = f.perm[..r].iter().map(|&i| subset[i]).collect();

    // W = L⁻¹·K_{kept,n}, r × n
    let mut w = vec![0.0; r * n];
    for col in 0..n {
        for i in 0..r {
            let s: f64 = (0..i).map(|j| f.l(i, j) * w[j * n + col]).sum();
            w[i * n + col] = (g.get(kept[i], col) - s) / f.l(i, i);
        }
    }
    let mut err = vec![0.0; n * n];
    let mut max_abs = 0.0f64;
    for a in 0..n {
        for b in 0..=a {
            let approx: f64 = (0..r).map(|i| w[i * n + a] * w[i * n + b]).sum();
            let e = g.get(a, b) - approx;
            err[a * n + b] = e;
            err[b * n + a] = e;
            max_abs = max_abs.max(e.abs());
        }
    }
    Ok((r, max_abs, spectral_norm_sym(&err, n, POWER_ITERS, POWER_REL_TOL)))
}

pub fn nystrom_compare(sampler: &Sampler, kernel: &KernelSpec, alpha: f64, n: usize) -> Result<NystromRecord> {
    if n == 0 || n > NYSTROM_MAX_N {
        return Err(Error::invalid(format!("n must lie in 1..={NYSTROM_MAX_N}, got {n}")));
    }
    let points: Vec<Point> = sampler.stream(n)?;
    let g = gram(kernel, &points)?;

    let mut dict = Dictionary::new(kernel.clone(), alpha)?;
    let mut oks_idx = Vec::new();
    for (i, x) in points.iter().enumerate() {
        if dict.offer(x)?.admitted {
            oks_idx.push(i);
        }
    }
    let mut rng = sampler.rng(NYSTROM_STREAM);
    let mut rand_idx = sample(&mut rng, n, oks_idx.len()).into_vec();
    rand_idx.sort_unstable();

    let (_, ent_oks, spec_oks) = projection_error(&g, &oks_idx)?;
    let (rank_nys, ent_nys, spec_nys) = projection_error(&g, &rand_idx)?;
    let log_det_nystrom = log_det_psd(&g.principal(&rand_idx), DEFAULT_PIVOT_TOL)?;

    let sup_norm = points
        .iter()
        .map(|x| eval_kernel(kernel, x, x).map(|v| v.max(0.0).sqrt()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    Ok(NystromRecord {
        n,
        oks_size: dict.len(),
        nystrom_rank: rank_nys,
        log_det_oks: dict.log_det(),
        log_det_nystrom,
        entrywise_err_oks: ent_oks,
        entrywise_err_nystrom: ent_nys,
        spectral_err_oks: spec_oks,
        spectral_err_nystrom: spec_nys,
        entrywise_bound: 2.0 * sup_norm * alpha.sqrt(),
    })
}

/// Stream for the label noise in [`regression_experiment`].
pub const NOISE_STREAM: u64 = u64::MAX - 3;

/// Regression target on the real line.
pub fn smooth_target(x: f64) -> f64 {
    (2.0 * x).sin()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionRecord {
    pub n_train: usize,
    pub n_test: usize,
    pub dict_size: usize,
    pub train_mse: f64,
    /// Against the noiseless target, so it measures estimation error only.
    pub test_mse: f64,
}

impl RegressionRecord {
    pub const CSV_HEADER: &'static str = "n_train,n_test,dict_size,train_mse,test_mse";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.n_train, self.n_test, self.dict_size, self.train_mse, self.test_mse)
    }
}

/// Fits `smooth_target + noise·z` on `n_train` standard-normal inputs and
/// scores on `n_test` fresh inputs. Training inputs and noise come from
/// prefix-stable streams, so a larger `n_train` extends the same sample.
pub fn regression_experiment(
    kernel: &KernelSpec,
    alpha: f64,
    ridge: f64,
    n_train: usize,
    n_test: usize,
    noise: f64,
    seed: u64,
) -> Result<RegressionRecord> {
    if n_train == 0 || n_test == 0 {
        return Err(Error::invalid("n_train and n_test must be >= 1"));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::invalid(format!("noise must be >= 0, got {noise}")));
    }
    let sampler = Sampler::gaussian(1, 1.0, seed)?;
    let xs = sampler.stream(n_train)?;
    let mut rng = sampler.rng(NOISE_STREAM);
    let ys: Vec<f64> = xs
        .iter()
        .map(|x| {
            let z: f64 = rng.sample(StandardNormal);
            smooth_target(x.coords()[0]) + noise * z
        })
        .collect();
    let test = sampler.aux(n_test);
    let test_y: Vec<f64> = test.iter().map(|x| smooth_target(x.coords()[0])).collect();

    let (dict, _) = run_stream(kernel, alpha, &xs, 0)?;
    let model = fit(&dict, &xs, &ys, ridge)?;
    Ok(RegressionRecord {
        n_train,
        n_test,
        dict_size: dict.len(),
        train_mse: evaluate(&model, &xs, &ys)?,
        test_mse: evaluate(&model, &test, &test_y)?,
    })
}
