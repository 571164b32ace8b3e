use crate::error::{Error, Result};
use crate::harness::{Exec, Sampler};
use crate::kernels::{gram, log_det_psd, KernelSpec};
use crate::sparsifier::{kstar_oracle, KSTAR_MAX_POINTS};
use crate::DEFAULT_PIVOT_TOL;

/// Sample mean with its standard error `s / √trials`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

impl McEstimate {
    /// Serial reduction in index order.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid("an estimate needs at least two trials"));
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        Ok(McEstimate { mean, std_error: (var / n).sqrt(), trials: samples.len() as u64 })
    }

    /// `|mean − target| ≤ z·std_error`
    pub fn within(&self, target: f64, z: f64) -> bool {
        (self.mean - target).abs() <= z * self.std_error
    }
}

/// Largest Gram order for determinant estimators.
pub const MC_MAX_K: usize = 6;
/// Fewest trials accepted by the determinant estimators.
pub const MC_MIN_TRIALS: u64 = 1000;

fn check_det_args(k: usize, trials: u64) -> Result<()> {
    if k == 0 || k > MC_MAX_K {
        return Err(Error::invalid(format!("k must lie in 1..={MC_MAX_K}, got {k}")));
    }
    if trials < MC_MIN_TRIALS {
        return Err(Error::invalid(format!("need at least {MC_MIN_TRIALS} trials, got {trials}")));
    }
    Ok(())
}

/// Monte Carlo estimate of `E[(det G_k)^m]`; singular Grams contribute 0.
fn det_power(sampler: &Sampler, kernel: &KernelSpec, k: usize, m: u32, trials: u64, exec: Exec) -> Result<McEstimate> {
    let samples = exec
        .map_trials(trials, |t| {
            let g = gram(kernel, &sampler.trial(t, k))?;
            Ok(log_det_psd(&g, DEFAULT_PIVOT_TOL)?.powf(m as f64).exp())
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    McEstimate::from_samples(&samples)
}

/// Estimates `E[det G_k]` over `k` fresh draws per trial.
pub fn mc_expected_gram_det(
    sampler: &Sampler,
    kernel: &KernelSpec,
    k: usize,
    trials: u64,
    exec: Exec,
) -> Result<McEstimate> {
    check_det_args(k, trials)?;
    det_power(sampler, kernel, k, 1, trials, exec)
}

/// Estimates `E[(det G_k)^m]` for `m ∈ {2, 3}`.
pub fn mc_det_moment(
    sampler: &Sampler,
    kernel: &KernelSpec,
    k: usize,
    m: u32,
    trials: u64,
    exec: Exec,
) -> Result<McEstimate> {
    check_det_args(k, trials)?;
    if !(2..=3).contains(&m) {
        return Err(Error::invalid(format!("moment order m must be 2 or 3, got {m}")));
    }
    det_power(sampler, kernel, k, m, trials, exec)
}

/// Relative slack for comparisons that are equalities in exact arithmetic,
/// such as a `k = 1` moment against its bound.
pub const EXACT_SLACK: f64 = 1e-10;

/// `E[(Σ λ_i z_i²)^m]` for standard normal `z`, `m ∈ {1, 2, 3}`: the exact
/// `k = 1` moment `E[(det G_1)^m]` for a diag sampler with the linear kernel.
pub fn gaussian_quadratic_moment(lambda: &[f64], m: u32) -> Result<f64> {
    let p = |r: i32| lambda.iter().map(|l| l.powi(r)).sum::<f64>();
    // cumulants κ_r = 2^{r−1}(r−1)!·Σλ^r
    let (k1, k2, k3) = (p(1), 2.0 * p(2), 8.0 * p(3));
    match m {
        1 => Ok(k1),
        2 => Ok(k1 * k1 + k2),
        3 => Ok(k1 * k1 * k1 + 3.0 * k1 * k2 + k3),
        _ => Err(Error::invalid(format!("moment order must be 1, 2 or 3, got {m}"))),
    }
}

/// Largest sample size per trial for [`mc_kstar_tail`].
pub const KSTAR_TAIL_MAX_N: usize = 10;

/// Fraction of trials in which `k*_n ≥ k`.
pub fn mc_kstar_tail(
    sampler: &Sampler,
    kernel: &KernelSpec,
    alpha: f64,
    n: usize,
    k: usize,
    trials: u64,
    exec: Exec,
) -> Result<McEstimate> {
    if n == 0 || n > KSTAR_TAIL_MAX_N.min(KSTAR_MAX_POINTS) {
        return Err(Error::invalid(format!("n must lie in 1..={KSTAR_TAIL_MAX_N}, got {n}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    let samples = exec
        .map_trials(trials, |t| {
            let kstar = kstar_oracle(kernel, alpha, &sampler.trial(t, n))?;
            Ok(if kstar >= k { 1.0 } else { 0.0 })
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    McEstimate::from_samples(&samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_statistics() {
        let e = McEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(e.mean, 2.5);
        assert!((e.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(McEstimate::from_samples(&[1.0]).is_err());
    }

    #[test]
    fn rank_deficient_features_give_exact_zero() {
        let s = Sampler::diag(&[1.0, 0.5], 11).unwrap();
        let e = mc_expected_gram_det(&s, &KernelSpec::Linear, 3, 2000, Exec::serial()).unwrap();
        assert_eq!(e.mean, 0.0);
        assert_eq!(e.std_error, 0.0);
        let e = mc_det_moment(&s, &KernelSpec::Linear, 3, 2, 1000, Exec::serial()).unwrap();
        assert_eq!(e.mean, 0.0);
    }

    #[test]
    fn trace_identity_for_k1() {
        let s = Sampler::diag(&[1.0, 0.5], 5).unwrap();
        let e = mc_expected_gram_det(&s, &KernelSpec::Linear, 1, 20_000, Exec::serial()).unwrap();
        assert!(e.within(1.5, 3.0), "{e:?}");
    }

    #[test]
    fn argument_checks() {
        let s = Sampler::diag(&[1.0], 5).unwrap();
        assert!(mc_expected_gram_det(&s, &KernelSpec::Linear, 7, 1000, Exec::serial()).is_err());
        assert!(mc_expected_gram_det(&s, &KernelSpec::Linear, 1, 999, Exec::serial()).is_err());
        assert!(mc_det_moment(&s, &KernelSpec::Linear, 1, 4, 1000, Exec::serial()).is_err());
        assert!(mc_kstar_tail(&s, &KernelSpec::Linear, 0.1, 11, 1, 100, Exec::serial()).is_err());
    }

    #[test]
    fn quadratic_moments() {
        assert_eq!(gaussian_quadratic_moment(&[1.0], 2).unwrap(), 3.0);
        assert_eq!(gaussian_quadratic_moment(&[1.0], 3).unwrap(), 15.0);
        // chi-square with 2 dof: E[Q²] = 8, E[Q³] = 48
        assert_eq!(gaussian_quadratic_moment(&[1.0, 1.0], 2).unwrap(), 8.0);
        assert_eq!(gaussian_quadratic_moment(&[1.0, 1.0], 3).unwrap(), 48.0);
        assert!(gaussian_quadratic_moment(&[1.0], 4).is_err());
    }

    #[test]
    fn kstar_tail_extremes() {
        let s = Sampler::gaussian(2, 1.0, 9).unwrap();
        let rbf = KernelSpec::rbf(1.0).unwrap();
        // det G_1 = 1 for every rbf point
        let e = mc_kstar_tail(&s, &rbf, 2.0, 5, 1, 200, Exec::serial()).unwrap();
        assert_eq!(e.mean, 0.0);
        let e = mc_kstar_tail(&s, &rbf, 0.5, 5, 1, 200, Exec::serial()).unwrap();
        assert_eq!(e.mean, 1.0);
    }
}
