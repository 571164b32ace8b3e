//! Independent reference implementations and random fixtures shared by the
//! integration tests. Nothing here calls the factorization code under test.

#![allow(dead_code)]

use nalgebra::DMatrix;
use oks_core::{eval_kernel, KernelSpec, Point};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_points(rng: &mut ChaCha8Rng, n: usize, dim: usize, scale: f64) -> Vec<Point> {
    (0..n)
        .map(|_| {
            let c = (0..dim)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    scale * z
                })
                .collect();
            Point::new(c).unwrap()
        })
        .collect()
}

/// One of a handful of bounded-ish kernels.
pub fn random_kernel(rng: &mut ChaCha8Rng) -> KernelSpec {
    match rng.random_range(0..4) {
        0 => KernelSpec::Linear,
        1 => KernelSpec::rbf(rng.random_range(0.3..2.0)).unwrap(),
        2 => KernelSpec::polynomial(rng.random_range(1..=3), 1.0, 0.5).unwrap(),
        _ => KernelSpec::power(KernelSpec::rbf(rng.random_range(0.5..2.0)).unwrap(), 2).unwrap(),
    }
}

pub fn dense_gram(kernel: &KernelSpec, pts: &[Point]) -> DMatrix<f64> {
    DMatrix::from_fn(pts.len(), pts.len(), |i, j| eval_kernel(kernel, &pts[i], &pts[j]).unwrap())
}

/// `k(x,x) − gᵀ G⁻¹ g` by a fresh LU solve.
pub fn dense_residual(kernel: &KernelSpec, members: &[Point], x: &Point) -> f64 {
    let kxx = eval_kernel(kernel, x, x).unwrap();
    if members.is_empty() {
        return kxx;
    }
    let g = dense_gram(kernel, members);
    let v = nalgebra::DVector::from_fn(members.len(), |i, _| eval_kernel(kernel, &members[i], x).unwrap());
    let sol = g.lu().solve(&v).expect("dictionary Gram is nonsingular");
    kxx - v.dot(&sol)
}

/// `ln det` by LU; `-inf` when the determinant is not positive.
pub fn dense_log_det(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let d = m.clone().lu().determinant();
    if d > 0.0 {
        d.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Squared Gram–Schmidt residual norms of explicit vectors; their product is
/// the linear-kernel Gram determinant. A residual below `1e-12·‖v‖²` counts
/// as linear dependence, so round-off never fakes full rank.
pub fn gram_schmidt_det(vectors: &[&[f64]]) -> f64 {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut det = 1.0;
    for v in vectors {
        let mut r = v.to_vec();
        for b in &basis {
            let c: f64 = r.iter().zip(b).map(|(a, b)| a * b).sum();
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= c * bi;
            }
        }
        let nrm2: f64 = r.iter().map(|x| x * x).sum();
        let scale: f64 = v.iter().map(|x| x * x).sum();
        det *= nrm2;
        if nrm2 <= 1e-12 * scale {
            return 0.0;
        }
        let nrm = nrm2.sqrt();
        basis.push(r.iter().map(|x| x / nrm).collect());
    }
    det
}

/// Largest `k` such that some `k`-subset has `det > αᵏ`, with `det` supplied
/// by the caller.
pub fn kstar_by(n: usize, alpha: f64, det: impl Fn(&[usize]) -> f64) -> usize {
    let mut best = 0;
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let k = idx.len();
        if k > best && det(&idx) > alpha.powi(k as i32) {
            best = k;
        }
    }
    best
}

/// `k!·e_k(values)` by recursive enumeration in linear scale.
pub fn esp_linear(values: &[f64], k: usize) -> f64 {
    fn rec(v: &[f64], k: usize) -> f64 {
        if k == 0 {
            return 1.0;
        }
        if v.len() < k {
            return 0.0;
        }
        v[0] * rec(&v[1..], k - 1) + rec(&v[1..], k)
    }
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    fact * rec(values, k)
}

/// Exact `C(n, k)` in integers.
pub fn binomial_exact(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Proptest settings without on-disk failure persistence.
pub fn prop_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config { failure_persistence: None, ..proptest::test_runner::Config::with_cases(cases) }
}
