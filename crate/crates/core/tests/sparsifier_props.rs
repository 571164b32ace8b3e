mod common;

use oks_core::sparsifier::{check_alpha_compatible, kstar_oracle, run_stream};
use oks_core::{gram, log_det_psd, Dictionary, KernelSpec, Point, DEFAULT_PIVOT_TOL};
use proptest::prelude::*;
use rand::Rng;

use common::{
    dense_gram, dense_log_det, dense_residual, gaussian_points, gram_schmidt_det, kstar_by, random_kernel, rng,
};

fn dict_invariant_holds(d: &Dictionary) -> bool {
    d.is_empty() || d.log_det().ln() > d.len() as f64 * d.alpha().ln()
}

/// Admissions recomputed from scratch at every step by dense solves.
fn dense_reference_sizes(kernel: &KernelSpec, alpha: f64, pts: &[Point]) -> Vec<usize> {
    let mut members: Vec<Point> = Vec::new();
    let mut sizes = Vec::with_capacity(pts.len());
    for x in pts {
        if dense_residual(kernel, &members, x) > alpha {
            members.push(x.clone());
        }
        sizes.push(members.len());
    }
    sizes
}

proptest! {
    #![proptest_config(common::prop_config(200))]

    #[test]
    fn residuals_and_log_det_match_dense(seed in any::<u64>(), len in 1usize..120, dim in 1usize..=5) {
        let mut r = rng(seed);
        let kernel = random_kernel(&mut r);
        let alpha = r.random_range(0.01..0.5);
        let pts = gaussian_points(&mut r, len, dim, 1.0);
        let mut d = Dictionary::new(kernel.clone(), alpha).unwrap();
        for x in &pts {
            let dense = dense_residual(&kernel, d.members(), x);
            let ours = d.ald_residual(x).unwrap();
            prop_assert!((ours - dense.max(0.0)).abs() < 1e-8, "{ours} vs {dense}");
            d.offer(x).unwrap();
            prop_assert!(dict_invariant_holds(&d));
        }
        let dense_ld = dense_log_det(&dense_gram(&kernel, d.members()));
        prop_assert!((d.log_det().ln() - dense_ld).abs() < 1e-8);
    }

    #[test]
    fn members_are_alpha_compatible_in_every_subsequence(seed in any::<u64>(), dim in 1usize..=3) {
        let mut r = rng(seed);
        let kernel = random_kernel(&mut r);
        let alpha = r.random_range(0.05..0.6);
        let mut d = Dictionary::new(kernel.clone(), alpha).unwrap();
        for x in gaussian_points(&mut r, 60, dim, 1.0) {
            if d.len() == 5 {
                break;
            }
            d.offer(&x).unwrap();
        }
        let m = d.members();
        for mask in 0u32..(1 << m.len()) {
            let sub: Vec<Point> = (0..m.len()).filter(|i| mask >> i & 1 == 1).map(|i| m[i].clone()).collect();
            prop_assert!(check_alpha_compatible(&kernel, alpha, &sub).unwrap(), "mask {mask:b}");
        }
    }

    #[test]
    fn dictionary_never_exceeds_kstar(seed in any::<u64>(), n in 1usize..=9, dim in 1usize..=3) {
        let mut r = rng(seed);
        let kernel = random_kernel(&mut r);
        let alpha = r.random_range(0.01..1.0);
        let pts = gaussian_points(&mut r, n, dim, 1.0);
        let (d, _) = run_stream(&kernel, alpha, &pts, 0).unwrap();
        prop_assert!(d.len() <= kstar_oracle(&kernel, alpha, &pts).unwrap());
    }

    #[test]
    fn kstar_matches_gram_schmidt_enumeration(seed in any::<u64>(), n in 1usize..=8, dim in 1usize..=4) {
        let mut r = rng(seed);
        let alpha = 10f64.powf(r.random_range(-6.0..0.5));
        let pts = gaussian_points(&mut r, n, dim, 1.0);
        let reference = kstar_by(n, alpha, |idx| {
            let v: Vec<&[f64]> = idx.iter().map(|&i| pts[i].coords()).collect();
            gram_schmidt_det(&v)
        });
        prop_assert_eq!(kstar_oracle(&KernelSpec::Linear, alpha, &pts).unwrap(), reference);
    }

    #[test]
    fn failing_order_stays_failing(seed in any::<u64>(), n in 2usize..=10, dim in 1usize..=3) {
        let mut r = rng(seed);
        let kernel = random_kernel(&mut r);
        let alpha: f64 = r.random_range(0.01..1.2);
        let pts = gaussian_points(&mut r, n, dim, 1.0);
        let g = gram(&kernel, &pts).unwrap();
        let mut passes = vec![false; n + 1];
        passes[0] = true;
        for mask in 1u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let ld = log_det_psd(&g.principal(&idx), DEFAULT_PIVOT_TOL).unwrap();
            if ld.ln() > idx.len() as f64 * alpha.ln() {
                passes[idx.len()] = true;
            }
        }
        if let Some(first_fail) = passes.iter().position(|p| !p) {
            prop_assert!(passes[first_fail..].iter().all(|p| !p), "{passes:?}");
        }
    }

    #[test]
    fn permuted_streams_keep_invariants(seed in any::<u64>(), dim in 1usize..=3) {
        let mut r = rng(seed);
        let kernel = KernelSpec::rbf(0.8).unwrap();
        let alpha = 0.2;
        let mut pts = gaussian_points(&mut r, 30, dim, 1.0);
        for _ in 0..3 {
            let (d, _) = run_stream(&kernel, alpha, &pts, 0).unwrap();
            prop_assert!(dict_invariant_holds(&d));
            prop_assert!(check_alpha_compatible(&kernel, alpha, d.members()).unwrap());
            pts.reverse();
            pts.rotate_left(7);
        }
    }
}

#[test]
fn long_stream_matches_dense_reference_run() {
    let mut r = rng(7);
    let pts = gaussian_points(&mut r, 10_000, 1, 1.0);
    let kernel = KernelSpec::rbf(1.0).unwrap();
    let (d, trace) = run_stream(&kernel, 0.01, &pts, 1).unwrap();
    assert_eq!(trace.sizes(), dense_reference_sizes(&kernel, 0.01, &pts));
    assert!(d.len() > 5);
}

#[test]
fn small_fixtures() {
    let p = |c: &[f64]| Point::new(c.to_vec()).unwrap();
    let (d, _) = run_stream(&KernelSpec::rbf(1.0).unwrap(), 0.1, &vec![p(&[0.3, 0.1]); 20], 0).unwrap();
    assert_eq!(d.len(), 1);

    let basis: Vec<Point> = (0..4).map(|i| p(&(0..4).map(|j| f64::from(i == j)).collect::<Vec<_>>())).collect();
    let (d, _) = run_stream(&KernelSpec::Linear, 0.99, &basis, 0).unwrap();
    assert_eq!(d.len(), 4);

    let dup = [p(&[1.0]), p(&[2.0]), p(&[1.0])];
    assert!(!check_alpha_compatible(&KernelSpec::rbf(1.0).unwrap(), 0.01, &dup).unwrap());

    let plane = [p(&[1.0, 0.0]), p(&[0.0, 1.0]), p(&[1.0, 1.0]), p(&[-2.0, 0.5])];
    assert!(kstar_oracle(&KernelSpec::Linear, 1e-9, &plane).unwrap() <= 2);
    assert_eq!(kstar_oracle(&KernelSpec::Linear, 1.0, &[p(&[0.5])]).unwrap(), 0);

    let mut r = rng(3);
    let six = gaussian_points(&mut r, 6, 3, 1.0);
    let reference = kstar_by(6, 1e-6, |idx| {
        let v: Vec<&[f64]> = idx.iter().map(|&i| six[i].coords()).collect();
        gram_schmidt_det(&v)
    });
    assert_eq!(reference, 3);
    assert_eq!(kstar_oracle(&KernelSpec::Linear, 1e-6, &six).unwrap(), reference);
}

#[test]
fn kstar_equality_cases_are_counted() {
    // the dictionary witnesses its own size, so |D_n| = k*_n is expected to occur
    let mut r = rng(11);
    let kernel = KernelSpec::rbf(1.0).unwrap();
    let mut equal = 0;
    for _ in 0..100 {
        let pts = gaussian_points(&mut r, 8, 1, 1.0);
        let (d, _) = run_stream(&kernel, 0.1, &pts, 0).unwrap();
        let kstar = kstar_oracle(&kernel, 0.1, &pts).unwrap();
        assert!(d.len() <= kstar);
        equal += usize::from(d.len() == kstar);
    }
    println!("|D_n| == k*_n in {equal} of 100 streams");
    assert!(equal > 0);
}
