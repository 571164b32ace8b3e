mod common;

use oks_core::regress::{evaluate, fit, predict, RegressionModel};
use oks_core::sparsifier::run_stream;
use oks_core::{eval_kernel, Dictionary, KernelSpec, Point};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use common::{gaussian_points, random_kernel, rng};

fn p(c: &[f64]) -> Point {
    Point::new(c.to_vec()).unwrap()
}

fn norm(w: &[f64]) -> f64 {
    w.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn linear_fixture(seed: u64) -> (Dictionary, Vec<Point>, Vec<f64>) {
    let mut r = rng(seed);
    let xs = gaussian_points(&mut r, 200, 2, 1.0);
    let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.coords()[0]).collect();
    let (d, _) = run_stream(&KernelSpec::Linear, 1e-6, &xs, 0).unwrap();
    (d, xs, ys)
}

#[test]
fn linear_target_is_recovered() {
    let (d, xs, ys) = linear_fixture(5);
    assert_eq!(d.len(), 2);
    let model = fit(&d, &xs, &ys, 0.0).unwrap();
    let mut r = rng(6);
    let test = gaussian_points(&mut r, 200, 2, 1.0);
    let test_y: Vec<f64> = test.iter().map(|x| 3.0 * x.coords()[0]).collect();
    assert!(evaluate(&model, &test, &test_y).unwrap() < 1e-10);
    assert!((predict(&model, &p(&[2.0, 0.0])).unwrap() - 6.0).abs() < 1e-5);
}

#[test]
fn shuffled_labels_fit_worse() {
    let (d, xs, ys) = linear_fixture(8);
    let mut shuffled = ys.clone();
    shuffled.shuffle(&mut rng(9));
    let true_mse = evaluate(&fit(&d, &xs, &ys, 0.0).unwrap(), &xs, &ys).unwrap();
    let shuffled_mse = evaluate(&fit(&d, &xs, &shuffled, 0.0).unwrap(), &xs, &shuffled).unwrap();
    assert!(shuffled_mse > true_mse, "{shuffled_mse} <= {true_mse}");
}

#[test]
fn interpolation_and_trivial_models() {
    let xs = vec![p(&[1.0, 0.0, 0.0]), p(&[0.3, 2.0, 0.0]), p(&[-1.0, 0.5, 1.5])];
    let ys = vec![0.7, -2.0, 4.0];
    let (d, _) = run_stream(&KernelSpec::Linear, 1e-6, &xs, 0).unwrap();
    assert_eq!(d.len(), 3);
    let model = fit(&d, &xs, &ys, 0.0).unwrap();
    assert!(evaluate(&model, &xs, &ys).unwrap() < 1e-20);

    let zero = fit(&d, &xs, &[0.0; 3], 0.0).unwrap();
    assert!(zero.weights().iter().all(|&w| w == 0.0));
    let zero_ridge = fit(&d, &xs, &[0.0; 3], 0.5).unwrap();
    assert!(zero_ridge.weights().iter().all(|&w| w == 0.0));
    assert_eq!(predict(&zero, &p(&[5.0, -3.0, 2.0])).unwrap(), 0.0);
    assert_eq!(evaluate(&zero, &xs[..2], &[1.0, -1.0]).unwrap(), 1.0);

    let kernel = KernelSpec::rbf(1.0).unwrap();
    let mut single = Dictionary::new(kernel.clone(), 0.1).unwrap();
    single.offer(&p(&[0.5])).unwrap();
    let model = RegressionModel::from_parts(single, vec![2.5], 0.0).unwrap();
    let x = p(&[-0.25]);
    assert_eq!(predict(&model, &x).unwrap(), 2.5 * eval_kernel(&kernel, &x, &p(&[0.5])).unwrap());
    assert!(predict(&model, &p(&[1.0, 1.0])).is_err());
}

#[test]
fn rank_deficient_design_needs_ridge() {
    // two members, but every training point lies on one line through the origin
    let mut d = Dictionary::new(KernelSpec::Linear, 1e-6).unwrap();
    d.offer(&p(&[1.0, 0.0])).unwrap();
    d.offer(&p(&[0.0, 1.0])).unwrap();
    let xs: Vec<Point> = (1..=5).map(|i| p(&[i as f64, i as f64])).collect();
    let ys: Vec<f64> = (1..=5).map(f64::from).collect();
    assert!(fit(&d, &xs, &ys, 0.0).is_err());
    assert!(fit(&d, &xs, &ys, 1e-3).is_ok());
}

proptest! {
    #![proptest_config(common::prop_config(100))]

    #[test]
    fn ridge_never_increases_weight_norm(seed in any::<u64>(), n in 5usize..60, dim in 1usize..=3) {
        let mut r = rng(seed);
        let kernel = random_kernel(&mut r);
        let pts = gaussian_points(&mut r, n, dim, 1.0);
        let ys: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let (d, _) = run_stream(&kernel, 0.05, &pts, 0).unwrap();
        let mut previous = f64::INFINITY;
        for ridge in [0.0, 1e-3, 1e-1, 1.0, 10.0] {
            let Ok(model) = fit(&d, &pts, &ys, ridge) else { continue };
            let w = norm(model.weights());
            prop_assert!(w <= previous * (1.0 + 1e-9), "ridge {ridge}: {w} > {previous}");
            previous = w;
        }
    }

    #[test]
    fn fit_ignores_training_order(seed in any::<u64>(), n in 5usize..80, ridge in prop::sample::select(vec![0.0, 0.01, 1.0])) {
        let mut r = rng(seed);
        let kernel = KernelSpec::rbf(1.0).unwrap();
        let pts = gaussian_points(&mut r, n, 1, 1.0);
        let ys: Vec<f64> = pts.iter().map(|x| x.coords()[0].sin()).collect();
        let (d, _) = run_stream(&kernel, 0.05, &pts, 0).unwrap();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut r);
        let px: Vec<Point> = order.iter().map(|&i| pts[i].clone()).collect();
        let py: Vec<f64> = order.iter().map(|&i| ys[i]).collect();
        let a = fit(&d, &pts, &ys, ridge).unwrap();
        let b = fit(&d, &px, &py, ridge).unwrap();
        for (x, y) in a.weights().iter().zip(b.weights()) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{x} vs {y}");
        }
    }
}
