//! Morrey-type norm estimators against brute force and structural laws.

mod common;

use std::f64::consts::PI;

use fhw_core::grid::{BoxGrid, GridFunction};
use fhw_core::norms::{
    besov_morrey_norm, check_holder, lp_block, morrey_norm, sobolev_morrey_norm, BallParams, LPPartition,
};
use rand::Rng;

fn grids() -> Vec<BoxGrid> {
    vec![
        BoxGrid::cube(1, 16, 1.0).unwrap(),
        BoxGrid::cube(1, 32, 3.0).unwrap(),
        BoxGrid::cube(2, 8, 1.0).unwrap(),
        BoxGrid::cube(2, 16, 2.0).unwrap(),
        BoxGrid::new(vec![8, 16], 1.0).unwrap(),
        BoxGrid::cube(3, 8, 1.0).unwrap(),
    ]
}

#[test]
fn exhaustive_equals_brute_force_bitwise() {
    let balls = BallParams::exhaustive();
    for (i, g) in grids().iter().enumerate() {
        let f = common::integer_field(g, 5, 100 + i as u64);
        for &p in &[1.0, 2.0] {
            for &mu in &[0.0, 0.5 * g.dim() as f64, g.dim() as f64 - 0.25] {
                let got = morrey_norm(&f, p, mu, &balls).unwrap().value;
                let want = common::brute_force_morrey(&f, p, mu);
                assert_eq!(got.to_bits(), want.to_bits(), "grid {:?}, p {p}, mu {mu}: {got} vs {want}", g.sizes());
            }
        }
    }
}

#[test]
fn auto_family_is_exhaustive_on_small_grids() {
    let g = BoxGrid::cube(2, 32, 1.0).unwrap();
    let f = common::integer_field(&g, 3, 7);
    let rep = morrey_norm(&f, 2.0, 1.0, &BallParams::default()).unwrap();
    assert!(rep.exhaustive);
    assert_eq!(rep.value.to_bits(), common::brute_force_morrey(&f, 2.0, 1.0).to_bits());
}

#[test]
fn dilation_scaling_law() {
    // f(2x) on the half box has the same samples at half the spacing
    for (n, mu) in [(1usize, 0.5), (2, 1.0), (2, 0.0)] {
        let big = BoxGrid::cube(n, 64, 4.0).unwrap();
        let small = BoxGrid::cube(n, 64, 2.0).unwrap();
        let f = GridFunction::from_fn(big.clone(), |x| x.iter().map(|v| (0.75 * PI * v).cos()).product()).unwrap();
        let g = GridFunction::from_fn(small, |x| x.iter().map(|v| (1.5 * PI * v).cos()).product()).unwrap();
        for &p in &[1.5, 2.0, 3.0] {
            let a = morrey_norm(&f, p, mu, &BallParams::default()).unwrap().value;
            let b = morrey_norm(&g, p, mu, &BallParams::default()).unwrap().value;
            let want = 2f64.powf(-(n as f64 - mu) / p) * a;
            assert!((b - want).abs() <= 0.01 * want, "n {n}, mu {mu}, p {p}: {b} vs {want}");
        }
    }
}

#[test]
fn indicator_norm_is_ball_volume() {
    let g = BoxGrid::cube(2, 64, 2.0).unwrap();
    let f = GridFunction::from_fn(g.clone(), |x| if x[0] * x[0] + x[1] * x[1] <= 1.0 { 1.0 } else { 0.0 }).unwrap();
    let v = morrey_norm(&f, 1.0, 0.0, &BallParams::default()).unwrap().value;
    let h = g.spacing(0);
    assert!((v - PI).abs() <= 2.0 * PI * 2.0 * h);
}

#[test]
fn holder_sweep() {
    let mut r = common::rng(42);
    let g = BoxGrid::cube(2, 16, 1.0).unwrap();
    for i in 0..100 {
        let f = common::smooth_field(&g, 6, 1000 + i);
        let h = common::smooth_field(&g, 6, 5000 + i);
        // 1/p1 + 1/p2 <= 1 keeps the product exponent p3 >= 1
        let p1 = r.random_range(2.0..6.0);
        let p2 = r.random_range(p1 / (p1 - 1.0)..8.0);
        let mu1 = r.random_range(0.0..1.9);
        let mu2 = r.random_range(0.0..1.9);
        let c = check_holder(&f, &h, (p1, mu1), (p2, mu2), &BallParams::default()).unwrap();
        assert!(c.pass, "pair {i}: lhs {} rhs {}", c.lhs, c.rhs);
    }
}

#[test]
fn holder_rejects_small_product_exponent() {
    let g = BoxGrid::cube(1, 16, 1.0).unwrap();
    let f = common::smooth_field(&g, 3, 1);
    assert!(check_holder(&f, &f, (1.5, 0.0), (1.5, 0.0), &BallParams::default()).is_err());
    assert!(check_holder(&f, &f, (2.0, 0.0), (f64::INFINITY, 0.0), &BallParams::default()).is_err());
}

#[test]
fn blocks_recover_mean_free_field() {
    let g = BoxGrid::cube(2, 32, 2.0).unwrap();
    let f = common::smooth_field(&g, 8, 9);
    let part = LPPartition::new(&g, None).unwrap();
    assert!(part.partition_residue() <= 1e-10);
    let (j0, j1) = part.range();
    let mut sum = GridFunction::zeros(g.clone());
    for j in j0..=j1 {
        sum = sum.axpy(1.0, &lp_block(&f, j, &part).unwrap()).unwrap();
    }
    let mean = f.mean();
    let mean_free = f.map(|v| v - mean);
    assert!(sum.max_abs_diff(&mean_free).unwrap() <= 1e-8);
}

#[test]
fn besov_orderings_and_range_stability() {
    let g = BoxGrid::cube(1, 256, 8.0).unwrap();
    let gauss = GridFunction::from_fn(g.clone(), |x| (-x[0] * x[0]).exp()).unwrap();
    let mean = gauss.mean();
    let f = gauss.map(|v| v - mean);
    let balls = BallParams::default();
    let part = LPPartition::new(&g, None).unwrap();
    let sup = besov_morrey_norm(&f, -0.3, 2.0, 0.5, None, &part, &balls).unwrap();
    let l1 = besov_morrey_norm(&f, -0.3, 2.0, 0.5, Some(1.0), &part, &balls).unwrap();
    assert!(l1.value >= sup.value);
    assert!(sup.warning.is_none(), "{:?}", sup.warning);
    let (j0, j1) = part.range();
    let wide = LPPartition::new(&g, Some((j0 - 2, j1 + 2))).unwrap();
    let sup_wide = besov_morrey_norm(&f, -0.3, 2.0, 0.5, None, &wide, &balls).unwrap();
    assert!((sup_wide.value - sup.value).abs() <= 0.02 * sup.value);
}

#[test]
fn single_block_field() {
    // cos(k x) with k = 2^{j0}: one block carries it with weight phi(1) = 1
    let g = BoxGrid::cube(1, 128, PI).unwrap();
    let f = GridFunction::from_fn(g.clone(), |x| (4.0 * x[0]).cos()).unwrap();
    let part = LPPartition::new(&g, None).unwrap();
    let balls = BallParams::default();
    let rep = besov_morrey_norm(&f, 0.5, 2.0, 0.0, None, &part, &balls).unwrap();
    let nonzero: Vec<_> = rep.blocks.iter().filter(|b| b.1 > 1e-12).collect();
    assert_eq!(nonzero.len(), 1);
    assert_eq!(nonzero[0].0, 2);
    let want = 2f64.powf(2.0 * 0.5) * f.lp_norm(2.0);
    assert!((rep.value - want).abs() <= 1e-10 * want);
}

#[test]
fn sobolev_single_mode_scaling() {
    let g = BoxGrid::cube(1, 64, PI).unwrap();
    let f = GridFunction::from_fn(g, |x| (3.0 * x[0]).sin()).unwrap();
    let balls = BallParams::default();
    let base = morrey_norm(&f, 2.0, 0.3, &balls).unwrap().value;
    for &s in &[-1.0, 0.5, 1.5] {
        let v = sobolev_morrey_norm(&f, s, 2.0, 0.3, &balls).unwrap().value;
        assert!((v - 3f64.powf(s) * base).abs() <= 1e-10 * v);
    }
    let shifted = f.map(|v| v + 1.0);
    assert!(sobolev_morrey_norm(&shifted, -0.5, 2.0, 0.3, &balls).is_err());
}
