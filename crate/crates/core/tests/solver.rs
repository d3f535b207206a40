//! Mild-solution solvers against independent oracles and structural
//! properties (causality, linear consistency, Picard/march agreement).

mod common;

use std::f64::consts::PI;

use fhw_core::grid::{BoxGrid, GridFunction};
use fhw_core::propagator::PropagatorContext;
use fhw_core::solver::{MildSolver, ModelParams, TimeGrid};
use fhw_core::FhwError;

/// Worst relative deviation of the closed-multiplier Duhamel term from the
/// nested double integral for forcing `g(t) cos(m x)` on a 1D grid.
fn duhamel_deviation(alpha: f64, steps: usize) -> f64 {
    let grid = BoxGrid::cube(1, 16, PI).unwrap();
    let model = ModelParams::new(alpha, 3.0, 1).unwrap();
    let tg = TimeGrid::new(1.0, steps).unwrap();
    let solver = MildSolver::new(model, grid.clone(), tg).unwrap();
    let m = 2.0;
    let g: Vec<f64> = (0..=steps).map(|k| 1.0 + (3.0 * tg.time(k)).sin()).collect();
    let history: Vec<GridFunction> = g
        .iter()
        .map(|&a| GridFunction::from_fn(grid.clone(), |x| a * (m * x[0]).cos()).unwrap())
        .collect();
    let oracle = common::nested_duhamel(alpha, model.nu, m * m, tg.dt(), &g);
    let scale = oracle.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let probe = grid.ravel(&[8]); // x = 0, cos(m x) = 1
    (1..=steps)
        .map(|k| {
            let b = solver.duhamel_term(&history, k).unwrap();
            (b.values()[probe] - oracle[k]).abs() / scale
        })
        .fold(0.0, f64::max)
}

#[test]
fn duhamel_matches_nested_oracle() {
    for &alpha in &[1.25, 1.5, 1.75] {
        let dev = duhamel_deviation(alpha, 16);
        assert!(dev <= 1e-3, "alpha {alpha}: {dev:e}");
    }
}

#[test]
fn duhamel_term_rejects_short_history() {
    let grid = BoxGrid::cube(1, 8, 1.0).unwrap();
    let solver = MildSolver::new(ModelParams::new(1.5, 3.0, 1).unwrap(), grid.clone(), TimeGrid::new(1.0, 8).unwrap()).unwrap();
    let h = vec![GridFunction::zeros(grid); 3];
    assert!(matches!(solver.duhamel_term(&h, 5), Err(FhwError::Precondition(_))));
    assert_eq!(solver.duhamel_term(&h, 2).unwrap().sup_norm(), 0.0);
}

fn heat_setup(gamma: i8) -> (GridFunction, ModelParams, TimeGrid) {
    let grid = BoxGrid::cube(1, 32, PI).unwrap();
    let u0 = GridFunction::from_fn(grid, |x| 0.1 * x[0].cos() + 0.075 * (2.0 * x[0]).sin() + 0.025).unwrap();
    (u0, ModelParams::new(1.0, 3.0, gamma).unwrap(), TimeGrid::new(1.0, 64).unwrap())
}

/// `max_k |march(t_k) - etdrk4(t_k)|_inf` for the heat reduction.
fn heat_deviation(gamma: i8) -> f64 {
    let (u0, model, tg) = heat_setup(gamma);
    let traj = MildSolver::new(model, u0.grid().clone(), tg).unwrap().march(&u0, 2).unwrap();
    let oracle = common::heat_etdrk4(&u0, &model, tg.dt(), tg.steps(), 8);
    traj.nodes()
        .iter()
        .zip(&oracle)
        .map(|(a, b)| a.max_abs_diff(b).unwrap())
        .fold(0.0, f64::max)
}

#[test]
fn heat_reduction_linear() {
    let d = heat_deviation(0);
    assert!(d <= 1e-6, "{d:e}");
}

#[test]
fn heat_reduction_cubic() {
    let d = heat_deviation(1);
    assert!(d <= 1e-6, "{d:e}");
}

#[test]
fn linear_trajectory_equals_propagator() {
    let grid = BoxGrid::cube(2, 16, 2.0).unwrap();
    let u0 = common::smooth_field(&grid, 5, 3);
    let tg = TimeGrid::new(0.5, 10).unwrap();
    let model = ModelParams::new(1.5, 3.0, 0).unwrap();
    let traj = MildSolver::new(model, grid.clone(), tg).unwrap().march(&u0, 1).unwrap();
    let ctx = PropagatorContext::new(1.5, 1.0, grid).unwrap();
    for k in 0..=tg.steps() {
        let want = ctx.linear_propagate(&u0, tg.time(k)).unwrap();
        assert!(traj.node(k).max_abs_diff(&want).unwrap() <= 1e-12);
    }
}

#[test]
fn zero_data_gives_zero() {
    let grid = BoxGrid::cube(1, 16, 1.0).unwrap();
    let tg = TimeGrid::new(1.0, 8).unwrap();
    let traj = MildSolver::new(ModelParams::new(1.5, 3.0, 1).unwrap(), grid.clone(), tg)
        .unwrap()
        .march(&GridFunction::zeros(grid), 2)
        .unwrap();
    assert_eq!(traj.sup_norm(), 0.0);
}

#[test]
fn truncated_march_is_bitwise_prefix() {
    let grid = BoxGrid::cube(1, 32, 2.0).unwrap();
    let u0 = common::smooth_field(&grid, 4, 11).scaled(0.5);
    let model = ModelParams::new(1.5, 3.0, 1).unwrap();
    let full_grid = TimeGrid::new(1.0, 24).unwrap();
    let full = MildSolver::new(model, grid.clone(), full_grid).unwrap().march(&u0, 2).unwrap();
    let short = MildSolver::new(model, grid, full_grid.truncated(10).unwrap()).unwrap().march(&u0, 2).unwrap();
    for k in 0..=10 {
        assert_eq!(full.node(k).values(), short.node(k).values(), "node {k}");
    }
}

#[test]
fn march_agrees_with_picard_fixed_point() {
    let grid = BoxGrid::cube(1, 32, 2.0).unwrap();
    let u0 = common::smooth_field(&grid, 4, 5).scaled(0.3);
    let model = ModelParams::new(1.5, 3.0, 1).unwrap();
    let tg = TimeGrid::new(1.0, 16).unwrap();
    let solver = MildSolver::new(model, grid, tg).unwrap();
    let tol = 1e-10;
    let (picard, rep) = solver.picard(&u0, 60, tol).unwrap();
    assert!(rep.converged);
    let march = solver.march(&u0, 8).unwrap();
    let gap = picard.max_diff(&march).unwrap();
    assert!(gap <= 10.0 * tol * picard.sup_norm(), "{gap:e}");
}

#[test]
fn picard_linear_is_one_iterate() {
    let grid = BoxGrid::cube(1, 16, 1.0).unwrap();
    let u0 = common::smooth_field(&grid, 3, 1);
    let tg = TimeGrid::new(1.0, 8).unwrap();
    let (_, rep) = MildSolver::new(ModelParams::new(1.25, 3.0, 0).unwrap(), grid, tg)
        .unwrap()
        .picard(&u0, 5, 1e-12)
        .unwrap();
    assert_eq!(rep.iterate_count, 1);
    assert!(rep.converged);
}

#[test]
fn large_focusing_data_blows_up() {
    let grid = BoxGrid::cube(1, 32, 2.0).unwrap();
    let u0 = GridFunction::from_fn(grid.clone(), |x| 50.0 * (-x[0] * x[0] * 4.0).exp()).unwrap();
    let model = ModelParams::new(1.5, 3.0, 1).unwrap();
    let tg = TimeGrid::new(1.0, 32).unwrap();
    let err = MildSolver::new(model, grid, tg).unwrap().march(&u0, 2).unwrap_err();
    assert!(matches!(err, FhwError::BlowUp { .. }), "{err}");
}

#[test]
fn time_refinement_order() {
    // smooth data, dt halved twice: the observed order of the change exceeds 1.5
    let grid = BoxGrid::cube(1, 16, PI).unwrap();
    let u0 = GridFunction::from_fn(grid.clone(), |x| 0.5 * x[0].cos() + 0.2).unwrap();
    let model = ModelParams::new(1.5, 3.0, 1).unwrap();
    let run = |steps: usize| {
        let tg = TimeGrid::new(1.0, steps).unwrap();
        let t = MildSolver::new(model, grid.clone(), tg).unwrap().march(&u0, 4).unwrap();
        t.node(steps).clone()
    };
    let (a, b, c) = (run(16), run(32), run(64));
    let d1 = a.max_abs_diff(&b).unwrap();
    let d2 = b.max_abs_diff(&c).unwrap();
    let order = (d1 / d2).log2();
    assert!(order >= 1.5, "observed order {order}");
}

