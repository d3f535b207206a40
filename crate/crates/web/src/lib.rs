//! Browser bindings for the demo page in `www/`.
//!
//! Every export returns a flat `Float64Array`; errors surface as JS exceptions
//! carrying the library message.

use fhw_core::grid::{BoxGrid, GridFunction};
use fhw_core::propagator::kernel_sample_1d;
use fhw_core::solver::{MildSolver, ModelParams, TimeGrid};
use fhw_core::special::ml_one;
use wasm_bindgen::prelude::*;

fn js(e: fhw_core::FhwError) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn ml_curve_impl(alpha: f64, x_max: f64, points: usize) -> fhw_core::Result<Vec<f64>> {
    linspace(0.0, x_max, points).into_iter().map(|x| ml_one(alpha, x)).collect()
}

pub fn kernel_profile_impl(alpha: f64, t: f64, half_width: f64, points: usize) -> fhw_core::Result<Vec<f64>> {
    Ok(kernel_sample_1d(alpha, t, &linspace(-half_width, half_width, points))?.values)
}

/// Solution nodes of the 1D problem with Gaussian data, flattened node by node.
#[allow(clippy::too_many_arguments)]
pub fn solve_1d_impl(
    alpha: f64,
    rho: f64,
    gamma_sign: i8,
    amplitude: f64,
    size: usize,
    half_length: f64,
    horizon: f64,
    steps: usize,
) -> fhw_core::Result<Vec<f64>> {
    let grid = BoxGrid::cube(1, size, half_length)?;
    let u0 = GridFunction::from_fn(grid.clone(), |x| amplitude * (-x[0] * x[0]).exp())?;
    let model = ModelParams::new(alpha, rho, gamma_sign)?;
    let traj = MildSolver::new(model, grid, TimeGrid::new(horizon, steps)?)?.march(&u0, 2)?;
    Ok(traj.nodes().iter().flat_map(|u| u.values().iter().copied()).collect())
}

/// `E_alpha(-x)` on `points` equispaced samples of `[0, x_max]`.
#[wasm_bindgen]
pub fn ml_curve(alpha: f64, x_max: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    ml_curve_impl(alpha, x_max, points).map_err(js)
}

/// Fundamental solution in 1D at time `t` on `[-half_width, half_width]`.
#[wasm_bindgen]
pub fn kernel_profile(alpha: f64, t: f64, half_width: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    kernel_profile_impl(alpha, t, half_width, points).map_err(js)
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn solve_1d(
    alpha: f64,
    rho: f64,
    gamma_sign: i8,
    amplitude: f64,
    size: usize,
    half_length: f64,
    horizon: f64,
    steps: usize,
) -> Result<Vec<f64>, JsValue> {
    solve_1d_impl(alpha, rho, gamma_sign, amplitude, size, half_length, horizon, steps).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_endpoints() {
        let c = ml_curve_impl(1.0, 2.0, 3).unwrap();
        assert_eq!(c, vec![1.0, (-1.0f64).exp(), (-2.0f64).exp()]);
    }

    #[test]
    fn kernel_is_symmetric() {
        let k = kernel_profile_impl(1.5, 1.0, 10.0, 201).unwrap();
        for i in 0..100 {
            assert!((k[i] - k[200 - i]).abs() < 1e-14);
        }
    }

    #[test]
    fn solve_shape_and_errors() {
        let v = solve_1d_impl(1.5, 3.0, 1, 0.5, 64, 8.0, 1.0, 16).unwrap();
        assert_eq!(v.len(), 17 * 64);
        assert!(solve_1d_impl(2.5, 3.0, 1, 0.5, 64, 8.0, 1.0, 16).is_err());
    }
}
