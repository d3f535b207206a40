//! The diffusion-wave family `L_a(t)` (symbol `E_a(-t^a |xi|^2)`), its 1D
//! kernel, and exact product-integration weights for the Duhamel term.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::{domain, FhwError, Result};
use crate::grid::{self, BoxGrid, GridFunction, SpectralField};
use crate::special::{rgamma, MLParams, MittagLeffler};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Distinct `|xi|^2` values of a lattice and the map from modes to them.
#[derive(Debug, Clone)]
pub struct ModeTable {
    pub distinct: Vec<f64>,
    pub index: Vec<u32>,
}

impl ModeTable {
    pub fn new(grid: &BoxGrid) -> Self {
        let xi_sq = grid.xi_sq();
        let mut distinct: Vec<f64> = xi_sq.clone();
        distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        distinct.dedup();
        let lookup: HashMap<u64, u32> = distinct
            .iter()
            .enumerate()
            .map(|(i, v)| (v.to_bits(), i as u32))
            .collect();
        let index = xi_sq.iter().map(|v| lookup[&v.to_bits()]).collect();
        Self { distinct, index }
    }

    /// Expands per-distinct values to a full lattice table.
    pub fn expand(&self, per_distinct: &[f64]) -> Vec<f64> {
        self.index.iter().map(|&i| per_distinct[i as usize]).collect()
    }
}

/// Maps `f` over values; parallel when the `parallel` feature is on.
/// Each output depends only on its own input, so results do not depend on
/// the schedule.
pub(crate) fn map_values(values: &[f64], f: impl Fn(f64) -> f64 + Sync + Send) -> Vec<f64> {
    #[cfg(feature = "parallel")]
    {
        values.par_iter().map(|&v| f(v)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        values.iter().map(|&v| f(v)).collect()
    }
}

/// Propagator for one `(alpha, nu, grid)` with per-`t` multiplier tables.
#[derive(Debug)]
pub struct PropagatorContext {
    alpha: f64,
    nu: f64,
    grid: BoxGrid,
    modes: ModeTable,
    e_alpha: MittagLeffler,
    cache: Mutex<HashMap<u64, Arc<Vec<f64>>>>,
}

impl PropagatorContext {
    pub fn new(alpha: f64, nu: f64, grid: BoxGrid) -> Result<Self> {
        if !(1.0..2.0).contains(&alpha) {
            return domain(format!("propagator requires 1 <= alpha < 2, got {alpha}"));
        }
        if !(nu > 0.0) || !nu.is_finite() {
            return domain(format!("nu must be positive, got {nu}"));
        }
        let modes = ModeTable::new(&grid);
        let e_alpha = MittagLeffler::new(MLParams::new(alpha)?, 1.0)?;
        Ok(Self {
            alpha,
            nu,
            grid,
            modes,
            e_alpha,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn modes(&self) -> &ModeTable {
        &self.modes
    }

    /// `E_a(-t^a |xi|^2)` on the lattice (FFT order), cached by exact `t`.
    pub fn linear_table(&self, t: f64) -> Result<Arc<Vec<f64>>> {
        if !(t >= 0.0) || !t.is_finite() {
            return domain(format!("time must be finite and nonnegative, got {t}"));
        }
        if let Some(hit) = self.cache.lock().expect("cache poisoned").get(&t.to_bits()) {
            return Ok(hit.clone());
        }
        let ta = t.powf(self.alpha);
        let per = map_values(&self.modes.distinct, |q| self.e_alpha.eval(ta * q));
        if let Some(i) = per.iter().position(|v| !v.is_finite()) {
            return Err(FhwError::Propagation {
                xi: vec![self.modes.distinct[i].sqrt()],
                value: per[i],
            });
        }
        let table = Arc::new(self.modes.expand(&per));
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(t.to_bits(), table.clone());
        Ok(table)
    }

    pub fn propagate_spectral(&self, field: &SpectralField, t: f64) -> Result<SpectralField> {
        self.check_grid(field.grid())?;
        if t == 0.0 {
            return Ok(field.clone());
        }
        let table = self.linear_table(t)?;
        Ok(grid::apply_table(field, &table))
    }

    /// `L_a(t) u0`.
    pub fn linear_propagate(&self, u0: &GridFunction, t: f64) -> Result<GridFunction> {
        self.check_grid(u0.grid())?;
        if t == 0.0 {
            return Ok(u0.clone());
        }
        grid::inverse(&self.propagate_spectral(&grid::forward(u0), t)?)
    }

    fn check_grid(&self, g: &BoxGrid) -> Result<()> {
        if *g != self.grid {
            return Err(FhwError::Precondition("field grid differs from the propagator grid".into()));
        }
        Ok(())
    }

    /// Discrete pairings `|<L_a(t) u0 - u0, v>|` for each `t`.
    pub fn smalltime_pairing_check(&self, u0: &GridFunction, v: &GridFunction, ts: &[f64]) -> Result<Vec<f64>> {
        u0.check_same_grid(v)?;
        ts.iter()
            .map(|&t| {
                if !(t > 0.0) {
                    return domain("pairing times must be positive");
                }
                let diff = self.linear_propagate(u0, t)?.sub(u0)?;
                Ok(diff.pairing(v)?.abs())
            })
            .collect()
    }
}

/// `nu w^{a-1} E_{a,a}(-w^a |xi|^2)`: forcing response of one mode after lag `w`.
pub fn duhamel_multiplier(alpha: f64, nu: f64, dt_lag: f64, xi_sq: f64) -> Result<f64> {
    if !(dt_lag > 0.0) || !dt_lag.is_finite() {
        return domain(format!("lag must be positive, got {dt_lag}"));
    }
    if !(1.0..2.0).contains(&alpha) {
        return domain(format!("alpha must lie in [1, 2), got {alpha}"));
    }
    if !(xi_sq >= 0.0) {
        return domain("|xi|^2 must be nonnegative");
    }
    let ml = MittagLeffler::new(MLParams::new(alpha)?, alpha)?;
    Ok(nu * dt_lag.powf(alpha - 1.0) * ml.eval(dt_lag.powf(alpha) * xi_sq))
}

/// Product-trapezoid weights for `int_0^{t_k} g(t_k - tau) f(tau) dtau` with
/// `g(w) = nu w^{a-1} E_{a,a}(-lambda w^a)` and `f` piecewise linear on a
/// uniform grid.
///
/// With `I0(s) = nu s^a E_{a,a+1}(-lambda s^a)` (the antiderivative of `g`) and
/// `I1(s) = nu s^{a+1}(E_{a,a+1} - E_{a,a+2})` (that of `w g(w)`), the piece
/// at lag `m` (`w` in `[m dt, (m+1) dt]`) integrates exactly to
/// `older[m] f_j + newer[m] f_{j+1}`, `j = k - m - 1`.
#[derive(Debug, Clone)]
pub struct DuhamelWeights {
    dt: f64,
    steps: usize,
    n_distinct: usize,
    older: Vec<f64>,
    newer: Vec<f64>,
}

impl DuhamelWeights {
    pub fn new(ctx: &PropagatorContext, dt: f64, steps: usize) -> Result<Self> {
        Self::for_modes(ctx.alpha, ctx.nu, &ctx.modes.distinct, dt, steps)
    }

    /// Weights for an explicit list of `|xi|^2` values.
    pub fn for_modes(alpha: f64, nu: f64, lambdas: &[f64], dt: f64, steps: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return domain(format!("time step must be positive, got {dt}"));
        }
        if !(1.0..2.0).contains(&alpha) {
            return domain(format!("alpha must lie in [1, 2), got {alpha}"));
        }
        let params = MLParams::new(alpha)?;
        let m1 = MittagLeffler::new(params, alpha + 1.0)?;
        let m2 = MittagLeffler::new(params, alpha + 2.0)?;
        let pow: Vec<f64> = (0..=steps).map(|i| (i as f64 * dt).powf(alpha)).collect();
        let columns: Vec<(Vec<f64>, Vec<f64>)> = {
            let column = |lambda: f64| {
                let mut older = Vec::with_capacity(steps);
                let mut newer = Vec::with_capacity(steps);
                let mut prev = (m1.eval(0.0), m2.eval(0.0));
                for m in 0..steps {
                    let b = pow[m + 1];
                    let cur = (m1.eval(lambda * b), m2.eval(lambda * b));
                    let a = pow[m];
                    let mf = m as f64;
                    older.push(nu * (b * cur.0 - (mf + 1.0) * b * cur.1 + mf * a * prev.1));
                    newer.push(nu * ((mf + 1.0) * b * cur.1 - a * prev.0 - mf * a * prev.1));
                    prev = cur;
                }
                (older, newer)
            };
            #[cfg(feature = "parallel")]
            {
                lambdas.par_iter().map(|&l| column(l)).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                lambdas.iter().map(|&l| column(l)).collect()
            }
        };
        let nd = lambdas.len();
        let mut older = vec![0.0; nd * steps];
        let mut newer = vec![0.0; nd * steps];
        for (d, (o, n)) in columns.iter().enumerate() {
            for m in 0..steps {
                older[m * nd + d] = o[m];
                newer[m * nd + d] = n[m];
            }
        }
        if older.iter().chain(&newer).any(|v| !v.is_finite()) {
            return Err(FhwError::Propagation {
                xi: vec![],
                value: f64::NAN,
            });
        }
        Ok(Self {
            dt,
            steps,
            n_distinct: nd,
            older,
            newer,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Weight of the older endpoint of the piece at lag `m`, per distinct mode.
    pub fn older(&self, m: usize) -> &[f64] {
        &self.older[m * self.n_distinct..(m + 1) * self.n_distinct]
    }

    /// Weight of the newer endpoint of the piece at lag `m`.
    pub fn newer(&self, m: usize) -> &[f64] {
        &self.newer[m * self.n_distinct..(m + 1) * self.n_distinct]
    }
}

/// Samples of the 1D kernel `k_a(t, x)` with its estimated truncation error.
#[derive(Debug, Clone)]
pub struct KernelSamples {
    pub values: Vec<f64>,
    /// Bound on the neglected frequency tail.
    pub tail_error: f64,
}

/// `k_a(t, x) = (1/2pi) int e^{i x xi} E_a(-t^a xi^2) dxi` in one dimension
/// (unit mass).
///
/// Evaluated at `t = 1` after the similarity change `x -> t^{-a/2} x`. The
/// algebraic tail `c1/(xi^2+1) + c2/(xi^2+1)^2` of the symbol is subtracted
/// and transformed analytically; the smooth remainder is integrated by the
/// trapezoid rule with spacing `pi / L_aux`, `L_aux` four times the sample
/// extent, so periodic images sit far in the exponentially decaying tail.
pub fn kernel_sample_1d(alpha: f64, t: f64, xs: &[f64]) -> Result<KernelSamples> {
    if !(1.0..2.0).contains(&alpha) {
        return domain(format!("alpha must lie in [1, 2), got {alpha}"));
    }
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("kernel time must be positive, got {t}"));
    }
    let scale = t.powf(-0.5 * alpha);
    let ys: Vec<f64> = xs.iter().map(|x| x * scale).collect();
    let extent = ys.iter().fold(1.0f64, |m, y| m.max(y.abs()));
    let l_aux = 4.0 * extent.max(10.0);
    let dxi = PI / l_aux;

    let c1 = rgamma(1.0 - alpha);
    let c2 = c1 - rgamma(1.0 - 2.0 * alpha);
    let cos_pole = (PI / alpha).cos();
    let xi_pole = (39.0 / cos_pole.abs()).powf(0.5 * alpha);
    let xi_max = xi_pole.max(200.0);
    let count = (xi_max / dxi).ceil() as usize;

    let ml = MittagLeffler::new(MLParams::new(alpha)?, 1.0)?;
    let nodes: Vec<f64> = (0..=count).map(|j| j as f64 * dxi).collect();
    let remainder = map_values(&nodes, |xi| {
        let q = xi * xi;
        let d = 1.0 / (q + 1.0);
        ml.eval(q) - c1 * d - c2 * d * d
    });
    // neglected tail: remainder decays like xi^{-6}
    let tail_error = remainder[count].abs() * xi_max / 5.0 / PI;

    let values = ys
        .iter()
        .map(|&y| {
            let step = Complex64::from_polar(1.0, dxi * y);
            let mut rot = Complex64::new(1.0, 0.0);
            let mut acc = 0.5 * remainder[0];
            for (j, r) in remainder.iter().enumerate().skip(1) {
                if j % 512 == 0 {
                    rot = Complex64::from_polar(1.0, j as f64 * dxi * y);
                } else {
                    rot *= step;
                }
                acc += r * rot.re;
            }
            let smooth = acc * dxi / PI;
            let ay = y.abs();
            let e = (-ay).exp();
            let analytic = c1 * e / 2.0 + c2 * (1.0 + ay) * e / 4.0;
            scale * (smooth + analytic)
        })
        .collect();
    Ok(KernelSamples {
        values,
        tail_error: tail_error * scale,
    })
}

/// Total masses of the kernel under three normalizations: the unit-mass
/// inverse transform, the transform without the `1/(2pi)` factor, and `a`
/// times the unit-mass kernel. Computed by trapezoid quadrature with one
/// Richardson step over `[-half_width, half_width]` at `t = 1`.
pub fn kernel_mass_conventions(alpha: f64, half_width: f64, points: usize) -> Result<[f64; 3]> {
    let mass = |n: usize| -> Result<f64> {
        let h = 2.0 * half_width / n as f64;
        let xs: Vec<f64> = (0..=n).map(|i| -half_width + i as f64 * h).collect();
        let k = kernel_sample_1d(alpha, 1.0, &xs)?.values;
        let inner: f64 = k[1..n].iter().sum();
        Ok(h * (inner + 0.5 * (k[0] + k[n])))
    };
    let coarse = mass(points)?;
    let fine = mass(2 * points)?;
    let unit = fine + (fine - coarse) / 3.0;
    Ok([unit, 2.0 * PI * unit, alpha * unit])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{gamma, ml_two};

    #[test]
    fn heat_case_matches_exponential() {
        let g = BoxGrid::cube(1, 32, PI).unwrap();
        let ctx = PropagatorContext::new(1.0, 1.0, g.clone()).unwrap();
        let u0 = GridFunction::from_fn(g.clone(), |x| x[0].sin() + 0.5 * (3.0 * x[0]).cos()).unwrap();
        let t = 0.37;
        let u = ctx.linear_propagate(&u0, t).unwrap();
        let want = GridFunction::from_fn(g, |x| {
            (-t).exp() * x[0].sin() + 0.5 * (-9.0 * t).exp() * (3.0 * x[0]).cos()
        })
        .unwrap();
        assert!(u.max_abs_diff(&want).unwrap() < 1e-12);
        assert_eq!(ctx.linear_propagate(&u0, 0.0).unwrap(), u0);
    }

    #[test]
    fn rejects_wave_endpoint() {
        let g = BoxGrid::cube(1, 16, 1.0).unwrap();
        assert!(PropagatorContext::new(2.0, 1.0, g.clone()).is_err());
        assert!(PropagatorContext::new(1.5, 0.0, g).is_err());
    }

    #[test]
    fn table_cache_is_reused() {
        let g = BoxGrid::cube(2, 16, 2.0).unwrap();
        let ctx = PropagatorContext::new(1.5, 1.0, g).unwrap();
        let a = ctx.linear_table(0.25).unwrap();
        let b = ctx.linear_table(0.25).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert!(a.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn duhamel_multiplier_cases() {
        let v = duhamel_multiplier(1.0, 2.0, 0.5, 3.0).unwrap();
        assert!((v - 2.0 * (-1.5f64).exp()).abs() < 1e-15);
        let v = duhamel_multiplier(1.5, 1.0, 0.25, 0.0).unwrap();
        assert!((v - 0.5 / gamma(1.5).unwrap()).abs() < 1e-14);
        assert!(duhamel_multiplier(1.5, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn weights_telescope_to_closed_form() {
        // sum of all weights up to step k equals nu t_k^a E_{a,a+1}(-lambda t_k^a)
        for &alpha in &[1.0, 1.3, 1.8] {
            let lambdas = [0.0, 0.7, 40.0];
            let w = DuhamelWeights::for_modes(alpha, 1.5, &lambdas, 0.1, 12).unwrap();
            for (d, &lam) in lambdas.iter().enumerate() {
                let total: f64 = (0..12).map(|m| w.older(m)[d] + w.newer(m)[d]).sum();
                let t: f64 = 1.2;
                let ta = t.powf(alpha);
                let want = 1.5 * ta * ml_two(alpha, alpha + 1.0, lam * ta).unwrap();
                assert!((total - want).abs() < 1e-12 * want.abs().max(1e-3), "alpha={alpha} lam={lam}");
            }
        }
    }

    #[test]
    fn heat_weights_are_trapezoid_at_zero_mode() {
        let w = DuhamelWeights::for_modes(1.0, 1.0, &[0.0], 0.2, 4).unwrap();
        for m in 0..4 {
            assert!((w.older(m)[0] - 0.1).abs() < 1e-15);
            assert!((w.newer(m)[0] - 0.1).abs() < 1e-15);
        }
    }

    #[test]
    fn heat_kernel_is_gaussian() {
        let xs: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.25).collect();
        let t = 0.8;
        let k = kernel_sample_1d(1.0, t, &xs).unwrap();
        for (x, v) in xs.iter().zip(&k.values) {
            let want = (4.0 * PI * t).powf(-0.5) * (-x * x / (4.0 * t)).exp();
            assert!((v - want).abs() < 1e-12, "x={x}: {v} vs {want}");
        }
    }
}
