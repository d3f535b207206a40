//! Mild solutions `u(t) = L_a(t) u0 + B_a(u)(t)` on a uniform time grid.
//!
//! The Duhamel term is evaluated per Fourier mode with the exact product
//! weights of [`DuhamelWeights`]: the forcing `f(u)` is interpolated linearly
//! between nodes and the weight `nu w^{a-1} E_{a,a}(-w^a |xi|^2)` is integrated
//! exactly against each piece. Because the newest node enters with a nonzero
//! weight, each time level is an implicit equation; [`picard_solve`] iterates
//! over whole trajectories and [`march_solve`] resolves one level at a time.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, FhwError, Result};
use crate::grid::{self, BoxGrid, GridFunction, SpectralField};
use crate::norms::{xqp_norm, XNormSpec};
use crate::propagator::{DuhamelWeights, PropagatorContext};

/// Form of the power nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `gamma |u|^{rho-1} u`
    #[default]
    Signed,
    /// `gamma |u|^rho`
    Unsigned,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub rho: f64,
    /// Sign of the nonlinearity: +1, -1, or 0 for the linear problem.
    pub gamma_sign: i8,
    pub nu: f64,
    pub form: Nonlinearity,
    /// Two-thirds dealiasing for integer `rho`.
    pub dealias: bool,
}

impl ModelParams {
    pub fn new(alpha: f64, rho: f64, gamma_sign: i8) -> Result<Self> {
        let m = Self {
            alpha,
            rho,
            gamma_sign,
            nu: 1.0,
            form: Nonlinearity::Signed,
            dealias: true,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1.0..2.0).contains(&self.alpha) {
            return domain(format!("alpha must lie in [1, 2), got {}", self.alpha));
        }
        if !(self.rho > 1.0) || !self.rho.is_finite() {
            return domain(format!("rho must exceed 1, got {}", self.rho));
        }
        if !matches!(self.gamma_sign, -1..=1) {
            return domain(format!("gamma sign must be -1, 0 or 1, got {}", self.gamma_sign));
        }
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return domain(format!("nu must be positive, got {}", self.nu));
        }
        Ok(())
    }

    pub fn is_linear(&self) -> bool {
        self.gamma_sign == 0
    }

    pub fn integer_rho(&self) -> bool {
        self.rho.fract() == 0.0
    }

    fn uses_dealiasing(&self) -> bool {
        self.dealias && self.integer_rho()
    }

    /// Pointwise `f(a)`.
    pub fn f(&self, a: f64) -> f64 {
        let g = self.gamma_sign as f64;
        if a == 0.0 || g == 0.0 {
            return 0.0;
        }
        let m = a.abs();
        let mag = if self.integer_rho() && self.rho <= 16.0 {
            m.powi(self.rho as i32)
        } else {
            m.powf(self.rho)
        };
        match self.form {
            Nonlinearity::Signed => g * mag * a.signum(),
            Nonlinearity::Unsigned => g * mag,
        }
    }
}

/// Uniform nodes `t_k = k dt`, `k = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return domain(format!("horizon must be positive, got {horizon}"));
        }
        Self::from_step(horizon / steps.max(1) as f64, steps)
    }

    pub fn from_step(dt: f64, steps: usize) -> Result<Self> {
        if steps < 8 {
            return domain(format!("at least 8 time steps are required, got {steps}"));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return domain(format!("time step must be positive, got {dt}"));
        }
        Ok(Self { dt, steps })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.time(self.steps)
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// The first `steps` steps of this grid (same nodes).
    pub fn truncated(&self, steps: usize) -> Result<Self> {
        if steps > self.steps {
            return Err(FhwError::Precondition(format!(
                "cannot truncate {} steps to {steps}",
                self.steps
            )));
        }
        Self::from_step(self.dt, steps)
    }
}

/// Solution samples at every node; node 0 is the initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    tgrid: TimeGrid,
    nodes: Vec<GridFunction>,
}

impl Trajectory {
    pub fn new(tgrid: TimeGrid, nodes: Vec<GridFunction>) -> Result<Self> {
        if nodes.len() != tgrid.steps() + 1 {
            return Err(FhwError::Precondition(format!(
                "trajectory needs {} nodes, got {}",
                tgrid.steps() + 1,
                nodes.len()
            )));
        }
        for n in &nodes[1..] {
            nodes[0].check_same_grid(n)?;
        }
        Ok(Self { tgrid, nodes })
    }

    pub fn tgrid(&self) -> &TimeGrid {
        &self.tgrid
    }

    pub fn grid(&self) -> &BoxGrid {
        self.nodes[0].grid()
    }

    pub fn nodes(&self) -> &[GridFunction] {
        &self.nodes
    }

    pub fn node(&self, k: usize) -> &GridFunction {
        &self.nodes[k]
    }

    pub fn time(&self, k: usize) -> f64 {
        self.tgrid.time(k)
    }

    /// `max_k |u(t_k)|_inf`.
    pub fn sup_norm(&self) -> f64 {
        self.nodes.iter().map(|u| u.sup_norm()).fold(0.0, f64::max)
    }

    /// `max_k |u(t_k) - v(t_k)|_inf`.
    pub fn max_diff(&self, other: &Trajectory) -> Result<f64> {
        if self.nodes.len() != other.nodes.len() {
            return Err(FhwError::Precondition("trajectories have different lengths".into()));
        }
        let mut m = 0.0f64;
        for (a, b) in self.nodes.iter().zip(&other.nodes) {
            m = m.max(a.max_abs_diff(b)?);
        }
        Ok(m)
    }

    pub fn sub(&self, other: &Trajectory) -> Result<Trajectory> {
        if self.nodes.len() != other.nodes.len() {
            return Err(FhwError::Precondition("trajectories have different lengths".into()));
        }
        let nodes = self
            .nodes
            .iter()
            .zip(&other.nodes)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            tgrid: self.tgrid,
            nodes,
        })
    }
}

/// Diagnostics of a Picard run. Norms are sup-in-time `L^inf` norms.
#[derive(Debug, Clone, Default, Serialize)]
pub struct PicardReport {
    pub iterate_count: usize,
    /// `|u_k|` for each iterate, `u_1 = L_a(.) u0`.
    pub norms: Vec<f64>,
    /// `d_k = |u_k - u_{k-1}|` for `k >= 2`.
    pub diffs: Vec<f64>,
    /// `d_{k+1} / d_k` where `d_k` exceeds `10 eps_machine`.
    pub ratios: Vec<f64>,
    /// `|L_a(.) u0| / |u0|`.
    pub l_meas: f64,
    /// Largest `d_{k+1} / (d_k (|u_k|^{rho-1} + |u_{k-1}|^{rho-1}))`.
    pub k_meas: f64,
    /// `|L_a(.) u0|`.
    pub epsilon: f64,
    /// `2^rho K_meas eps^{rho-1}`.
    pub contraction_bound: f64,
    pub converged: bool,
}

/// Pointwise nonlinearity; for integer `rho` with dealiasing the field is
/// first projected onto the two-thirds band.
pub fn nonlinearity_eval(u: &GridFunction, model: &ModelParams) -> Result<GridFunction> {
    let base = if model.uses_dealiasing() {
        grid::inverse(&grid::dealias(&grid::forward(u)))?
    } else {
        u.clone()
    };
    Ok(base.map(|a| model.f(a)))
}

/// Precomputed propagator tables and Duhamel weights for one
/// `(model, grid, time grid)` triple. Reusable across initial data.
#[derive(Debug)]
pub struct MildSolver {
    model: ModelParams,
    tgrid: TimeGrid,
    ctx: PropagatorContext,
    weights: Option<DuhamelWeights>,
    mask: Vec<bool>,
}

type Spectrum = Vec<Complex64>;

impl MildSolver {
    pub fn new(model: ModelParams, grid: BoxGrid, tgrid: TimeGrid) -> Result<Self> {
        model.validate()?;
        let ctx = PropagatorContext::new(model.alpha, model.nu, grid.clone())?;
        let weights = if model.is_linear() {
            None
        } else {
            Some(DuhamelWeights::new(&ctx, tgrid.dt(), tgrid.steps())?)
        };
        let mask = grid::dealias_mask(&grid);
        Ok(Self {
            model,
            tgrid,
            ctx,
            weights,
            mask,
        })
    }

    pub fn model(&self) -> &ModelParams {
        &self.model
    }

    pub fn tgrid(&self) -> &TimeGrid {
        &self.tgrid
    }

    pub fn grid(&self) -> &BoxGrid {
        self.ctx.grid()
    }

    pub fn propagator(&self) -> &PropagatorContext {
        &self.ctx
    }

    fn check_data(&self, u0: &GridFunction) -> Result<()> {
        if u0.grid() != self.grid() {
            return Err(FhwError::Precondition("initial data grid differs from the solver grid".into()));
        }
        Ok(())
    }

    /// Spectra of `L_a(t_k) u0` for every node.
    fn linear_spectra(&self, u0: &GridFunction) -> Result<Vec<SpectralField>> {
        let u0_hat = grid::forward(u0);
        (0..=self.tgrid.steps())
            .map(|k| self.ctx.propagate_spectral(&u0_hat, self.tgrid.time(k)))
            .collect()
    }

    /// `L_a(t_k) u0` at every node.
    pub fn linear_trajectory(&self, u0: &GridFunction) -> Result<Trajectory> {
        self.check_data(u0)?;
        let nodes = self
            .linear_spectra(u0)?
            .iter()
            .map(grid::inverse)
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(self.tgrid, nodes)
    }

    /// Spectrum of `f(u)`, masked for dealiased integer powers.
    fn forcing(&self, u: &GridFunction) -> Result<Spectrum> {
        let fu = nonlinearity_eval(u, &self.model)?;
        let mut hat = grid::forward(&fu).coeffs().to_vec();
        if self.model.uses_dealiasing() {
            for (c, &keep) in hat.iter_mut().zip(&self.mask) {
                if !keep {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
        }
        Ok(hat)
    }

    /// History part of `B_hat(t_k)`: every contribution except the one
    /// carried by the forcing at `t_k` itself.
    fn history(&self, forcing: &[Spectrum], k: usize) -> Spectrum {
        let w = self.weights.as_ref().expect("nonlinear solver has weights");
        let index = &self.ctx.modes().index;
        let mut acc = vec![Complex64::new(0.0, 0.0); index.len()];
        for m in 0..k {
            let j = k - m - 1;
            let older = w.older(m);
            let fj = &forcing[j];
            if m == 0 {
                for (i, a) in acc.iter_mut().enumerate() {
                    *a += older[index[i] as usize] * fj[i];
                }
            } else {
                let newer = w.newer(m);
                let fj1 = &forcing[j + 1];
                for (i, a) in acc.iter_mut().enumerate() {
                    let d = index[i] as usize;
                    *a += older[d] * fj[i] + newer[d] * fj1[i];
                }
            }
        }
        acc
    }

    /// Adds the newest-node contribution `newer[0] f_hat(t_k)`.
    fn add_newest(&self, acc: &mut Spectrum, newest: &Spectrum) {
        let w = self.weights.as_ref().expect("nonlinear solver has weights");
        let newer = w.newer(0);
        let index = &self.ctx.modes().index;
        for (i, a) in acc.iter_mut().enumerate() {
            *a += newer[index[i] as usize] * newest[i];
        }
    }

    /// `B_a(u)(t_k)` from the forcing history `f(u(t_0)), .., f(u(t_k))`.
    pub fn duhamel_term(&self, history: &[GridFunction], k: usize) -> Result<GridFunction> {
        if k > self.tgrid.steps() {
            return Err(FhwError::Precondition(format!(
                "node {k} beyond the time grid ({} steps)",
                self.tgrid.steps()
            )));
        }
        if history.len() < k + 1 {
            return Err(FhwError::Precondition(format!(
                "history has {} nodes, node {k} needs {}",
                history.len(),
                k + 1
            )));
        }
        if self.model.is_linear() || k == 0 {
            return Ok(GridFunction::zeros(self.grid().clone()));
        }
        let forcing: Vec<Spectrum> = history[..=k]
            .iter()
            .map(|f| grid::forward(f).coeffs().to_vec())
            .collect();
        let mut acc = self.history(&forcing, k);
        self.add_newest(&mut acc, &forcing[k]);
        grid::inverse(&SpectralField::new(self.grid().clone(), acc)?)
    }

    fn assemble(&self, linear: &SpectralField, duhamel: Spectrum) -> Result<GridFunction> {
        let mut hat = linear.clone();
        hat.coeffs_mut()
            .iter_mut()
            .zip(duhamel)
            .for_each(|(a, b)| *a += b);
        grid::inverse(&hat)
    }

    /// Global Picard iteration `u_k = L_a(.) u0 + B_a(u_{k-1})` over the whole
    /// trajectory, stopped when `d_k / |u_k| < tol`.
    pub fn picard(&self, u0: &GridFunction, max_iter: usize, tol: f64) -> Result<(Trajectory, PicardReport)> {
        self.check_data(u0)?;
        if !(tol > 0.0) {
            return domain("tolerance must be positive");
        }
        if max_iter == 0 {
            return domain("max_iter must be at least 1");
        }
        let phi_hat = self.linear_spectra(u0)?;
        let phi: Vec<GridFunction> = phi_hat.iter().map(grid::inverse).collect::<Result<_>>()?;
        let phi = Trajectory::new(self.tgrid, phi)?;
        let eps = phi.sup_norm();
        let u0_norm = u0.sup_norm();
        let mut report = PicardReport {
            iterate_count: 1,
            norms: vec![eps],
            l_meas: if u0_norm > 0.0 { eps / u0_norm } else { 0.0 },
            epsilon: eps,
            ..Default::default()
        };
        if self.model.is_linear() || eps == 0.0 {
            report.converged = true;
            return Ok((phi, report));
        }
        let rho = self.model.rho;
        let mut prev = phi.clone();
        let mut growth = 0;
        loop {
            if report.iterate_count >= max_iter {
                return Err(FhwError::NonConvergence {
                    reason: format!("no convergence within {max_iter} iterates"),
                    report: Box::new(report),
                });
            }
            let forcing: Vec<Spectrum> = prev
                .nodes()
                .iter()
                .map(|u| self.forcing(u))
                .collect::<Result<_>>()?;
            let mut nodes = Vec::with_capacity(self.tgrid.steps() + 1);
            nodes.push(u0.clone());
            for k in 1..=self.tgrid.steps() {
                let mut acc = self.history(&forcing, k);
                self.add_newest(&mut acc, &forcing[k]);
                nodes.push(self.assemble(&phi_hat[k], acc)?);
            }
            let next = Trajectory::new(self.tgrid, nodes)?;
            let d = next.max_diff(&prev)?;
            let norm = next.sup_norm();
            report.iterate_count += 1;
            if !d.is_finite() || !norm.is_finite() || norm > 1e8 {
                report.norms.push(norm);
                report.diffs.push(d);
                return Err(FhwError::NonConvergence {
                    reason: format!("iterates left the finite range (norm {norm:e})"),
                    report: Box::new(report),
                });
            }
            let prev_norm = *report.norms.last().unwrap();
            if let Some(&d_prev) = report.diffs.last() {
                if d_prev > 10.0 * f64::EPSILON {
                    report.ratios.push(d / d_prev);
                    let older_norm = report.norms[report.norms.len() - 2];
                    let k = d / (d_prev * (prev_norm.powf(rho - 1.0) + older_norm.powf(rho - 1.0)));
                    report.k_meas = report.k_meas.max(k);
                }
                growth = if d > d_prev { growth + 1 } else { 0 };
            }
            report.norms.push(norm);
            report.diffs.push(d);
            report.contraction_bound = 2f64.powf(rho) * report.k_meas * eps.powf(rho - 1.0);
            if growth >= 3 {
                return Err(FhwError::NonConvergence {
                    reason: "successive differences grew three times in a row".into(),
                    report: Box::new(report),
                });
            }
            prev = next;
            if d <= tol * norm {
                report.converged = true;
                return Ok((prev, report));
            }
        }
    }

    /// Time marching: at each node predict with the previous forcing value,
    /// then apply `corrector_iters` fixed-point corrections of the newest node.
    pub fn march(&self, u0: &GridFunction, corrector_iters: usize) -> Result<Trajectory> {
        self.check_data(u0)?;
        if corrector_iters == 0 {
            return domain("corrector_iters must be at least 1");
        }
        let phi_hat = self.linear_spectra(u0)?;
        if self.model.is_linear() {
            let nodes = phi_hat.iter().map(grid::inverse).collect::<Result<Vec<_>>>()?;
            return Trajectory::new(self.tgrid, nodes);
        }
        let mut nodes = vec![u0.clone()];
        let mut forcing = vec![self.forcing(u0)?];
        for k in 1..=self.tgrid.steps() {
            let known = self.history(&forcing, k);
            let mut newest = forcing[k - 1].clone();
            let mut u = GridFunction::zeros(self.grid().clone());
            for _ in 0..=corrector_iters {
                let mut acc = known.clone();
                self.add_newest(&mut acc, &newest);
                u = self.assemble(&phi_hat[k], acc)?;
                let sup = u.sup_norm();
                if !sup.is_finite() || sup > 1e8 {
                    return Err(FhwError::BlowUp {
                        last_valid: k - 1,
                        sup_norm: sup,
                    });
                }
                newest = self.forcing(&u)?;
            }
            forcing.push(newest);
            nodes.push(u);
        }
        Trajectory::new(self.tgrid, nodes)
    }
}

pub fn picard_solve(
    u0: &GridFunction,
    model: &ModelParams,
    tgrid: &TimeGrid,
    max_iter: usize,
    tol: f64,
) -> Result<(Trajectory, PicardReport)> {
    MildSolver::new(*model, u0.grid().clone(), *tgrid)?.picard(u0, max_iter, tol)
}

pub fn march_solve(u0: &GridFunction, model: &ModelParams, tgrid: &TimeGrid, corrector_iters: usize) -> Result<Trajectory> {
    MildSolver::new(*model, u0.grid().clone(), *tgrid)?.march(u0, corrector_iters)
}

/// Measured stability ratio `|u - u_bar|_X / |L_a(.)(u0 - u0_bar)|_X`
/// against the bound `1 / (1 - 2^rho K_meas eps^{rho-1})`.
#[derive(Debug, Clone, Serialize)]
pub struct DependenceReport {
    pub ratio: f64,
    pub bound: f64,
    pub solution_gap: f64,
    pub linear_gap: f64,
    pub pass: bool,
}

pub fn continuous_dependence_check(
    u0: &GridFunction,
    u0_bar: &GridFunction,
    model: &ModelParams,
    tgrid: &TimeGrid,
    norm: &XNormSpec,
    max_iter: usize,
    tol: f64,
) -> Result<DependenceReport> {
    u0.check_same_grid(u0_bar)?;
    let solver = MildSolver::new(*model, u0.grid().clone(), *tgrid)?;
    let (u, rep) = solver.picard(u0, max_iter, tol)?;
    let (ubar, rep_bar) = solver.picard(u0_bar, max_iter, tol)?;
    let solution_gap = xqp_norm(&u.sub(&ubar)?, norm)?.total;
    let linear_gap = xqp_norm(&solver.linear_trajectory(&u0.sub(u0_bar)?)?, norm)?.total;
    let ratio = if solution_gap == 0.0 { 0.0 } else { solution_gap / linear_gap };
    let rho = model.rho;
    let k = rep.k_meas.max(rep_bar.k_meas);
    let eps = rep.epsilon.max(rep_bar.epsilon);
    let factor = 2f64.powf(rho) * k * eps.powf(rho - 1.0);
    let bound = if model.is_linear() {
        1.0
    } else if factor < 1.0 {
        1.0 / (1.0 - factor)
    } else {
        f64::INFINITY
    };
    Ok(DependenceReport {
        ratio,
        bound,
        solution_gap,
        linear_gap,
        pass: ratio.is_finite() && ratio <= bound * (1.0 + 1e-9),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;

    #[test]
    fn nonlinearity_values() {
        let m = ModelParams::new(1.5, 3.0, 1).unwrap();
        assert_eq!(m.f(0.0), 0.0);
        assert_eq!(m.f(2.0), 8.0);
        assert_eq!(m.f(-2.0), -8.0);
        let mut u = m;
        u.form = Nonlinearity::Unsigned;
        u.gamma_sign = -1;
        assert_eq!(u.f(-2.0), -8.0);
        let g = BoxGrid::cube(1, 16, 1.0).unwrap();
        let z = nonlinearity_eval(&GridFunction::zeros(g), &m).unwrap();
        assert_eq!(z.sup_norm(), 0.0);
    }

    #[test]
    fn model_validation() {
        assert!(ModelParams::new(2.0, 3.0, 1).is_err());
        assert!(ModelParams::new(1.5, 1.0, 1).is_err());
        assert!(ModelParams::new(1.5, 3.0, 2).is_err());
        assert!(TimeGrid::new(1.0, 4).is_err());
    }

    #[test]
    fn constant_forcing_zero_mode() {
        // f(u) = c on all nodes: B(t)(zero mode) = nu c t^a / Gamma(a + 1)
        let grid = BoxGrid::cube(1, 8, 1.0).unwrap();
        let mut model = ModelParams::new(1.5, 3.0, 1).unwrap();
        model.nu = 0.7;
        let tg = TimeGrid::new(0.8, 16).unwrap();
        let solver = MildSolver::new(model, grid.clone(), tg).unwrap();
        let c = 2.5;
        let hist = vec![GridFunction::from_fn(grid, |_| c).unwrap(); 17];
        let b = solver.duhamel_term(&hist, 16).unwrap();
        let want = 0.7 * c * 0.8f64.powf(1.5) / gamma(2.5).unwrap();
        assert!((b.values()[3] - want).abs() < 1e-8 * want);
        assert!(solver.duhamel_term(&hist[..5], 8).is_err());
    }

    #[test]
    fn linear_problem_is_one_iterate() {
        let grid = BoxGrid::cube(1, 32, 3.0).unwrap();
        let model = ModelParams::new(1.5, 3.0, 0).unwrap();
        let tg = TimeGrid::new(1.0, 8).unwrap();
        let u0 = GridFunction::from_fn(grid, |x| (-x[0] * x[0]).exp()).unwrap();
        let (traj, rep) = picard_solve(&u0, &model, &tg, 10, 1e-12).unwrap();
        assert_eq!(rep.iterate_count, 1);
        assert!(rep.converged);
        let marched = march_solve(&u0, &model, &tg, 1).unwrap();
        assert_eq!(traj, marched);
    }
}
