//! Scaling exponents, admissibility of parameter tuples, and drivers that
//! check symmetry, self-similarity, decay and asymptotic equivalence on
//! computed solutions.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{domain, FhwError, Result};
use crate::grid::{BoxGrid, GridFunction};
use crate::norms::{besov_morrey_norm, morrey_norm, BallParams, LPPartition, XNormSpec};
use crate::solver::{MildSolver, ModelParams, TimeGrid, Trajectory};
use crate::special::beta_fn;

/// Exponents fixed by the scaling `u -> l^{2/(rho-1)} u(l^{2/a} t, l x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedExponents {
    /// Time weight of the Morrey part of the solution norm.
    pub eta: f64,
    /// Regularity of the Besov-Morrey part.
    pub sigma: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Regularity reached by the nonlinear term, `sigma + l`.
    pub s_tilde: f64,
    /// Sobolev shift `(n-mu) rho/q - (n-mu)/p`.
    pub l: f64,
    /// Total smoothing order used in the propagator estimate, `(beta - s) + l`
    /// with `beta = sigma`, `s = 0`.
    pub delta: f64,
}

impl DerivedExponents {
    pub fn new(n: usize, alpha: f64, rho: f64, p: f64, q: f64, mu: f64) -> Result<Self> {
        let d = n as f64 - mu;
        let eta = 0.5 * alpha * (2.0 / (rho - 1.0) - d / q);
        let sigma = d / p - 2.0 / (rho - 1.0);
        let l = d * rho / q - d / p;
        let s_tilde = sigma + l;
        let gamma1 = -0.5 * alpha * s_tilde;
        let gamma2 = -0.5 * alpha * (d * rho / q - d / q);
        let e = Self {
            eta,
            sigma,
            gamma1,
            gamma2,
            s_tilde,
            l,
            delta: s_tilde,
        };
        let (r1, r2) = e.identity_residuals(alpha, rho);
        let scale = 1.0 + alpha.abs() + (eta * rho).abs() + gamma1.abs() + gamma2.abs();
        if r1.abs() > 1e-12 * scale || r2.abs() > 1e-12 * scale {
            return Err(FhwError::Consistency(format!(
                "exponent identities violated: {r1:e}, {r2:e}"
            )));
        }
        Ok(e)
    }

    /// `(a + gamma1 - eta rho, a + gamma2 - eta rho + eta)`; both vanish.
    pub fn identity_residuals(&self, alpha: f64, rho: f64) -> (f64, f64) {
        (
            alpha + self.gamma1 - self.eta * rho,
            alpha + self.gamma2 - self.eta * rho + self.eta,
        )
    }
}

/// One admissibility condition and whether it holds.
#[derive(Debug, Clone, Serialize)]
pub struct Condition {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub exponents: DerivedExponents,
    pub conditions: Vec<Condition>,
}

impl Admissibility {
    pub fn failures(&self) -> Vec<&Condition> {
        self.conditions.iter().filter(|c| !c.holds).collect()
    }
}

/// Checks a parameter tuple against the well-posedness window and the
/// convergence conditions of the beta integrals.
pub fn validate_params(n: usize, alpha: f64, rho: f64, p: f64, q: f64, mu: f64) -> Result<Admissibility> {
    if n == 0 {
        return domain("dimension must be at least 1");
    }
    if !(1.0..2.0).contains(&alpha) {
        return domain(format!("alpha must lie in [1, 2), got {alpha}"));
    }
    if !(rho > 1.0) {
        return domain(format!("rho must exceed 1, got {rho}"));
    }
    if !(0.0..n as f64).contains(&mu) {
        return domain(format!("mu must lie in [0, n), got {mu}"));
    }
    if !(p > 0.0 && q > 0.0) {
        return domain("p and q must be positive");
    }
    let e = DerivedExponents::new(n, alpha, rho, p, q, mu)?;
    let d = n as f64 - mu;
    let lower = 2.0 / (rho - 1.0) - 2.0 / (alpha * rho);
    let upper = 2.0 / (alpha * (rho - 1.0));
    let mut conditions = Vec::new();
    let mut push = |name, holds, detail: String| conditions.push(Condition { name, holds, detail });
    push(
        "lower_q_window",
        lower < d / q,
        format!("2/(rho-1) - 2/(alpha rho) = {lower} < (n-mu)/q = {}", d / q),
    );
    push(
        "upper_q_window",
        d / q < upper,
        format!("(n-mu)/q = {} < 2/(alpha(rho-1)) = {upper}", d / q),
    );
    push(
        "p_window",
        d / p < 2.0 / (rho - 1.0),
        format!("(n-mu)/p = {} < 2/(rho-1) = {}", d / p, 2.0 / (rho - 1.0)),
    );
    push("p_order", 1.0 < p && p <= q, format!("1 < p = {p} <= q = {q}"));
    push("rho_order", 1.0 < rho && rho <= q, format!("1 < rho = {rho} <= q = {q}"));
    push("eta_rho", e.eta * rho < 1.0, format!("eta rho = {} < 1", e.eta * rho));
    push("gamma1", e.gamma1 > -1.0, format!("gamma1 = {} > -1", e.gamma1));
    push("gamma2", e.gamma2 > -1.0, format!("gamma2 = {} > -1", e.gamma2));
    let admissible = conditions.iter().all(|c| c.holds);
    Ok(Admissibility {
        admissible,
        exponents: e,
        conditions,
    })
}

/// Identity residuals and the beta factors of the bilinear estimate.
#[derive(Debug, Clone, Serialize)]
pub struct BetaReport {
    pub residual1: f64,
    pub residual2: f64,
    /// `B(1 - eta rho, a - 1)`, `B(a - eta rho, gamma1 + 1)`, `B(a - eta rho, gamma2 + 1)`.
    pub betas: Option<[f64; 3]>,
    pub note: Option<String>,
    pub pass: bool,
}

pub fn beta_identity_check(e: &DerivedExponents, alpha: f64, rho: f64) -> Result<BetaReport> {
    let (r1, r2) = e.identity_residuals(alpha, rho);
    let ok = r1.abs() <= 1e-12 && r2.abs() <= 1e-12;
    if alpha == 1.0 {
        return Ok(BetaReport {
            residual1: r1,
            residual2: r2,
            betas: None,
            note: Some("delta-limit, skipped: B(., alpha - 1) has a Gamma(0) pole at alpha = 1".into()),
            pass: ok,
        });
    }
    let x = alpha - e.eta * rho;
    let betas = [
        beta_fn(1.0 - e.eta * rho, alpha - 1.0)?,
        beta_fn(x, e.gamma1 + 1.0)?,
        beta_fn(x, e.gamma2 + 1.0)?,
    ];
    Ok(BetaReport {
        residual1: r1,
        residual2: r2,
        betas: Some(betas),
        note: None,
        pass: ok && betas.iter().all(|b| b.is_finite() && *b > 0.0),
    })
}

/// Least-squares fit of `ln |u(t)|` against `ln t`.
#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub expected: f64,
    pub relative_error: f64,
    pub points: usize,
}

/// Fits a power law to `(t, norm)` samples after dropping the first and last
/// 10% (transient and horizon effects); compares the slope with `expected`.
pub fn decay_fit(samples: &[(f64, f64)], expected: f64) -> Result<DecayFit> {
    let cut = samples.len() / 10;
    let window = &samples[cut..samples.len() - cut];
    if window.len() < 3 {
        return Err(FhwError::Fit("fewer than three samples in the fit window".into()));
    }
    if let Some(&(t, v)) = window.iter().find(|&&(t, v)| !(t > 0.0) || !(v > 0.0)) {
        return Err(FhwError::Fit(format!("non-positive sample ({t}, {v})")));
    }
    let xs: Vec<f64> = window.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = window.iter().map(|s| s.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(FhwError::Fit("all sample times coincide".into()));
    }
    let slope = sxy / sxx;
    Ok(DecayFit {
        slope,
        intercept: my - slope * mx,
        expected,
        relative_error: ((slope - expected) / expected).abs(),
        points: window.len(),
    })
}

/// Decay fit of `|u(t_k)|_{M_{q,mu}}` along a trajectory against `-eta`.
pub fn decay_fit_trajectory(traj: &Trajectory, q: f64, mu: f64, balls: &BallParams, e: &DerivedExponents) -> Result<DecayFit> {
    let samples = (1..traj.nodes().len())
        .map(|k| Ok((traj.time(k), morrey_norm(traj.node(k), q, mu, balls)?.value)))
        .collect::<Result<Vec<_>>>()?;
    decay_fit(&samples, -e.eta)
}

/// Signed permutation `x -> M x` acting on grid coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedPermutation {
    /// `(M x)_a = signs[a] x_{perm[a]}`.
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

impl SignedPermutation {
    /// Reflection of one axis.
    pub fn reflection(n: usize, axis: usize) -> Self {
        let mut signs = vec![1; n];
        signs[axis] = -1;
        Self {
            perm: (0..n).collect(),
            signs,
        }
    }

    /// Exchange of two axes.
    pub fn swap(n: usize, a: usize, b: usize) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(a, b);
        Self {
            perm,
            signs: vec![1; n],
        }
    }

    fn check(&self, grid: &BoxGrid) -> Result<()> {
        let n = grid.dim();
        let mut seen = vec![false; n];
        if self.perm.len() != n || self.signs.len() != n {
            return Err(FhwError::Precondition("matrix size differs from the grid dimension".into()));
        }
        for (a, &p) in self.perm.iter().enumerate() {
            if p >= n || seen[p] {
                return Err(FhwError::Precondition("not a permutation".into()));
            }
            seen[p] = true;
            if grid.sizes()[a] != grid.sizes()[p] {
                return Err(FhwError::Precondition("permutation mixes axes of different sizes".into()));
            }
            if self.signs[a].abs() != 1 {
                return Err(FhwError::Precondition("signs must be +1 or -1".into()));
            }
        }
        Ok(())
    }

    /// `u o M` sampled on the same grid.
    pub fn compose(&self, u: &GridFunction) -> Result<GridFunction> {
        let grid = u.grid();
        self.check(grid)?;
        let n = grid.dim();
        let values = (0..grid.len())
            .map(|flat| {
                let idx = grid.unravel(flat);
                let mut src = [0usize; 3];
                for a in 0..n {
                    let i = idx[self.perm[a]];
                    let size = grid.sizes()[a];
                    // x_i = -L + i h; -x_i sits at index (N - i) mod N
                    src[a] = if self.signs[a] < 0 { (size - i) % size } else { i };
                }
                u.values()[grid.ravel(&src[..n])]
            })
            .collect();
        GridFunction::new(grid.clone(), values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

/// `max_k |u(t_k) o M -+ u(t_k)|_inf / |u(t_k)|_inf` (minus for even, plus for odd).
pub fn symmetry_check(traj: &Trajectory, m: &SignedPermutation, parity: Parity) -> Result<f64> {
    let mut worst = 0.0f64;
    for u in traj.nodes() {
        let sup = u.sup_norm();
        if sup == 0.0 {
            continue;
        }
        let mu = m.compose(u)?;
        let v = match parity {
            Parity::Even => mu.sub(u)?,
            Parity::Odd => mu.axpy(1.0, u)?,
        };
        worst = worst.max(v.sup_norm() / sup);
    }
    Ok(worst)
}

/// Setup of a two-box self-similarity comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfSimilarityConfig {
    pub model: ModelParams,
    pub n: usize,
    pub size: usize,
    pub half_length: f64,
    pub horizon: f64,
    pub steps: usize,
    /// Dilation factor; 1 or 2 (2 maps dyadic grids onto each other).
    pub lambda: f64,
    /// Amplitude `c` of `c (|x|^2 + eps^2)^{-1/(rho-1)}`.
    pub amplitude: f64,
    /// Physical mollification length `eps`, the same in both boxes.
    pub mollifier: f64,
    pub corrector_iters: usize,
    /// First node included in the comparison.
    pub from_node: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfSimilarityReport {
    /// Largest relative defect over the compared nodes.
    pub defect: f64,
    /// Defect per compared node, `(k, defect)`.
    pub per_node: Vec<(usize, f64)>,
}

/// Mollified homogeneous profile of degree `-2/(rho-1)`.
pub fn homogeneous_data(grid: &BoxGrid, rho: f64, amplitude: f64, eps: f64) -> Result<GridFunction> {
    let e = -1.0 / (rho - 1.0);
    GridFunction::from_fn(grid.clone(), |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        amplitude * (r2 + eps * eps).powf(e)
    })
}

/// Runs the same data on the boxes `(L, T)` and `(L/lambda, T/lambda^{2/a})`
/// with equal sample counts and reports
/// `max |lambda^{2/(rho-1)} u_L(lambda^{2/a} t, lambda x) - u_{L/lambda}(t, x)| / |u_{L/lambda}(t)|_inf`.
///
/// Both grids carry the same physical mollification length, so the defect
/// measures the departure of the data from exact homogeneity.
pub fn self_similarity_check(cfg: &SelfSimilarityConfig) -> Result<SelfSimilarityReport> {
    let lam = cfg.lambda;
    if lam != 1.0 && lam != 2.0 {
        return Err(FhwError::Precondition(format!(
            "dilation {lam} does not map the grids onto each other (use 1 or 2)"
        )));
    }
    let alpha = cfg.model.alpha;
    let rho = cfg.model.rho;
    let big = BoxGrid::cube(cfg.n, cfg.size, cfg.half_length)?;
    let small = BoxGrid::cube(cfg.n, cfg.size, cfg.half_length / lam)?;
    let t_big = TimeGrid::new(cfg.horizon, cfg.steps)?;
    let t_small = TimeGrid::new(cfg.horizon / lam.powf(2.0 / alpha), cfg.steps)?;
    let run = |grid: &BoxGrid, tg: TimeGrid| -> Result<Trajectory> {
        let u0 = homogeneous_data(grid, rho, cfg.amplitude, cfg.mollifier)?;
        MildSolver::new(cfg.model, grid.clone(), tg)?.march(&u0, cfg.corrector_iters)
    };
    let ua = run(&big, t_big)?;
    let ub = if lam == 1.0 { ua.clone() } else { run(&small, t_small)? };
    let amp = lam.powf(2.0 / (rho - 1.0));
    let mut per_node = Vec::new();
    for k in cfg.from_node.max(1)..=cfg.steps {
        // grid point x_i on the small box maps to the same index on the big box
        let a = ua.node(k).values();
        let b = ub.node(k).values();
        let sup = ub.node(k).sup_norm();
        let diff = a
            .iter()
            .zip(b)
            .fold(0.0f64, |m, (va, vb)| m.max((amp * va - vb).abs()));
        per_node.push((k, if sup > 0.0 { diff / sup } else { 0.0 }));
    }
    let defect = per_node.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(SelfSimilarityReport { defect, per_node })
}

/// Paired decay curves for two solutions and their linear difference.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticReport {
    pub times: Vec<f64>,
    /// `|u - v|_{N^sigma_{p,mu,inf}}` per node.
    pub a1_besov: Vec<f64>,
    /// `t^eta |u - v|_{M_{q,mu}}` per node.
    pub a1_morrey: Vec<f64>,
    /// The same quantities for `L_a(t)(u0 - v0)`.
    pub a2_besov: Vec<f64>,
    pub a2_morrey: Vec<f64>,
    pub tolerance: f64,
    pub a1_decays: bool,
    pub a2_decays: bool,
    /// Both pairs fall below the tolerance at the horizon, or neither does.
    pub equivalent: bool,
}

pub fn asymptotic_equivalence_check(
    u0: &GridFunction,
    v0: &GridFunction,
    model: &ModelParams,
    tgrid: &TimeGrid,
    norm: &XNormSpec,
    corrector_iters: usize,
    tolerance: f64,
) -> Result<AsymptoticReport> {
    u0.check_same_grid(v0)?;
    let solver = MildSolver::new(*model, u0.grid().clone(), *tgrid)?;
    let u = solver.march(u0, corrector_iters)?;
    let v = solver.march(v0, corrector_iters)?;
    let diff = u.sub(&v)?;
    let lin = solver.linear_trajectory(&u0.sub(v0)?)?;
    let partition = LPPartition::new(u0.grid(), norm.j_range)?;
    let curves = |traj: &Trajectory| -> Result<(Vec<f64>, Vec<f64>)> {
        let mut b = Vec::new();
        let mut m = Vec::new();
        for k in 1..traj.nodes().len() {
            let w = traj.node(k);
            b.push(besov_morrey_norm(w, norm.sigma, norm.p, norm.mu, None, &partition, &norm.balls)?.value);
            m.push(traj.time(k).powf(norm.eta) * morrey_norm(w, norm.q, norm.mu, &norm.balls)?.value);
        }
        Ok((b, m))
    };
    let (a1_besov, a1_morrey) = curves(&diff)?;
    let (a2_besov, a2_morrey) = curves(&lin)?;
    let last = |v: &[f64]| *v.last().unwrap_or(&0.0);
    let a1_decays = last(&a1_besov) < tolerance && last(&a1_morrey) < tolerance;
    let a2_decays = last(&a2_besov) < tolerance && last(&a2_morrey) < tolerance;
    Ok(AsymptoticReport {
        times: (1..=tgrid.steps()).map(|k| tgrid.time(k)).collect(),
        a1_besov,
        a1_morrey,
        a2_besov,
        a2_morrey,
        tolerance,
        a1_decays,
        a2_decays,
        equivalent: a1_decays == a2_decays,
    })
}

/// One row of a verification verdict file.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Verdict {
    /// Passing when `value <= threshold`.
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }
}

/// CSV with columns `name,config_hash,value,threshold,pass`.
pub fn write_verdicts<W: Write>(mut w: W, verdicts: &[Verdict], config_hash: &str) -> Result<()> {
    writeln!(w, "name,config_hash,value,threshold,pass")?;
    for v in verdicts {
        writeln!(w, "{},{},{:.17e},{:e},{}", v.name, config_hash, v.value, v.threshold, v.pass)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissible_heat_example() {
        let a = validate_params(2, 1.0, 3.0, 3.0, 3.0, 0.0).unwrap();
        assert!(a.admissible, "{:?}", a.failures());
        assert!((a.exponents.eta - 1.0 / 6.0).abs() < 1e-15);
        assert!((a.exponents.sigma + 1.0 / 3.0).abs() < 1e-15);
        assert!((a.exponents.gamma1 + 0.5).abs() < 1e-15);
        assert!((a.exponents.gamma2 + 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn inadmissible_lower_window() {
        let a = validate_params(1, 1.0, 3.0, 2.0, 4.0, 0.0).unwrap();
        assert!(!a.admissible);
        assert!(a.failures().iter().any(|c| c.name == "lower_q_window"));
    }

    #[test]
    fn fractional_example() {
        let a = validate_params(2, 1.5, 3.0, 3.0, 3.2, 0.0).unwrap();
        assert!(a.admissible, "{:?}", a.failures());
        assert!((a.exponents.eta - 0.28125).abs() < 1e-15);
        assert!((a.exponents.sigma + 1.0 / 3.0).abs() < 1e-15);
        let b = beta_identity_check(&a.exponents, 1.5, 3.0).unwrap();
        assert!(b.pass && b.betas.is_some());
        let heat = validate_params(2, 1.0, 3.0, 3.0, 3.0, 0.0).unwrap();
        let b = beta_identity_check(&heat.exponents, 1.0, 3.0).unwrap();
        assert!(b.pass && b.betas.is_none() && b.note.is_some());
    }

    #[test]
    fn decay_fit_basics() {
        let samples: Vec<(f64, f64)> = (1..=40).map(|k| (k as f64, 3.0 * (k as f64).powf(-0.4))).collect();
        let f = decay_fit(&samples, -0.4).unwrap();
        assert!((f.slope + 0.4).abs() < 1e-12);
        let zeros: Vec<(f64, f64)> = (1..=40).map(|k| (k as f64, 0.0)).collect();
        assert!(matches!(decay_fit(&zeros, -0.4), Err(FhwError::Fit(_))));
    }

    #[test]
    fn reflection_compose() {
        let g = BoxGrid::new(vec![16, 8], 2.0).unwrap();
        let u = GridFunction::from_fn(g.clone(), |x| x[0] + 10.0 * x[1] * x[1]).unwrap();
        let r = SignedPermutation::reflection(2, 0).compose(&u).unwrap();
        for i in 1..g.len() {
            let x = g.point(i);
            let want = if x[0] == -2.0 { u.values()[i] } else { -x[0] + 10.0 * x[1] * x[1] };
            if x[0] != -2.0 {
                assert!((r.values()[i] - want).abs() < 1e-12);
            }
        }
        assert!(SignedPermutation::swap(2, 0, 1).compose(&u).is_err());
    }
}
