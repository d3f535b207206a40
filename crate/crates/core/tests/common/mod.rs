//! Independent oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::f64::consts::PI;

use fhw_core::grid::{self, BoxGrid, GridFunction, SpectralField};
use fhw_core::solver::ModelParams;
use fhw_core::special::ml_one;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rows `(alpha, z, k(1, z))` of the frozen M-Wright table.
pub fn wright_table() -> Vec<(f64, f64, f64)> {
    include_str!("../data/wright_oracle.csv")
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|v| v.trim().parse().unwrap()).collect();
            (f[0], f[1], f[2])
        })
        .collect()
}

/// Rows `(alpha, b, x, E_{alpha,b}(-x))` of the frozen Mittag-Leffler table.
pub fn ml_table() -> Vec<(f64, f64, f64, f64)> {
    include_str!("../data/ml_oracle.csv")
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|v| v.trim().parse().unwrap()).collect();
            (f[0], f[1], f[2], f[3])
        })
        .collect()
}

/// Double-exponential (tanh-sinh) quadrature on `[a, b]`; tolerates
/// integrable endpoint singularities.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let h = 1.0 / 64.0;
    let mut acc = 0.0;
    let kmax = (4.0 / h) as i64;
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let s = 0.5 * PI * t.sinh();
        let x = s.tanh();
        let w = 0.5 * PI * t.cosh() / s.cosh().powi(2);
        // distance to the nearer endpoint without cancellation
        let gap = half / (s.abs().exp() * s.cosh());
        let node = if x < 0.0 { a + gap } else { b - gap };
        if gap <= 0.0 || node <= a || node >= b {
            continue;
        }
        acc += w * f(node);
    }
    acc * half * h
}

/// `B(t_k) = int_0^{t_k} E_a(-(t_k - s)^a lam) int_0^s r(s - tau) g(tau) dtau ds`
/// with `r(w) = nu w^{a-2} / Gamma(a-1)` and `g` the piecewise-linear
/// interpolant of `values` on `t_j = j dt`. The inner integral is exact for
/// linear pieces; the outer one uses tanh-sinh per interval.
pub fn nested_duhamel(alpha: f64, nu: f64, lam: f64, dt: f64, values: &[f64]) -> Vec<f64> {
    let g_am1 = fhw_core::special::gamma(alpha - 1.0).unwrap();
    let inner = |s: f64| -> f64 {
        let mut acc = 0.0;
        for j in 0..values.len() - 1 {
            let t0 = j as f64 * dt;
            if t0 >= s {
                break;
            }
            let t1 = ((j + 1) as f64 * dt).min(s);
            let slope = (values[j + 1] - values[j]) / dt;
            // g(tau) = c - slope (s - tau), c = g evaluated along the piece at tau = s
            let c = values[j] + slope * (s - t0);
            let (w0, w1) = (s - t0, s - t1);
            acc += c * (w0.powf(alpha - 1.0) - w1.powf(alpha - 1.0)) / (alpha - 1.0)
                - slope * (w0.powf(alpha) - w1.powf(alpha)) / alpha;
        }
        nu * acc / g_am1
    };
    (0..values.len())
        .map(|k| {
            let t = k as f64 * dt;
            (0..k)
                .map(|i| {
                    let a = i as f64 * dt;
                    let b = a + dt;
                    tanh_sinh(|s| ml_one(alpha, (t - s).powf(alpha) * lam).unwrap() * inner(s), a, b)
                })
                .sum()
        })
        .collect()
}

/// Classical semilinear heat solver `u_t = Delta u + f(u)` on the periodic
/// grid by fourth-order exponential time differencing (Kassam-Trefethen
/// contour evaluation of the phi functions). Returns the solution at
/// `t_k = k dt_out` for `k = 0..=nodes`, taking `sub` steps per output step.
pub fn heat_etdrk4(u0: &GridFunction, model: &ModelParams, dt_out: f64, nodes: usize, sub: usize) -> Vec<GridFunction> {
    let g = u0.grid().clone();
    let h = dt_out / sub as f64;
    let lin: Vec<f64> = g.xi_sq().iter().map(|q| -q).collect();
    let contour = 64;
    let roots: Vec<Complex64> = (0..contour)
        .map(|j| Complex64::from_polar(1.0, PI * (j as f64 + 0.5) / contour as f64 * 2.0))
        .collect();
    let mean = |f: &dyn Fn(Complex64) -> Complex64, lh: f64| -> f64 {
        let s: Complex64 = roots.iter().map(|&r| f(lh + r)).sum();
        (s / contour as f64).re
    };
    let mut e = Vec::new();
    let mut e2 = Vec::new();
    let mut q = Vec::new();
    let mut f1 = Vec::new();
    let mut f2 = Vec::new();
    let mut f3 = Vec::new();
    for &l in &lin {
        let lh = l * h;
        e.push(lh.exp());
        e2.push((lh / 2.0).exp());
        q.push(h * mean(&|r| ((r / 2.0).exp() - 1.0) / r, lh));
        f1.push(h * mean(&|r| (-4.0 - r + r.exp() * (4.0 - 3.0 * r + r * r)) / (r * r * r), lh));
        f2.push(h * mean(&|r| (2.0 + r + r.exp() * (r - 2.0)) / (r * r * r), lh));
        f3.push(h * mean(&|r| (-4.0 - 3.0 * r - r * r + r.exp() * (4.0 - r)) / (r * r * r), lh));
    }
    let dealias = model.dealias && model.rho.fract() == 0.0;
    let mask = grid::dealias_mask(&g);
    let nl = |v: &[Complex64]| -> Vec<Complex64> {
        if model.gamma_sign == 0 {
            return vec![Complex64::new(0.0, 0.0); v.len()];
        }
        let mut field = SpectralField::new(g.clone(), v.to_vec()).unwrap();
        if dealias {
            field = grid::dealias(&field);
        }
        let u = grid::inverse(&field).unwrap();
        let mut out = grid::forward(&u.map(|a| model.f(a))).coeffs().to_vec();
        if dealias {
            for (c, &keep) in out.iter_mut().zip(&mask) {
                if !keep {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
        }
        out
    };
    let mut v = grid::forward(u0).coeffs().to_vec();
    let mut out = vec![u0.clone()];
    for _ in 0..nodes {
        for _ in 0..sub {
            let nv = nl(&v);
            let a: Vec<Complex64> = (0..v.len()).map(|i| e2[i] * v[i] + q[i] * nv[i]).collect();
            let na = nl(&a);
            let b: Vec<Complex64> = (0..v.len()).map(|i| e2[i] * v[i] + q[i] * na[i]).collect();
            let nb = nl(&b);
            let c: Vec<Complex64> = (0..v.len())
                .map(|i| e2[i] * a[i] + q[i] * (2.0 * nb[i] - nv[i]))
                .collect();
            let nc = nl(&c);
            for i in 0..v.len() {
                v[i] = e[i] * v[i] + nv[i] * f1[i] + 2.0 * (na[i] + nb[i]) * f2[i] + nc[i] * f3[i];
            }
        }
        out.push(grid::inverse(&SpectralField::new(g.clone(), v.clone()).unwrap()).unwrap());
    }
    out
}

/// Exhaustive Morrey norm: every center, `r = 2h` and every sample distance
/// beyond it, ball sums recomputed from scratch for each
/// center-radius pair.
pub fn brute_force_morrey(f: &GridFunction, p: f64, mu: f64) -> f64 {
    let g = f.grid();
    let n = g.dim();
    let dist = |a: usize, b: usize| -> f64 {
        let (ia, ib) = (g.unravel(a), g.unravel(b));
        let mut s = 0.0;
        for ax in 0..n {
            let size = g.sizes()[ax] as i64;
            let d = (ia[ax] as i64 - ib[ax] as i64).abs();
            let d = d.min(size - d);
            let x = d as f64 * g.spacing(ax);
            s += x * x;
        }
        s.sqrt()
    };
    let rmin = 2.0 * g.min_spacing();
    let mut radii: Vec<f64> = (0..g.len()).map(|b| dist(0, b)).filter(|&d| d > rmin * (1.0 + 1e-12)).collect();
    radii.push(rmin);
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    radii.dedup();
    let hn = g.cell_volume();
    let mut best = f64::NEG_INFINITY;
    for c in 0..g.len() {
        let d: Vec<f64> = (0..g.len()).map(|x| dist(c, x)).collect();
        for &r in &radii {
            let limit = if r == rmin { r * (1.0 + 1e-12) } else { r };
            let s: f64 = (0..g.len())
                .filter(|&x| d[x] <= limit)
                .map(|x| f.values()[x].abs().powf(p))
                .sum();
            best = best.max(r.powf(-mu / p) * (hn * s).powf(1.0 / p));
        }
    }
    best
}

/// Integer-valued random field in `[-range, range]`.
pub fn integer_field(g: &BoxGrid, range: i32, seed: u64) -> GridFunction {
    let mut r = rng(seed);
    let v = (0..g.len()).map(|_| r.random_range(-range..=range) as f64).collect();
    GridFunction::new(g.clone(), v).unwrap()
}

/// Smooth random field: a few random Fourier modes with decaying amplitudes.
pub fn smooth_field(g: &BoxGrid, modes: usize, seed: u64) -> GridFunction {
    let mut r = rng(seed);
    let n = g.dim();
    let l = g.half_length();
    let waves: Vec<(Vec<f64>, f64, f64)> = (0..modes)
        .map(|_| {
            let k: Vec<f64> = (0..n).map(|_| r.random_range(-4..=4) as f64 * PI / l).collect();
            (k, r.random_range(-1.0..1.0), r.random_range(0.0..2.0 * PI))
        })
        .collect();
    GridFunction::from_fn(g.clone(), |x| {
        waves
            .iter()
            .map(|(k, a, ph)| a * (k.iter().zip(x).map(|(k, x)| k * x).sum::<f64>() + ph).cos())
            .sum()
    })
    .unwrap()
}
