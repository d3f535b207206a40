//! Gauss-Legendre rules and an adaptive bisection integrator.
//!
//! Nodes are generated once by Newton iteration on the Legendre recurrence
//! and cached per order.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Integral of `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Shared 16-point rule used by the adaptive integrator.
pub fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

/// Shared 8-point rule.
pub fn gl8() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(8))
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

/// Adaptive bisection with a 16-point Gauss-Legendre panel rule.
///
/// A panel is accepted when the one-panel and two-half-panel estimates agree
/// within `max(abs_tol, rel_tol * |running total|)` scaled by the panel's share
/// of the interval.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> QuadResult {
    const MAX_DEPTH: u32 = 48;
    const MAX_PANELS: usize = 20_000;
    let rule = gl16();
    let total_len = (b - a).abs();
    if total_len == 0.0 {
        return QuadResult {
            value: 0.0,
            error: 0.0,
            evals: 0,
        };
    }
    let whole = rule.integrate(&mut f, a, b);
    let mut evals = 16;
    // (a, b, estimate, depth)
    let mut stack = vec![(a, b, whole, 0u32)];
    let mut value: f64 = 0.0;
    let mut error = 0.0;
    let scale_hint = whole.abs();
    let mut panels = 0usize;
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(&mut f, lo, mid);
        let right = rule.integrate(&mut f, mid, hi);
        evals += 32;
        panels += 1;
        let refined = left + right;
        let diff = (refined - est).abs();
        let share = (hi - lo).abs() / total_len;
        let tol = abs_tol.max(rel_tol * scale_hint.max(value.abs())) * share;
        if diff <= tol || depth >= MAX_DEPTH || panels >= MAX_PANELS || !diff.is_finite() {
            value += refined;
            error += diff;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    QuadResult {
        value,
        error,
        evals,
    }
}

/// Integral over [a, inf) via s = a + u/(1-u), u in [0, 1).
pub fn adaptive_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> QuadResult {
    adaptive(
        |u| {
            if u >= 1.0 {
                return 0.0;
            }
            let one_minus = 1.0 - u;
            let s = a + u / one_minus;
            let v = f(s) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_rule_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 8, 16] {
            let rule = GaussLegendre::new(n);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14, "n={n}");
            // degree 2n-1 monomial on [0, 1]
            let deg = 2 * n - 1;
            let v = rule.integrate(|x| x.powi(deg as i32), 0.0, 1.0);
            assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n={n} v={v}");
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        // int_0^1 x^{-1/2} dx = 2
        let r = adaptive(|x| if x > 0.0 { x.powf(-0.5) } else { 0.0 }, 0.0, 1.0, 1e-12, 1e-12);
        assert!((r.value - 2.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn semi_infinite_exponential() {
        let r = adaptive_semi_infinite(|s| (-s).exp(), 0.0, 1e-14, 1e-13);
        assert!((r.value - 1.0).abs() < 1e-12, "{r:?}");
        let r = adaptive_semi_infinite(|s| s * (-s).exp(), 2.0, 1e-14, 1e-13);
        assert!((r.value - 3.0 * (-2.0f64).exp()).abs() < 1e-12, "{r:?}");
    }
}
