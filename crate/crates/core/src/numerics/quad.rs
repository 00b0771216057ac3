use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const ORDER: usize = 20;
const MAX_PANELS: usize = 4096;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Nodes are the roots of P_n found by Newton iteration from the
/// Chebyshev-like initial guess; weights follow from P_n'.
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre_rule(ORDER))
}

fn panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let sum: f64 = nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| w * f(mid + half * x))
        .sum();
    sum * half
}

/// Result of an adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

/// Adaptive Gauss-Legendre quadrature of `f` over [a, b].
///
/// Each panel is compared against the sum over its two halves; panels
/// whose disagreement exceeds their share of the tolerance are split.
/// The requested accuracy is `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let width = hi - lo;

    let whole = panel(&mut f, lo, hi);
    let mut stack = vec![(lo, hi, whole)];
    let mut value = 0.0;
    let mut error = 0.0;
    let mut panels = 0usize;
    let mut scale = whole.abs();

    while let Some((x0, x1, est)) = stack.pop() {
        let mid = 0.5 * (x0 + x1);
        let left = panel(&mut f, x0, mid);
        let right = panel(&mut f, mid, x1);
        let refined = left + right;
        let diff = (refined - est).abs();
        if !refined.is_finite() {
            return Err(Error::Quadrature {
                tol: abs_tol.max(rel_tol * scale),
                estimate: f64::INFINITY,
            });
        }
        scale = scale.max(refined.abs());
        let budget = abs_tol.max(rel_tol * scale) * (x1 - x0) / width;
        panels += 1;
        if diff <= budget || panels + stack.len() >= MAX_PANELS || (x1 - x0) < 1e-14 * width {
            value += refined;
            error += diff;
        } else {
            stack.push((mid, x1, right));
            stack.push((x0, mid, left));
        }
    }

    let target = abs_tol.max(rel_tol * value.abs());
    if !(error <= target * 10.0) {
        return Err(Error::Quadrature {
            tol: target,
            estimate: error,
        });
    }
    Ok(Quadrature {
        value: sign * value,
        error_estimate: error,
        panels,
    })
}
