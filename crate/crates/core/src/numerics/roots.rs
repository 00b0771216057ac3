//! Bracketed scalar root finding and unimodal maximization.

use crate::error::{Error, Result};

/// Stopping rules for [`brent`].
#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Absolute bracket width at which iteration stops.
    pub x_abs: f64,
    /// Relative bracket width at which iteration stops.
    pub x_rel: f64,
    /// Stop as soon as `|f(x)| <= f_abs`.
    pub f_abs: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            x_abs: 0.0,
            x_rel: 4.0 * f64::EPSILON,
            f_abs: 0.0,
            max_iter: 200,
        }
    }
}

/// Brent's method on a sign-changing bracket `[a, b]`.
///
/// Combines bisection with secant and inverse quadratic interpolation steps;
/// the bracket always keeps a sign change so convergence is guaranteed.
/// `f` may fail, in which case the error is propagated.
pub fn brent<F>(mut f: F, a: f64, b: f64, opts: RootOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut a = a;
    let mut b = b;
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 || fa.abs() <= opts.f_abs {
        return Ok(a);
    }
    if fb == 0.0 || fb.abs() <= opts.f_abs {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Unreachable(format!(
            "no sign change on [{a}, {b}] (f = {fa:e}, {fb:e})"
        )));
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..opts.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * opts.x_abs.max(opts.x_rel * b.abs());
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 || fb.abs() <= opts.f_abs {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        context: format!("brent root near {b}"),
    })
}

/// Golden-section search for the maximum of a unimodal function on [a, b].
///
/// Returns `(x_max, f(x_max))`.
pub fn golden_max<F>(mut f: F, a: f64, b: f64, x_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut iterations = 0;
    while (b - a) > x_tol {
        iterations += 1;
        if iterations > 400 {
            return Err(Error::NoConvergence {
                iterations,
                context: "golden-section search".into(),
            });
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 > f2 { (x1, f1) } else { (x2, f2) })
}
