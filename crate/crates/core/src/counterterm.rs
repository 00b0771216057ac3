//! Hamilton-Jacobi counterterms `S(q, t)`.
//!
//! For `V = 1/q²` the complete integral is known in closed form and the
//! energy can be eliminated analytically (the enveloping solution). For
//! other half-binding potentials the same envelope is built numerically
//! from the separated complete integral
//!
//! ```text
//! S(q, t; E) = -E t + ∫_{q_tp(E)}^{q} sqrt(2 (E - V(y))) dy
//! ```
//!
//! with `E*` fixed by the time-of-flight condition `∂S/∂E = 0`. The two
//! routes differ only by an additive constant (the `c0` convention).

use std::f64::consts::SQRT_2;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{brent, golden_max, integrate, RootOptions};
use crate::potential::Potential;
use crate::report::{format_float, write_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountertermMethod {
    AnalyticInverseSquare,
    NumericEnvelope,
    AsymptoticLeading,
}

impl CountertermMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::AnalyticInverseSquare => "analytic_inverse_square",
            Self::NumericEnvelope => "numeric_envelope",
            Self::AsymptoticLeading => "asymptotic_leading",
        }
    }
}

/// A counterterm value at `(q, t)` with its partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Counterterm {
    pub q: f64,
    pub t: f64,
    pub value: f64,
    pub ds_dq: f64,
    /// Equals `-E*` on the Hamilton-Jacobi surface.
    pub ds_dt: f64,
    pub envelope_energy: f64,
    pub c0: f64,
    pub method: CountertermMethod,
    /// Set when `(q, t)` sits on the double-root edge `q⁴ = 8t²`.
    pub at_domain_boundary: bool,
}

/// Roots of `Δ² - Δ + 2t²/q⁴ = 0` as `(Δ₊, Δ₋)`, computed without
/// cancellation. Errors if `q⁴ < 8t²`.
fn delta_roots(q: f64, t: f64) -> Result<(f64, f64, bool)> {
    if !(t > 0.0 && q > 0.0 && t.is_finite() && q.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "need q > 0 and t > 0, got q = {q}, t = {t}"
        )));
    }
    let x = 8.0 * t * t / (q * q * q * q);
    if x > 1.0 + 4.0 * f64::EPSILON {
        return Err(Error::EnvelopeDomain {
            q,
            t,
            reason: format!("q⁴ >= 8t² is violated (8t²/q⁴ = {x})"),
        });
    }
    let boundary = x >= 1.0 - 4.0 * f64::EPSILON;
    let root = (1.0 - x).max(0.0).sqrt();
    let plus = 0.5 * (1.0 + root);
    let minus = 0.5 * x / (1.0 + root);
    Ok((plus, minus, boundary))
}

/// `(Δ₊, Δ₋)` with `E* = q² Δ₊ / (2t²)`; requires `q⁴ >= 8t²`.
pub fn envelope_roots(q: f64, t: f64) -> Result<(f64, f64)> {
    delta_roots(q, t).map(|(plus, minus, _)| (plus, minus))
}

/// The complete integral for `V = 1/q²`:
/// `c0 - E t + sqrt(2(E q² - 1)) + √2 atan(1/sqrt(E q² - 1))`.
pub fn complete_integral_inverse_square(q: f64, t: f64, energy: f64, c0: f64) -> Result<f64> {
    let w2 = energy * q * q - 1.0;
    if !(w2 > 0.0) {
        return Err(Error::Domain {
            q,
            domain_min: (1.0 / energy).sqrt(),
        });
    }
    let w = w2.sqrt();
    Ok(c0 - energy * t + SQRT_2 * w + SQRT_2 * (1.0 / w).atan())
}

/// The stationary energy `E* = q² Δ₊ / (2t²)` of the complete integral.
pub fn envelope_energy_inverse_square(q: f64, t: f64) -> Result<f64> {
    let (plus, _, _) = delta_roots(q, t)?;
    Ok(q * q * plus / (2.0 * t * t))
}

/// The enveloping solution for `V = 1/q²` with analytic partials.
pub fn counterterm_inverse_square(q: f64, t: f64, c0: f64) -> Result<Counterterm> {
    let (plus, _, boundary) = delta_roots(q, t)?;
    let x = 8.0 * t * t / (q * q * q * q);
    let energy = q * q * plus / (2.0 * t * t);
    let w2 = q * q * q * q * plus / (2.0 * t * t) - 1.0;
    let w = w2.sqrt();
    let value = q * q / (2.0 * t) * ((4.0 * plus - x).max(0.0).sqrt() - plus)
        + SQRT_2 * (1.0 / w).atan()
        + c0;
    Ok(Counterterm {
        q,
        t,
        value,
        // equal to √2·w/q; this form keeps the HJ defect at a few ulps of E*
        ds_dq: (2.0 * (energy - 1.0 / (q * q))).sqrt(),
        ds_dt: -energy,
        envelope_energy: energy,
        c0,
        method: CountertermMethod::AnalyticInverseSquare,
        at_domain_boundary: boundary,
    })
}

/// Leading large-`q` behaviour `S = q²/(2t)`: the free-particle principal function.
pub fn asymptotic_counterterm(q: f64, t: f64) -> Result<Counterterm> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("t must be > 0, got {t}")));
    }
    Ok(Counterterm {
        q,
        t,
        value: q * q / (2.0 * t),
        ds_dq: q / t,
        ds_dt: -q * q / (2.0 * t * t),
        envelope_energy: q * q / (2.0 * t * t),
        c0: 0.0,
        method: CountertermMethod::AsymptoticLeading,
        at_domain_boundary: false,
    })
}

/// Time of flight and reduced action from the turning point to `q` at energy `E`.
///
/// Both use `y = q_tp + u²`, which turns the inverse-square-root endpoint
/// singularity of the time of flight into a smooth integrand. `E - V(y)` is
/// written as `V(q_tp) - V(y)` so that it vanishes exactly at `u = 0`.
struct Separated<'a> {
    pot: &'a Potential,
    q: f64,
    rel_tol: f64,
}

impl Separated<'_> {
    fn substitution(&self, energy: f64) -> Result<(f64, f64, f64)> {
        let q_tp = self.pot.turning_point(energy, self.q)?;
        let slope = -self.pot.derivative_unchecked(q_tp);
        Ok((q_tp, (self.q - q_tp).max(0.0).sqrt(), slope))
    }

    fn time_of_flight(&self, energy: f64, abs_tol: f64) -> Result<f64> {
        let (q_tp, upper, slope) = self.substitution(energy)?;
        let limit = 2.0 / (2.0 * slope).sqrt();
        integrate(
            |u| {
                let d = self.pot.drop_by(q_tp, u * u);
                if d <= 0.0 {
                    limit
                } else {
                    2.0 * u / (2.0 * d).sqrt()
                }
            },
            0.0,
            upper,
            abs_tol,
            self.rel_tol,
        )
        .map(|r| r.value)
    }

    fn reduced_action(&self, energy: f64, abs_tol: f64) -> Result<f64> {
        let (q_tp, upper, _) = self.substitution(energy)?;
        integrate(
            |u| {
                let d = self.pot.drop_by(q_tp, u * u);
                2.0 * u * (2.0 * d.max(0.0)).sqrt()
            },
            0.0,
            upper,
            abs_tol,
            self.rel_tol,
        )
        .map(|r| r.value)
    }
}

/// Numerical enveloping solution for a general half-binding potential.
///
/// The time of flight `T(E)` vanishes at `E = V(q)`, rises to a maximum
/// and decays again; the physical branch is the high-energy root of
/// `T(E) = t`, beyond the maximum. No root exists when `t` exceeds the
/// maximum (for `1/q²` this is exactly `q⁴ < 8t²`).
///
/// The lower quadrature limit is the turning point, so for `1/q²` the
/// result sits `√2·π/2` below [`counterterm_inverse_square`] at equal `c0`.
pub fn counterterm_general(
    pot: &Potential,
    q: f64,
    t: f64,
    c0: f64,
    tol: f64,
) -> Result<Counterterm> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("t must be > 0, got {t}")));
    }
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(Error::InvalidInput(format!(
            "tolerance must lie in (0, 1e-2], got {tol}"
        )));
    }
    let v_q = pot.value(q)?;
    if !(v_q > 0.0) {
        return Err(Error::EnvelopeDomain {
            q,
            t,
            reason: format!("V(q) = {v_q} leaves no turning point"),
        });
    }
    let quad_tol = (1e-3 * tol).max(1e-14);
    let sep = Separated {
        pot,
        q,
        rel_tol: quad_tol,
    };
    let tof = |excess: f64| sep.time_of_flight(v_q + excess, quad_tol * t);

    // bracket the decreasing branch: T(x_hi) < t and still falling
    let mut x_hi = (q * q / (t * t)).max(4.0 * v_q);
    let mut expansions = 0;
    loop {
        let here = tof(x_hi)?;
        if here < t && here < tof(0.25 * x_hi)? {
            break;
        }
        expansions += 1;
        if expansions > 60 {
            return Err(Error::EnvelopeDomain {
                q,
                t,
                reason: "time of flight does not decay at high energy".into(),
            });
        }
        x_hi *= 4.0;
    }

    let s_lo = (v_q * 1e-8).ln();
    let (s_peak, t_max) = golden_max(|s| tof(s.exp()), s_lo, x_hi.ln(), 1e-7)?;
    let x_peak = s_peak.exp();
    let (excess, boundary) = if t_max < t {
        if t_max < t * (1.0 - 1e-9) {
            return Err(Error::EnvelopeDomain {
                q,
                t,
                reason: format!("t exceeds the maximal time of flight {t_max}"),
            });
        }
        (x_peak, true)
    } else {
        let x = brent(
            |x| Ok(tof(x)? - t),
            x_peak,
            x_hi,
            RootOptions {
                x_abs: 0.0,
                x_rel: 1e-15,
                f_abs: 0.0,
                max_iter: 200,
            },
        )?;
        (x, false)
    };

    let energy = v_q + excess;
    let action = sep.reduced_action(energy, quad_tol * (energy * t).max(1.0))?;
    Ok(Counterterm {
        q,
        t,
        value: -energy * t + action + c0,
        ds_dq: (2.0 * excess).sqrt(),
        ds_dt: -energy,
        envelope_energy: energy,
        c0,
        method: CountertermMethod::NumericEnvelope,
        at_domain_boundary: boundary,
    })
}

/// How [`hj_residual`] obtains `∂S/∂q` and `∂S/∂t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Partials {
    /// Use the partials stored in the counterterm.
    Analytic,
    /// Fourth-order central differences of the value with step `h` in both
    /// `q` and `t` (five-point stencil reaching `±2h`).
    CentralDifference { h: f64 },
}

/// Defect `½ (∂S/∂q)² + V(q) + ∂S/∂t` of the Hamilton-Jacobi equation.
pub fn hj_residual<F>(eval: F, pot: &Potential, q: f64, t: f64, partials: Partials) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<Counterterm>,
{
    let v = pot.value(q)?;
    let (s_q, s_t) = match partials {
        Partials::Analytic => {
            let ct = eval(q, t)?;
            (ct.ds_dq, ct.ds_dt)
        }
        Partials::CentralDifference { h } => {
            if !(h > 0.0) || q - 2.0 * h < pot.domain_min() || t - 2.0 * h <= 0.0 {
                return Err(Error::Domain {
                    q: q - 2.0 * h,
                    domain_min: pot.domain_min(),
                });
            }
            let d = |f: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
                Ok((8.0 * (f(h)? - f(-h)?) - (f(2.0 * h)? - f(-2.0 * h)?)) / (12.0 * h))
            };
            let s_q = d(&|dx| Ok(eval(q + dx, t)?.value))?;
            let s_t = d(&|dt| Ok(eval(q, t + dt)?.value))?;
            (s_q, s_t)
        }
    };
    Ok(0.5 * s_q * s_q + v + s_t)
}

/// A counterterm recipe: method, `c0` convention and tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountertermScheme {
    pub method: CountertermMethod,
    pub c0: f64,
    pub tol: f64,
}

impl CountertermScheme {
    pub fn new(method: CountertermMethod) -> Self {
        Self {
            method,
            c0: 0.0,
            tol: 1e-10,
        }
    }

    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = c0;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn evaluate(&self, pot: &Potential, q: f64, t: f64) -> Result<Counterterm> {
        match self.method {
            CountertermMethod::AnalyticInverseSquare => {
                if !pot.is_unit_inverse_square() {
                    return Err(Error::InvalidInput(format!(
                        "the closed-form counterterm needs V = 1/q², got {}",
                        pot.label()
                    )));
                }
                counterterm_inverse_square(q, t, self.c0)
            }
            CountertermMethod::NumericEnvelope => counterterm_general(pot, q, t, self.c0, self.tol),
            CountertermMethod::AsymptoticLeading => {
                let mut ct = asymptotic_counterterm(q, t)?;
                ct.value += self.c0;
                ct.c0 = self.c0;
                Ok(ct)
            }
        }
    }
}

/// CSV with header `q,t,S,dS_dq,dS_dt,E_star,method`.
pub fn write_counterterm_csv<W: Write>(out: W, rows: &[Counterterm]) -> Result<()> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|c| {
            vec![
                format_float(c.q),
                format_float(c.t),
                format_float(c.value),
                format_float(c.ds_dq),
                format_float(c.ds_dt),
                format_float(c.envelope_energy),
                c.method.as_str().to_string(),
            ]
        })
        .collect();
    write_csv(
        out,
        &["q", "t", "S", "dS_dq", "dS_dt", "E_star", "method"],
        &rows,
    )
}
