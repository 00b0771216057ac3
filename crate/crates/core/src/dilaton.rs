//! Hamilton-Jacobi counterterm for two-dimensional dilaton gravity.
//!
//! For a model with kinetic function `U(X)` and potential `V(X) <= 0`,
//! ```text
//! S(X)² = -2 e^{-F(X)} ∫_{X_ref_V}^X V(y) e^{F(y)} dy,   F(X) = ∫_{X_ref_U}^X U
//! ```
//! The lower limit of the `U` integrals cancels between the two
//! exponentials. `X_ref_V` plays the role of the additive constant in the
//! point-particle counterterm. The overall `1/(8πG)` coupling is left out.

use std::fmt;
use std::io::Write;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::integrate;
use crate::report::{format_float, write_csv};

type ModelFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const GRID_INTERVALS: usize = 256;

/// Dilaton model with cached `F = ∫U` on a uniform grid.
#[derive(Clone)]
pub struct DilatonModel {
    name: String,
    u: ModelFn,
    v: ModelFn,
    x_ref_u: f64,
    x_ref_v: f64,
    domain: (f64, f64),
    grid: OnceLock<Result<FGrid>>,
}

#[derive(Debug, Clone)]
struct FGrid {
    x0: f64,
    step: f64,
    values: Vec<f64>,
}

impl fmt::Debug for DilatonModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DilatonModel")
            .field("name", &self.name)
            .field("x_ref_u", &self.x_ref_u)
            .field("x_ref_v", &self.x_ref_v)
            .field("domain", &self.domain)
            .finish()
    }
}

impl DilatonModel {
    /// Model on `domain = (lo, hi)` with both reference points at `lo`.
    pub fn new<U, V>(name: impl Into<String>, u: U, v: V, domain: (f64, f64)) -> Result<Self>
    where
        U: Fn(f64) -> f64 + Send + Sync + 'static,
        V: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInput(format!(
                "invalid dilaton domain [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            name: name.into(),
            u: Arc::new(u),
            v: Arc::new(v),
            x_ref_u: lo,
            x_ref_v: lo,
            domain,
            grid: OnceLock::new(),
        })
    }

    /// `U = -a/X`, `V = -(B/2) X^{a+b}`.
    pub fn ab_family(a: f64, b: f64, big_b: f64, domain: (f64, f64)) -> Result<Self> {
        if a != 0.0 && domain.0 <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "U = -{a}/X needs a positive domain"
            )));
        }
        let exponent = a + b;
        Self::new(
            format!("ab(a={a}, b={b}, B={big_b})"),
            move |x| if a == 0.0 { 0.0 } else { -a / x },
            move |x| -0.5 * big_b * x.powf(exponent),
            domain,
        )
    }

    /// Named catalog entries, all members of the ab-family:
    ///
    /// | name                | params    | (a, b)        |
    /// |---------------------|-----------|---------------|
    /// | `ab`                | `[a,b,B]` | given         |
    /// | `schwarzschild`     | `[B]`     | (1/2, -1/2)   |
    /// | `jackiw_teitelboim` | `[B]`     | (0, 1)        |
    /// | `witten`            | `[B]`     | (1, 0)        |
    pub fn from_catalog(name: &str, params: &[f64], domain: (f64, f64)) -> Result<Self> {
        let (a, b, big_b) = match (name, params) {
            ("ab", [a, b, big_b]) => (*a, *b, *big_b),
            ("schwarzschild", [big_b]) => (0.5, -0.5, *big_b),
            ("jackiw_teitelboim", [big_b]) => (0.0, 1.0, *big_b),
            ("witten", [big_b]) => (1.0, 0.0, *big_b),
            _ => {
                return Err(Error::InvalidInput(format!(
                    "unknown dilaton model {name:?} with {} parameters",
                    params.len()
                )))
            }
        };
        let mut model = Self::ab_family(a, b, big_b, domain)?;
        model.name = name.to_string();
        Ok(model)
    }

    pub fn with_references(mut self, x_ref_u: f64, x_ref_v: f64) -> Result<Self> {
        for x in [x_ref_u, x_ref_v] {
            if !self.contains(x) {
                return Err(Error::InvalidInput(format!(
                    "reference point {x} outside domain [{}, {}]",
                    self.domain.0, self.domain.1
                )));
            }
        }
        self.x_ref_u = x_ref_u;
        self.x_ref_v = x_ref_v;
        self.grid = OnceLock::new();
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn x_ref_u(&self) -> f64 {
        self.x_ref_u
    }

    pub fn x_ref_v(&self) -> f64 {
        self.x_ref_v
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn u(&self, x: f64) -> f64 {
        (self.u)(x)
    }

    pub fn v(&self, x: f64) -> f64 {
        (self.v)(x)
    }

    fn contains(&self, x: f64) -> bool {
        x >= self.domain.0 && x <= self.domain.1
    }

    fn grid(&self) -> Result<&FGrid> {
        self.grid
            .get_or_init(|| self.build_grid())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn build_grid(&self) -> Result<FGrid> {
        let (lo, hi) = self.domain;
        let step = (hi - lo) / GRID_INTERVALS as f64;
        let node = |k: usize| lo + step * k as f64;
        let tol = 1e-15;
        let k0 = (((self.x_ref_u - lo) / step).round() as usize).min(GRID_INTERVALS);
        let mut values = vec![0.0; GRID_INTERVALS + 1];
        values[k0] = integrate(&*self.u, self.x_ref_u, node(k0), tol, tol)?.value;
        for k in k0 + 1..=GRID_INTERVALS {
            values[k] = values[k - 1] + integrate(&*self.u, node(k - 1), node(k), tol, tol)?.value;
        }
        for k in (0..k0).rev() {
            values[k] = values[k + 1] - integrate(&*self.u, node(k), node(k + 1), tol, tol)?.value;
        }
        Ok(FGrid {
            x0: lo,
            step,
            values,
        })
    }

    /// `F(x) = ∫_{X_ref_U}^x U` from the nearest cached node.
    fn f_integral(&self, x: f64, tol: f64) -> Result<f64> {
        let g = self.grid()?;
        let k = (((x - g.x0) / g.step).round().max(0.0) as usize).min(GRID_INTERVALS);
        let xk = g.x0 + g.step * k as f64;
        Ok(g.values[k] + integrate(&*self.u, xk, x, tol, tol)?.value)
    }

    /// `S²(x)`, signed; negative values mean the model is outside its
    /// admissible range.
    fn radicand(&self, x: f64, tol: f64) -> Result<(f64, f64)> {
        let inner_tol = (1e-3 * tol).max(1e-15);
        let mut failure = None;
        let q = integrate(
            |y| match self.f_integral(y, inner_tol) {
                Ok(f) => self.v(y) * f.exp(),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            self.x_ref_v,
            x,
            1e-300,
            0.1 * tol,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let q = q?;
        let weight = -2.0 * (-self.f_integral(x, inner_tol)?).exp();
        Ok((weight * q.value, weight.abs() * q.error_estimate))
    }

    fn check_sign(&self, x: f64) -> Result<()> {
        let (a, b) = if x < self.x_ref_v {
            (x, self.x_ref_v)
        } else {
            (self.x_ref_v, x)
        };
        let n = 64;
        for k in 0..=n {
            let y = a + (b - a) * k as f64 / n as f64;
            let v = self.v(y);
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("V({y}) = {v} is not finite")));
            }
            if v > 0.0 {
                return Err(Error::NegativeRadicand {
                    x: y,
                    radicand: -2.0 * v,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DilatonCounterterm {
    pub x: f64,
    pub value: f64,
    /// `V + ½[(S²)' + S² U]`; absent when no difference step fits between
    /// `X_ref_V` and the domain edges.
    pub identity_residual: Option<f64>,
}

impl DilatonCounterterm {
    /// Boundary term with the gravitational coupling restored.
    pub fn with_coupling(&self, coupling: f64) -> f64 {
        coupling * self.value
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol <= 1e-2 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "tolerance must lie in (0, 1e-2], got {tol}"
        )))
    }
}

fn squared(model: &DilatonModel, x: f64, tol: f64) -> Result<f64> {
    if !model.contains(x) {
        return Err(Error::InvalidInput(format!(
            "X = {x} outside domain [{}, {}]",
            model.domain.0, model.domain.1
        )));
    }
    model.check_sign(x)?;
    let (r, err) = model.radicand(x, tol)?;
    if r < -(2.0 * err).max(1e-14 * r.abs()) {
        return Err(Error::NegativeRadicand { x, radicand: r });
    }
    Ok(r.max(0.0))
}

/// `S(X)`, the principal root, plus the identity residual at a default step.
pub fn dilaton_counterterm(model: &DilatonModel, x: f64, tol: f64) -> Result<DilatonCounterterm> {
    check_tol(tol)?;
    let value = squared(model, x, tol)?.sqrt();
    let (lo, hi) = model.domain;
    let h = (1e-2 * x.abs().max(1.0))
        .min(0.5 * (x - lo))
        .min(0.5 * (hi - x))
        .min(0.5 * (x - model.x_ref_v));
    let identity_residual = if h > 1e-6 * x.abs().max(1.0) {
        Some(potential_identity_residual(model, x, h, tol)?)
    } else {
        None
    };
    Ok(DilatonCounterterm {
        x,
        value,
        identity_residual,
    })
}

/// `V(X) + ½[(S²)' + S² U(X)]` with `(S²)'` from a Richardson-extrapolated
/// central difference over steps `h` and `h/2`.
pub fn potential_identity_residual(model: &DilatonModel, x: f64, h: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if !(h > 0.0) || !model.contains(x - h) || !model.contains(x + h) {
        return Err(Error::InvalidInput(format!(
            "X ± h = {x} ± {h} leaves the domain"
        )));
    }
    let s2 = |y: f64| squared(model, y, tol);
    let d = |h: f64| -> Result<f64> { Ok((s2(x + h)? - s2(x - h)?) / (2.0 * h)) };
    let derivative = (4.0 * d(0.5 * h)? - d(h)?) / 3.0;
    Ok(model.v(x) + 0.5 * (derivative + s2(x)? * model.u(x)))
}

/// CSV with header `X,S,identity_residual`; missing residuals are blank.
pub fn write_dilaton_csv<W: Write>(out: W, rows: &[DilatonCounterterm]) -> Result<()> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                format_float(r.x),
                format_float(r.value),
                r.identity_residual.map(format_float).unwrap_or_default(),
            ]
        })
        .collect();
    write_csv(out, &["X", "S", "identity_residual"], &rows)
}
