//! Potentials on the half-line `q > 0` and the half-binding check.
//!
//! A half-binding potential is positive, decreases monotonically, blows up
//! at the origin and decays faster than `1/q` at large `q`: bound on one
//! side, free on the other.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default lower guard for positions.
pub const DEFAULT_DOMAIN_MIN: f64 = 1e-12;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A potential supplied as a pair of closures for `V` and `V'`.
#[derive(Clone)]
pub struct UserPotential {
    name: String,
    value: ScalarFn,
    derivative: ScalarFn,
}

impl UserPotential {
    pub fn new<V, D>(name: impl Into<String>, value: V, derivative: D) -> Self
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            value: Arc::new(value),
            derivative: Arc::new(derivative),
        }
    }

    /// Builds a potential from the named registry.
    ///
    /// | name            | V(q)              | params          |
    /// |-----------------|-------------------|-----------------|
    /// | `zero`          | 0                 | none            |
    /// | `constant`      | c                 | `[c]`           |
    /// | `inverse_linear`| λ / q             | `[λ]`           |
    /// | `quadratic`     | λ q²              | `[λ]`           |
    /// | `exponential`   | λ e^{-q/ℓ} / q²   | `[λ, ℓ]`        |
    pub fn from_registry(name: &str, params: &[f64]) -> Result<Self> {
        let want = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!(
                    "potential `{name}` takes {n} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let pot = match name {
            "zero" => {
                want(0)?;
                Self::new(name, |_| 0.0, |_| 0.0)
            }
            "constant" => {
                want(1)?;
                let c = params[0];
                Self::new(name, move |_| c, |_| 0.0)
            }
            "inverse_linear" => {
                want(1)?;
                let l = params[0];
                Self::new(name, move |q| l / q, move |q| -l / (q * q))
            }
            "quadratic" => {
                want(1)?;
                let l = params[0];
                Self::new(name, move |q| l * q * q, move |q| 2.0 * l * q)
            }
            "exponential" => {
                want(2)?;
                let (l, range) = (params[0], params[1]);
                if range <= 0.0 {
                    return Err(Error::InvalidInput("exponential range must be > 0".into()));
                }
                Self::new(
                    name,
                    move |q| l * (-q / range).exp() / (q * q),
                    move |q| -l * (-q / range).exp() * (1.0 / range + 2.0 / q) / (q * q),
                )
            }
            other => {
                return Err(Error::InvalidInput(format!("unknown potential `{other}`")));
            }
        };
        Ok(pot)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for UserPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UserPotential")
            .field("name", &self.name)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum PotentialKind {
    /// `λ / q²`
    InverseSquare {
        strength: f64,
    },
    /// `λ / q^a` with `a > 1`
    InversePower {
        strength: f64,
        exponent: f64,
    },
    UserDefined(UserPotential),
}

#[derive(Debug, Clone)]
pub struct Potential {
    kind: PotentialKind,
    domain_min: f64,
}

impl Potential {
    /// The canonical `1/q²` potential.
    pub fn inverse_square() -> Self {
        Self {
            kind: PotentialKind::InverseSquare { strength: 1.0 },
            domain_min: DEFAULT_DOMAIN_MIN,
        }
    }

    pub fn inverse_square_with_strength(strength: f64) -> Result<Self> {
        if !(strength > 0.0 && strength.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "strength must be > 0, got {strength}"
            )));
        }
        Ok(Self {
            kind: PotentialKind::InverseSquare { strength },
            domain_min: DEFAULT_DOMAIN_MIN,
        })
    }

    pub fn inverse_power(strength: f64, exponent: f64) -> Result<Self> {
        if !(strength > 0.0 && strength.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "strength must be > 0, got {strength}"
            )));
        }
        if !(exponent > 1.0 && exponent.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "exponent must be > 1, got {exponent}"
            )));
        }
        Ok(Self {
            kind: PotentialKind::InversePower { strength, exponent },
            domain_min: DEFAULT_DOMAIN_MIN,
        })
    }

    pub fn user(user: UserPotential) -> Self {
        Self {
            kind: PotentialKind::UserDefined(user),
            domain_min: DEFAULT_DOMAIN_MIN,
        }
    }

    pub fn with_domain_min(mut self, domain_min: f64) -> Result<Self> {
        if !(domain_min > 0.0 && domain_min.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "domain_min must be > 0, got {domain_min}"
            )));
        }
        self.domain_min = domain_min;
        Ok(self)
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn domain_min(&self) -> f64 {
        self.domain_min
    }

    /// True for the exact `1/q²` potential that the closed-form counterterm covers.
    pub fn is_unit_inverse_square(&self) -> bool {
        matches!(self.kind, PotentialKind::InverseSquare { strength } if strength == 1.0)
    }

    pub fn label(&self) -> String {
        match &self.kind {
            PotentialKind::InverseSquare { strength } => {
                format!("inverse_square(strength={strength})")
            }
            PotentialKind::InversePower { strength, exponent } => {
                format!("inverse_power(strength={strength}, exponent={exponent})")
            }
            PotentialKind::UserDefined(u) => format!("user({})", u.name),
        }
    }

    fn check(&self, q: f64) -> Result<()> {
        if q >= self.domain_min && q.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain {
                q,
                domain_min: self.domain_min,
            })
        }
    }

    /// `V(q)` without the domain check; callers guarantee `q >= domain_min`.
    pub(crate) fn value_unchecked(&self, q: f64) -> f64 {
        match &self.kind {
            PotentialKind::InverseSquare { strength } => strength / (q * q),
            PotentialKind::InversePower { strength, exponent } => strength * q.powf(-exponent),
            PotentialKind::UserDefined(u) => (u.value)(q),
        }
    }

    pub(crate) fn derivative_unchecked(&self, q: f64) -> f64 {
        match &self.kind {
            PotentialKind::InverseSquare { strength } => -2.0 * strength / (q * q * q),
            PotentialKind::InversePower { strength, exponent } => {
                -exponent * strength * q.powf(-exponent - 1.0)
            }
            PotentialKind::UserDefined(u) => (u.derivative)(q),
        }
    }

    /// `V(a) - V(a + delta)` for `delta >= 0`, free of cancellation.
    ///
    /// Closed forms for the built-in families; for user potentials a short
    /// Gauss-Legendre integral of `-V'` when `delta` is small against `a`.
    pub(crate) fn drop_by(&self, a: f64, delta: f64) -> f64 {
        let r = delta / a;
        match &self.kind {
            // 1 - (1+r)^-2 = r(2+r)/(1+r)^2
            PotentialKind::InverseSquare { strength } => {
                strength / (a * a) * r * (2.0 + r) / ((1.0 + r) * (1.0 + r))
            }
            PotentialKind::InversePower { strength, exponent } => {
                -strength * a.powf(-exponent) * (-exponent * r.ln_1p()).exp_m1()
            }
            PotentialKind::UserDefined(u) => {
                if r > 0.1 {
                    (u.value)(a) - (u.value)(a + delta)
                } else {
                    let (nodes, weights) = short_rule();
                    let half = 0.5 * delta;
                    -half
                        * nodes
                            .iter()
                            .zip(weights)
                            .map(|(x, w)| w * (u.derivative)(a + half * (1.0 + x)))
                            .sum::<f64>()
                }
            }
        }
    }

    /// `V(q)`.
    pub fn value(&self, q: f64) -> Result<f64> {
        self.check(q)?;
        Ok(self.value_unchecked(q))
    }

    /// `-V'(q)`.
    pub fn force(&self, q: f64) -> Result<f64> {
        self.check(q)?;
        Ok(-self.derivative_unchecked(q))
    }

    /// Position where `V(q) = energy`, assuming `V` decreases monotonically.
    ///
    /// Closed form for the built-in families; bracketed root search in
    /// `ln q` between `domain_min` and `q_max` otherwise.
    pub fn turning_point(&self, energy: f64, q_max: f64) -> Result<f64> {
        if !(energy > 0.0) {
            return Err(Error::InvalidInput(format!(
                "turning point needs positive energy, got {energy}"
            )));
        }
        let q = match &self.kind {
            PotentialKind::InverseSquare { strength } => (strength / energy).sqrt(),
            PotentialKind::InversePower { strength, exponent } => {
                (strength / energy).powf(1.0 / exponent)
            }
            PotentialKind::UserDefined(_) => {
                let lo = self.domain_min.ln();
                let hi = q_max.ln();
                let s = crate::numerics::brent(
                    |s| Ok(self.value_unchecked(s.exp()) - energy),
                    lo,
                    hi,
                    crate::numerics::RootOptions {
                        x_abs: 1e-15,
                        x_rel: 0.0,
                        ..Default::default()
                    },
                )
                .map_err(|_| {
                    Error::Unreachable(format!(
                        "no turning point for E = {energy} in [{}, {q_max}]",
                        self.domain_min
                    ))
                })?;
                s.exp()
            }
        };
        self.check(q)?;
        Ok(q)
    }
}

fn short_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: std::sync::OnceLock<(Vec<f64>, Vec<f64>)> = std::sync::OnceLock::new();
    RULE.get_or_init(|| crate::numerics::gauss_legendre_rule(12))
}

/// Free function form of [`Potential::value`].
pub fn eval_potential(pot: &Potential, q: f64) -> Result<f64> {
    pot.value(q)
}

/// Free function form of [`Potential::force`].
pub fn eval_force(pot: &Potential, q: f64) -> Result<f64> {
    pot.force(q)
}

/// Sampled evidence for (or against) the half-binding property.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfBindingReport {
    pub positive: bool,
    pub monotone_decreasing: bool,
    pub decays_faster_than_1_over_q: bool,
    pub binds_at_origin: bool,
    pub grid_used: Vec<f64>,
    pub verdict: bool,
}

/// Checks the half-binding conditions on a geometric grid of `n_samples`
/// points spanning `[q_lo, q_hi]`.
///
/// * positivity and strict monotone decrease are checked sample by sample;
/// * decay faster than `1/q` means `q V(q)` strictly decreases across the
///   top decade of the grid (the last two samples when the grid is coarser
///   than a decade);
/// * binding means `V(q_lo) >= min(10³, q_hi / q_lo) · V(q_hi)`, so a range
///   of three or more decades demands a factor of 10³.
pub fn check_half_binding(
    pot: &Potential,
    q_lo: f64,
    q_hi: f64,
    n_samples: usize,
) -> Result<HalfBindingReport> {
    if !(q_lo >= pot.domain_min && q_lo < q_hi && q_hi.is_finite()) {
        return Err(Error::Domain {
            q: q_lo,
            domain_min: pot.domain_min,
        });
    }
    if n_samples < 8 {
        return Err(Error::InvalidInput(format!(
            "need at least 8 samples, got {n_samples}"
        )));
    }

    let ratio = (q_hi / q_lo).ln();
    let grid: Vec<f64> = (0..n_samples)
        .map(|i| {
            if i + 1 == n_samples {
                q_hi
            } else {
                q_lo * (ratio * i as f64 / (n_samples - 1) as f64).exp()
            }
        })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&q| pot.value_unchecked(q)).collect();

    let positive = values.iter().all(|v| *v > 0.0 && v.is_finite());
    let monotone_decreasing = values.windows(2).all(|w| w[1] < w[0]);

    let top_start = q_hi / 10.0;
    let mut top: Vec<f64> = grid
        .iter()
        .zip(&values)
        .filter(|(q, _)| **q >= top_start * (1.0 - 1e-12))
        .map(|(q, v)| q * v)
        .collect();
    // coarse grids may put a single point in the top decade
    if top.len() < 2 {
        top = grid[n_samples - 2..]
            .iter()
            .zip(&values[n_samples - 2..])
            .map(|(q, v)| q * v)
            .collect();
    }
    let decays_faster_than_1_over_q =
        top.len() >= 2 && top.windows(2).all(|w| w[1] < w[0] * (1.0 - 1e-12)) && top[0] > 0.0;

    let threshold = (q_hi / q_lo).min(1e3);
    let v_lo = values[0];
    let v_hi = values[n_samples - 1];
    let binds_at_origin = v_lo.is_finite() && v_lo > 0.0 && v_lo >= threshold * v_hi;

    let verdict = positive && monotone_decreasing && decays_faster_than_1_over_q && binds_at_origin;
    Ok(HalfBindingReport {
        positive,
        monotone_decreasing,
        decays_faster_than_1_over_q,
        binds_at_origin,
        grid_used: grid,
        verdict,
    })
}
