//! Bare and improved on-shell actions.
//!
//! The bare action `I = ∫ (q̇²/2 - V) dt` grows linearly with `t_f` along
//! trajectories that escape to infinity, and its boundary variation
//! `p(t_f) δq` stays finite. Subtracting the Hamilton-Jacobi counterterm at
//! the final time gives `Γ = I - S(q_f, t_f)`, which converges, and the
//! variation `(p - ∂S/∂q) δq` decays like `1/t_f`.
//!
//! The counterterm is subtracted at `t_f` only. `S(q, t)` blows up as
//! `t → 0` at fixed `q`, while `δq(0) = 0` means the initial term carries
//! no variation; dropping it shifts `Γ` by a constant of the same kind as
//! `c0`. Every [`ActionReport`] records this convention.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::counterterm::{Counterterm, CountertermMethod, CountertermScheme};
use crate::dynamics::{solve_bvp, BoundarySpec, BoundaryTarget, BvpTolerance, Trajectory};
use crate::error::{Error, Result};
use crate::numerics::{linear_fit, richardson_inverse};
use crate::potential::Potential;
use crate::report::{format_float, write_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryConvention {
    /// `Γ = I - S|_{t_f}`; the `t = 0` term is absorbed into `c0`.
    FinalTimeOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionReport {
    pub t_f: f64,
    pub q_f: f64,
    pub p_f: f64,
    pub energy: f64,
    pub i_bulk: f64,
    pub s_boundary: f64,
    pub gamma: f64,
    /// `p(t_f) - ∂S/∂q` at the final point.
    pub variation_residual: f64,
    pub hbar: f64,
    /// Leading saddle-point estimate `ln Z = -Γ/ħ`.
    pub log_z: f64,
    pub counterterm_method: CountertermMethod,
    pub c0: f64,
    pub boundary_convention: BoundaryConvention,
}

/// `∫₀^{t_f} (p²/2 - V(q)) dt` over the trajectory samples.
///
/// Uses the endpoint-corrected trapezoid rule with `dL/dt = 2 p F(q)`
/// (valid on shell), which is fourth order in the sample spacing.
pub fn onshell_action(pot: &Potential, traj: &Trajectory) -> Result<f64> {
    let e = traj.energy();
    let allowed = 1e-6 * e.abs().max(1e-300);
    let mut lagrangian = Vec::with_capacity(traj.samples().len());
    for s in traj.samples() {
        let v = pot.value(s.q)?;
        let h = 0.5 * s.p * s.p + v;
        if (h - e).abs() > allowed {
            return Err(Error::InconsistentTrajectory(format!(
                "energy {h} at t = {} differs from stored {e}",
                s.t
            )));
        }
        let f = pot.force(s.q)?;
        lagrangian.push((0.5 * s.p * s.p - v, 2.0 * s.p * f));
    }
    let total = traj
        .samples()
        .windows(2)
        .zip(lagrangian.windows(2))
        .map(|(s, l)| {
            let h = s[1].t - s[0].t;
            0.5 * h * (l[0].0 + l[1].0) + h * h / 12.0 * (l[0].1 - l[1].1)
        })
        .sum();
    Ok(total)
}

/// Bare action minus the counterterm at the final point.
pub fn improved_action(
    pot: &Potential,
    traj: &Trajectory,
    ct: &Counterterm,
    hbar: f64,
) -> Result<ActionReport> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidInput(format!("hbar must be > 0, got {hbar}")));
    }
    let last = traj.last();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs());
    if !close(ct.q, last.q) || !close(ct.t, last.t) {
        return Err(Error::MismatchedEvaluationPoint {
            ct_q: ct.q,
            ct_t: ct.t,
            q_f: last.q,
            t_f: last.t,
        });
    }
    let i_bulk = onshell_action(pot, traj)?;
    let gamma = i_bulk - ct.value;
    Ok(ActionReport {
        t_f: last.t,
        q_f: last.q,
        p_f: last.p,
        energy: traj.energy(),
        i_bulk,
        s_boundary: ct.value,
        gamma,
        variation_residual: last.p - ct.ds_dq,
        hbar,
        log_z: -gamma / hbar,
        counterterm_method: ct.method,
        c0: ct.c0,
        boundary_convention: BoundaryConvention::FinalTimeOnly,
    })
}

/// On-shell variation of the bare action, `q̇ δq` at `t_f`.
pub fn bare_variation_boundary_term(traj: &Trajectory, delta_q_f: f64) -> f64 {
    traj.last().p * delta_q_f
}

/// On-shell variation of the improved action, `(q̇ - ∂S/∂q) δq` at `t_f`.
pub fn improved_variation_boundary_term(
    traj: &Trajectory,
    ct: &Counterterm,
    delta_q_f: f64,
) -> f64 {
    (traj.last().p - ct.ds_dq) * delta_q_f
}

/// Admissible endpoint variation `δq = q_f ε Δq` with `ε = 1/t_f`.
pub fn epsilon_scaled_variation(traj: &Trajectory, delta_q: f64) -> f64 {
    let last = traj.last();
    last.q * delta_q / last.t
}

/// Endpoint data after the canonical map `Q = 1/q`, `P = -p q²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanonicalEndpoint {
    pub q_transformed: f64,
    pub p_transformed: f64,
}

/// Transformed endpoint: `Q → 0` while `|P|` grows like `v³ t²`, so the
/// transformed boundary term `Q̇ δQ` becomes `0 · ∞`.
pub fn canonical_transform_diagnostic(traj: &Trajectory) -> CanonicalEndpoint {
    let last = traj.last();
    CanonicalEndpoint {
        q_transformed: 1.0 / last.q,
        p_transformed: -last.p * last.q * last.q,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceDiagnostic {
    pub t_f_grid: Vec<f64>,
    pub i_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub variation_residuals: Vec<f64>,
    /// Least-squares slope of `I` against `t_f`.
    pub i_slope_fit: f64,
    pub i_fit_rms: f64,
    /// Pairwise Richardson estimates of `lim Γ` assuming a `1/t_f` tail.
    pub gamma_richardson: Vec<f64>,
    pub gamma_limit: f64,
    /// Log-log slope of `|p - ∂S/∂q|` against `t_f`.
    pub variation_exponent_fit: f64,
    pub variation_fit_rms: f64,
}

#[derive(Debug, Clone)]
pub struct DivergenceScan {
    pub reports: Vec<ActionReport>,
    pub diagnostic: DivergenceDiagnostic,
}

impl DivergenceScan {
    /// CSV with header `t_f,I,S_tf,Gamma,var_residual,logZ`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let rows: Vec<Vec<String>> = self
            .reports
            .iter()
            .map(|r| {
                [
                    r.t_f,
                    r.i_bulk,
                    r.s_boundary,
                    r.gamma,
                    r.variation_residual,
                    r.log_z,
                ]
                .into_iter()
                .map(format_float)
                .collect()
            })
            .collect();
        write_csv(
            out,
            &["t_f", "I", "S_tf", "Gamma", "var_residual", "logZ"],
            &rows,
        )
    }

    pub fn summary_json(&self) -> serde_json::Value {
        let d = &self.diagnostic;
        serde_json::json!({
            "i_slope_fit": d.i_slope_fit,
            "i_fit_rms": d.i_fit_rms,
            "gamma_limit": d.gamma_limit,
            "gamma_richardson": d.gamma_richardson,
            "variation_exponent_fit": d.variation_exponent_fit,
            "variation_fit_rms": d.variation_fit_rms,
            "t_f_grid": d.t_f_grid,
            "boundary_convention": BoundaryConvention::FinalTimeOnly,
        })
    }
}

/// Solves the fixed-velocity boundary problem at every `t_f` in the grid
/// and evaluates bare and improved actions. Grid points run in parallel.
///
/// `family` supplies `q_i` and the velocity target; its `t_f` is ignored.
pub fn divergence_scan(
    pot: &Potential,
    family: &BoundarySpec,
    t_f_grid: &[f64],
    scheme: &CountertermScheme,
    tol: impl Into<BvpTolerance>,
    hbar: f64,
) -> Result<DivergenceScan> {
    let tol = tol.into();
    if !matches!(family.target, BoundaryTarget::AsymptoticVelocity { .. }) {
        return Err(Error::InvalidInput(
            "divergence scans need a velocity target".into(),
        ));
    }
    if t_f_grid.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "scan grid needs at least 4 points, got {}",
            t_f_grid.len()
        )));
    }
    if t_f_grid.windows(2).any(|w| w[1] <= w[0]) || t_f_grid[0] <= 0.0 {
        return Err(Error::InvalidInput(
            "scan grid must be positive and ascending".into(),
        ));
    }

    let reports = t_f_grid
        .par_iter()
        .map(|&t_f| {
            let point = || -> Result<ActionReport> {
                let boundary = BoundarySpec { t_f, ..*family };
                let traj = solve_bvp(pot, &boundary, tol)?;
                let last = traj.last();
                let ct = scheme.evaluate(pot, last.q, last.t)?;
                improved_action(pot, &traj, &ct, hbar)
            };
            point().map_err(|e| Error::ScanPoint {
                t_f,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let i_values: Vec<f64> = reports.iter().map(|r| r.i_bulk).collect();
    let gamma_values: Vec<f64> = reports.iter().map(|r| r.gamma).collect();
    let variation_residuals: Vec<f64> = reports.iter().map(|r| r.variation_residual).collect();

    let i_fit = linear_fit(t_f_grid, &i_values);
    let gamma_richardson = richardson_inverse(t_f_grid, &gamma_values);
    let gamma_limit = *gamma_richardson.last().expect("grid has >= 4 points");
    let log_t: Vec<f64> = t_f_grid.iter().map(|t| t.ln()).collect();
    let log_r: Vec<f64> = variation_residuals.iter().map(|r| r.abs().ln()).collect();
    let var_fit = if log_r.iter().all(|x| x.is_finite()) {
        linear_fit(&log_t, &log_r)
    } else {
        // an exactly vanishing residual has no exponent
        crate::numerics::LinearFit {
            slope: f64::NAN,
            intercept: f64::NAN,
            rms_residual: f64::NAN,
        }
    };

    Ok(DivergenceScan {
        reports,
        diagnostic: DivergenceDiagnostic {
            t_f_grid: t_f_grid.to_vec(),
            i_values,
            gamma_values,
            variation_residuals,
            i_slope_fit: i_fit.slope,
            i_fit_rms: i_fit.rms_residual,
            gamma_richardson,
            gamma_limit,
            variation_exponent_fit: var_fit.slope,
            variation_fit_rms: var_fit.rms_residual,
        },
    })
}
