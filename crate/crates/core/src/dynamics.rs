//! Classical motion in `H = p²/2 + V(q)`: initial-value integration,
//! shooting for two-point boundary data, and the exact `1/q²` solution.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{brent, RootOptions};
use crate::potential::Potential;
use crate::report::{format_float, write_csv};

/// Minimum number of uniformly spaced output times per trajectory.
pub const DENSE_POINTS: usize = 256;
const MAX_STEPS: usize = 2_000_000;
const MAX_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub q: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryTarget {
    FinalPosition { q_f: f64 },
    AsymptoticVelocity { v: f64 },
}

/// Boundary data: start at `q_i` at `t = 0`, end at `t_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec {
    pub q_i: f64,
    pub t_f: f64,
    pub target: BoundaryTarget,
}

impl BoundarySpec {
    pub fn final_position(q_i: f64, t_f: f64, q_f: f64) -> Self {
        Self {
            q_i,
            t_f,
            target: BoundaryTarget::FinalPosition { q_f },
        }
    }

    pub fn asymptotic_velocity(q_i: f64, t_f: f64, v: f64) -> Self {
        Self {
            q_i,
            t_f,
            target: BoundaryTarget::AsymptoticVelocity { v },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let target_ok = match self.target {
            BoundaryTarget::FinalPosition { q_f } => q_f > 0.0 && q_f.is_finite(),
            BoundaryTarget::AsymptoticVelocity { v } => v > 0.0 && v.is_finite(),
        };
        if self.q_i > 0.0 && self.t_f > 0.0 && self.t_f.is_finite() && target_ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "invalid boundary data {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected: usize,
    pub max_energy_drift: f64,
}

/// A sampled classical solution starting at `t = 0`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    samples: Vec<Sample>,
    energy: f64,
    boundary: BoundarySpec,
    stats: IntegratorStats,
}

#[derive(Serialize)]
struct TrajectoryRecord<'a> {
    boundary: &'a BoundarySpec,
    energy: f64,
    stats: &'a IntegratorStats,
    samples: usize,
    final_state: Sample,
}

impl Trajectory {
    /// Wraps externally produced samples, checking ordering and positivity.
    /// The energy is taken from the first sample.
    pub fn from_samples(pot: &Potential, samples: Vec<Sample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidInput(
                "trajectory needs at least two samples".into(),
            ));
        }
        if samples[0].t != 0.0 {
            return Err(Error::InvalidInput("trajectory must start at t = 0".into()));
        }
        if samples.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::InvalidInput(
                "sample times must increase strictly".into(),
            ));
        }
        let first = samples[0];
        let energy = energy(pot, first.q, first.p)?;
        let mut drift = 0.0f64;
        for s in &samples {
            drift = drift.max((energy_of(pot, s.q, s.p)? - energy).abs());
        }
        let last = samples[samples.len() - 1];
        Ok(Self {
            boundary: BoundarySpec::final_position(first.q, last.t, last.q),
            samples,
            energy,
            stats: IntegratorStats {
                steps: 0,
                rejected: 0,
                max_energy_drift: drift,
            },
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn boundary(&self) -> &BoundarySpec {
        &self.boundary
    }

    pub fn stats(&self) -> &IntegratorStats {
        &self.stats
    }

    pub fn initial(&self) -> Sample {
        self.samples[0]
    }

    pub fn last(&self) -> Sample {
        self.samples[self.samples.len() - 1]
    }

    pub fn t_f(&self) -> f64 {
        self.last().t
    }

    /// CSV with header `t,q,p`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let rows: Vec<Vec<String>> = self
            .samples
            .iter()
            .map(|s| vec![format_float(s.t), format_float(s.q), format_float(s.p)])
            .collect();
        write_csv(out, &["t", "q", "p"], &rows)
    }

    /// JSON record with boundary data, energy and integrator statistics.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TrajectoryRecord {
            boundary: &self.boundary,
            energy: self.energy,
            stats: &self.stats,
            samples: self.samples.len(),
            final_state: self.last(),
        })
        .expect("trajectory record serializes")
    }
}

fn energy_of(pot: &Potential, q: f64, p: f64) -> Result<f64> {
    Ok(0.5 * p * p + pot.value(q)?)
}

/// `H(q, p) = p²/2 + V(q)`.
pub fn energy(pot: &Potential, q: f64, p: f64) -> Result<f64> {
    energy_of(pot, q, p)
}

/// Exact solution of `q̈ = 2/q³` with energy `E` and turning point at `t0`:
/// `q² = 1/E + 2E (t - t0)²`, `p = 2E (t - t0) / q`.
pub fn inverse_square_exact(energy: f64, t0: f64, t: f64) -> (f64, f64) {
    let dt = t - t0;
    let q = (1.0 / energy + 2.0 * energy * dt * dt).sqrt();
    (q, 2.0 * energy * dt / q)
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const E54: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn rhs(pot: &Potential, y: [f64; 2]) -> Option<[f64; 2]> {
    if !(y[0] >= pot.domain_min()) {
        return None;
    }
    Some([y[1], -pot.derivative_unchecked(y[0])])
}

/// One DP5 step; `None` if a stage left the domain.
fn dp_step(
    pot: &Potential,
    y: [f64; 2],
    k1: [f64; 2],
    h: f64,
) -> Option<([f64; 2], [f64; 2], [f64; 2])> {
    let mut k = [[0.0; 2]; 7];
    k[0] = k1;
    for s in 1..7 {
        let mut ys = y;
        for (j, kj) in k.iter().enumerate().take(s) {
            ys[0] += h * A[s][j] * kj[0];
            ys[1] += h * A[s][j] * kj[1];
        }
        k[s] = rhs(pot, ys)?;
        let _ = C[s];
    }
    let mut y_new = y;
    let mut err = [0.0; 2];
    for s in 0..7 {
        y_new[0] += h * B5[s] * k[s][0];
        y_new[1] += h * B5[s] * k[s][1];
        err[0] += h * E54[s] * k[s][0];
        err[1] += h * E54[s] * k[s][1];
    }
    // FSAL: the last stage was evaluated at y_new
    Some((y_new, err, k[6]))
}

fn output_grid(t_f: f64) -> Vec<f64> {
    let n = DENSE_POINTS - 1;
    (0..=n)
        .map(|i| {
            if i == n {
                t_f
            } else {
                t_f * i as f64 / n as f64
            }
        })
        .collect()
}

fn propagate(
    pot: &Potential,
    q0: f64,
    p0: f64,
    t_f: f64,
    rtol: f64,
    record: bool,
) -> Result<(Vec<Sample>, IntegratorStats)> {
    let atol = rtol;
    let grid = output_grid(t_f);
    let mut samples = Vec::with_capacity(if record { DENSE_POINTS * 2 } else { 1 });
    let mut y = [q0, p0];
    let mut t = 0.0;
    let mut k1 = rhs(pot, y).ok_or(Error::SingularityReached { t, q: q0 })?;
    samples.push(Sample { t, q: q0, p: p0 });
    let mut next_out = 1;
    let mut h =
        (grid[1] - grid[0]).min(1e-2 * (1.0 + q0.abs()) / (k1[0].abs() + k1[1].abs() + 1e-300));
    let h_min = 1e-14 * t_f.max(1.0);
    let mut stats = IntegratorStats {
        steps: 0,
        rejected: 0,
        max_energy_drift: 0.0,
    };

    while next_out < grid.len() {
        if stats.steps + stats.rejected >= MAX_STEPS {
            return Err(Error::StepLimitExceeded {
                max_steps: MAX_STEPS,
                t_f,
            });
        }
        let target = grid[next_out];
        let remaining = target - t;
        let lands = h >= remaining * (1.0 - 1e-12);
        let h_try = if lands { remaining } else { h };

        let Some((y_new, err, k_last)) = dp_step(pot, y, k1, h_try) else {
            stats.rejected += 1;
            h = h_try * 0.25;
            if h < h_min {
                return Err(Error::SingularityReached { t, q: y[0] });
            }
            continue;
        };
        let norm = {
            let e0 = err[0] / (atol + rtol * y[0].abs().max(y_new[0].abs()));
            let e1 = err[1] / (atol + rtol * y[1].abs().max(y_new[1].abs()));
            (0.5 * (e0 * e0 + e1 * e1)).sqrt()
        };
        if !norm.is_finite() || norm > 1.0 {
            stats.rejected += 1;
            let factor = if norm.is_finite() {
                (0.9 * norm.powf(-0.2)).max(0.2)
            } else {
                0.2
            };
            h = h_try * factor;
            if h < h_min {
                return Err(Error::SingularityReached { t, q: y[0] });
            }
            continue;
        }

        stats.steps += 1;
        y = y_new;
        k1 = k_last;
        if lands {
            t = target;
            next_out += 1;
        } else {
            t += h_try;
        }
        if record || next_out == grid.len() {
            samples.push(Sample {
                t,
                q: y[0],
                p: y[1],
            });
        }
        let factor = if norm == 0.0 {
            5.0
        } else {
            (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        // a step clipped to an output time says nothing about the natural size
        h = if lands && h_try < h {
            h.max(h_try * factor)
        } else {
            h_try * factor
        };
    }
    Ok((samples, stats))
}

/// Integrates `q̇ = p, ṗ = -V'(q)` from `(q0, p0)` at `t = 0` to `t_f`.
///
/// Samples include a uniform grid of [`DENSE_POINTS`] times plus every
/// accepted internal step. The local tolerance is tightened until the
/// energy drift is at most `tol · |E|`.
pub fn integrate_ivp(pot: &Potential, q0: f64, p0: f64, t_f: f64, tol: f64) -> Result<Trajectory> {
    if !(tol > 0.0 && tol <= MAX_TOL) {
        return Err(Error::InvalidInput(format!(
            "tolerance must lie in (0, 1e-3], got {tol}"
        )));
    }
    if !(t_f > 0.0 && t_f.is_finite()) {
        return Err(Error::InvalidInput(format!("t_f must be > 0, got {t_f}")));
    }
    let e0 = energy(pot, q0, p0)?;
    let mut rtol = (0.1 * tol).max(1e-14);
    loop {
        let (samples, mut stats) = propagate(pot, q0, p0, t_f, rtol, true)?;
        let mut drift = 0.0f64;
        for s in &samples {
            drift = drift.max((0.5 * s.p * s.p + pot.value_unchecked(s.q) - e0).abs());
        }
        stats.max_energy_drift = drift;
        if drift <= tol * e0.abs() {
            let last = samples[samples.len() - 1];
            return Ok(Trajectory {
                boundary: BoundarySpec::final_position(q0, t_f, last.q),
                samples,
                energy: e0,
                stats,
            });
        }
        if rtol <= 1e-14 {
            return Err(Error::NoConvergence {
                iterations: stats.steps,
                context: format!("energy drift {drift:e} exceeds {:e}", tol * e0.abs()),
            });
        }
        rtol = (rtol * 0.1).max(1e-14);
    }
}

/// Fixed-step fourth-order symplectic (Forest-Ruth) integration.
///
/// Intended for long scans where bounded energy error matters more than
/// local accuracy. Every step is recorded.
pub fn integrate_symplectic(
    pot: &Potential,
    q0: f64,
    p0: f64,
    t_f: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(dt > 0.0 && t_f > 0.0) {
        return Err(Error::InvalidInput("t_f and dt must be > 0".into()));
    }
    const THETA: f64 = 1.351_207_191_959_657_8; // 1 / (2 - 2^{1/3})
    let drifts = [
        THETA / 2.0,
        (1.0 - THETA) / 2.0,
        (1.0 - THETA) / 2.0,
        THETA / 2.0,
    ];
    let kicks = [THETA, 1.0 - 2.0 * THETA, THETA];

    let n = (t_f / dt).ceil() as usize;
    if n > MAX_STEPS {
        return Err(Error::StepLimitExceeded {
            max_steps: MAX_STEPS,
            t_f,
        });
    }
    let h = t_f / n as f64;
    let e0 = energy(pot, q0, p0)?;
    let (mut q, mut p) = (q0, p0);
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(Sample { t: 0.0, q, p });
    let mut drift = 0.0f64;
    for i in 1..=n {
        for s in 0..4 {
            q += drifts[s] * h * p;
            if s < 3 {
                if !(q >= pot.domain_min()) {
                    return Err(Error::SingularityReached { t: i as f64 * h, q });
                }
                p -= kicks[s] * h * pot.derivative_unchecked(q);
            }
        }
        if !(q >= pot.domain_min()) {
            return Err(Error::SingularityReached { t: i as f64 * h, q });
        }
        let t = if i == n { t_f } else { i as f64 * h };
        drift = drift.max((0.5 * p * p + pot.value_unchecked(q) - e0).abs());
        samples.push(Sample { t, q, p });
    }
    Ok(Trajectory {
        boundary: BoundarySpec::final_position(q0, t_f, q),
        samples,
        energy: e0,
        stats: IntegratorStats {
            steps: n,
            rejected: 0,
            max_energy_drift: drift,
        },
    })
}

/// Integrator tolerance used inside shooting for a given boundary tolerance.
/// Tolerances for [`solve_bvp`]: `root` bounds the relative boundary miss,
/// `integrator` is passed to [`integrate_ivp`] for each shot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BvpTolerance {
    pub root: f64,
    pub integrator: f64,
}

impl From<f64> for BvpTolerance {
    /// Integrates each shot ten times tighter than the boundary miss.
    fn from(root: f64) -> Self {
        Self {
            root,
            integrator: (0.1 * root).clamp(1e-13, MAX_TOL),
        }
    }
}

/// Solves the two-point problem by shooting on the initial momentum.
///
/// Only outgoing data is supported: `p0 >= 0`, and for a fixed final
/// position `q_f >= q_i`. The final position (or final velocity) is
/// monotone in `p0` for repulsive potentials, so the root is bracketed
/// between `p0 = 0` and a free-particle estimate that is doubled until it
/// overshoots.
pub fn solve_bvp(
    pot: &Potential,
    boundary: &BoundarySpec,
    tol: impl Into<BvpTolerance>,
) -> Result<Trajectory> {
    boundary.validate()?;
    let BvpTolerance {
        root: tol,
        integrator: ivp_tol,
    } = tol.into();
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(Error::InvalidInput(format!(
            "tolerance must lie in (0, 1e-2], got {tol}"
        )));
    }
    if !(ivp_tol > 0.0 && ivp_tol <= MAX_TOL) {
        return Err(Error::InvalidInput(format!(
            "integrator tolerance must lie in (0, {MAX_TOL}], got {ivp_tol}"
        )));
    }
    let rtol = (0.1 * ivp_tol).max(1e-14);
    let (q_i, t_f) = (boundary.q_i, boundary.t_f);

    let (goal, scale, seed) = match boundary.target {
        BoundaryTarget::FinalPosition { q_f } => {
            if q_f < q_i {
                return Err(Error::InvalidInput(format!(
                    "only outgoing data is supported (q_f = {q_f} < q_i = {q_i})"
                )));
            }
            (q_f, q_f, (q_f - q_i) / t_f)
        }
        BoundaryTarget::AsymptoticVelocity { v } => (v, v, v),
    };
    let shoot = |p0: f64| -> Result<f64> {
        let (s, _) = propagate(pot, q_i, p0, t_f, rtol, false)?;
        let last = s[s.len() - 1];
        Ok(match boundary.target {
            BoundaryTarget::FinalPosition { .. } => last.q - goal,
            BoundaryTarget::AsymptoticVelocity { .. } => last.p - goal,
        })
    };

    let accept = tol * scale;
    let f_lo = shoot(0.0)?;
    let p0 = if f_lo.abs() <= 0.5 * accept {
        0.0
    } else {
        if f_lo > 0.0 {
            return Err(Error::Unreachable(format!(
                "target {goal} is already exceeded with zero initial momentum ({:?})",
                boundary.target
            )));
        }
        let mut p_hi = (2.0 * seed).max(1e-3);
        let mut f_hi = shoot(p_hi)?;
        let mut expansions = 0;
        while f_hi < 0.0 {
            expansions += 1;
            if expansions > 60 {
                return Err(Error::Unreachable(format!(
                    "could not bracket target {goal}"
                )));
            }
            p_hi *= 2.0;
            f_hi = shoot(p_hi)?;
        }
        brent(
            shoot,
            0.0,
            p_hi,
            RootOptions {
                x_abs: 0.0,
                x_rel: 1e-15,
                f_abs: 0.5 * accept,
                max_iter: 200,
            },
        )
        .map_err(|e| match e {
            Error::NoConvergence { iterations, .. } => Error::NoConvergence {
                iterations,
                context: format!("shooting for {:?}", boundary.target),
            },
            other => other,
        })?
    };

    let mut traj = integrate_ivp(pot, q_i, p0, t_f, ivp_tol)?;
    let last = traj.last();
    let miss = match boundary.target {
        BoundaryTarget::FinalPosition { q_f } => (last.q - q_f).abs(),
        BoundaryTarget::AsymptoticVelocity { v } => (last.p - v).abs(),
    };
    if miss > accept {
        return Err(Error::NoConvergence {
            iterations: 0,
            context: format!("shooting missed the boundary by {miss:e} (allowed {accept:e})"),
        });
    }
    traj.boundary = *boundary;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::UserPotential;

    fn free() -> Potential {
        Potential::user(UserPotential::from_registry("zero", &[]).unwrap())
    }

    #[test]
    fn energy_examples() {
        let v = Potential::inverse_square();
        assert_eq!(energy(&v, 1.0, 0.0).unwrap(), 1.0);
        assert_eq!(energy(&v, 2.0, 1.0).unwrap(), 0.75);
        assert_eq!(energy(&free(), 5.0, 2.0).unwrap(), 2.0);
        assert!(energy(&v, 0.0, 1.0).is_err());
    }

    #[test]
    fn exact_solution_examples() {
        assert_eq!(inverse_square_exact(1.0, 0.0, 0.0), (1.0, 0.0));
        let (q, p) = inverse_square_exact(1.0, 0.0, 2.0);
        assert!((q - 3.0).abs() < 1e-15);
        assert!((p - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(inverse_square_exact(4.0, 0.0, 0.0).0, 0.5);
    }

    #[test]
    fn exact_solution_satisfies_equation_of_motion() {
        // q'' = 2/q^3 checked by second differences
        for e in [0.5, 1.0, 4.0] {
            for t in [0.3, 1.0, 7.0] {
                let h = 1e-4;
                let qm = inverse_square_exact(e, 0.2, t - h).0;
                let q0 = inverse_square_exact(e, 0.2, t).0;
                let qp = inverse_square_exact(e, 0.2, t + h).0;
                let acc = (qp - 2.0 * q0 + qm) / (h * h);
                assert!((acc - 2.0 / q0.powi(3)).abs() < 1e-5 * (1.0 + acc.abs()));
            }
        }
    }

    #[test]
    fn ivp_from_turning_point() {
        let tr = integrate_ivp(&Potential::inverse_square(), 1.0, 0.0, 2.0, 1e-8).unwrap();
        assert_eq!(tr.energy(), 1.0);
        assert!((tr.last().q - 3.0).abs() < 1e-7);
        assert_eq!(tr.t_f(), 2.0);
        assert!(tr.samples().len() >= DENSE_POINTS);
        assert_eq!(tr.initial().t, 0.0);
    }

    #[test]
    fn ivp_free_motion() {
        let tr = integrate_ivp(&free(), 1.0, 1.0, 3.0, 1e-8).unwrap();
        assert!((tr.last().q - 4.0).abs() < 1e-12);
        assert!((tr.last().p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ivp_reaches_asymptotic_velocity() {
        let tr = integrate_ivp(&Potential::inverse_square(), 1.0, 0.0, 10.0, 1e-8).unwrap();
        assert!((tr.last().p - 2f64.sqrt()).abs() < 1e-2);
        assert!((tr.last().q / 10.0 - 2f64.sqrt()).abs() < 0.01);
    }

    #[test]
    fn ivp_rejects_bad_arguments() {
        let v = Potential::inverse_square();
        assert!(integrate_ivp(&v, 1.0, 0.0, 1.0, 1e-2).is_err());
        assert!(integrate_ivp(&v, 1.0, 0.0, -1.0, 1e-8).is_err());
        assert!(matches!(
            integrate_ivp(&v, 0.0, 0.0, 1.0, 1e-8),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn free_particle_falling_through_origin_is_singular() {
        let err = integrate_ivp(&free(), 1.0, -1.0, 3.0, 1e-8).unwrap_err();
        assert!(matches!(err, Error::SingularityReached { .. }), "{err:?}");
    }

    #[test]
    fn samples_increase_strictly() {
        let tr = integrate_ivp(&Potential::inverse_square(), 0.5, 0.0, 20.0, 1e-8).unwrap();
        assert!(tr.samples().windows(2).all(|w| w[1].t > w[0].t));
        assert!(tr.samples().iter().all(|s| s.q > 0.0));
    }

    #[test]
    fn time_reversal() {
        let v = Potential::inverse_square();
        let fwd = integrate_ivp(&v, 1.5, -0.7, 6.0, 1e-9).unwrap();
        let end = fwd.last();
        let back = integrate_ivp(&v, end.q, -end.p, 6.0, 1e-9).unwrap();
        let b = back.last();
        assert!(((b.q - 1.5) / 1.5).abs() < 1e-6);
        assert!(((-b.p - (-0.7)) / 0.7).abs() < 1e-6);
    }

    #[test]
    fn symplectic_fallback_tracks_exact_solution() {
        let tr = integrate_symplectic(&Potential::inverse_square(), 1.0, 0.0, 20.0, 1e-3).unwrap();
        let (q, p) = inverse_square_exact(1.0, 0.0, 20.0);
        assert!(((tr.last().q - q) / q).abs() < 1e-8);
        assert!(((tr.last().p - p) / p).abs() < 1e-8);
        assert!(tr.stats().max_energy_drift < 1e-9);
    }

    #[test]
    fn bvp_inverse_square_turning_point() {
        let b = BoundarySpec::final_position(1.0, 2.0, 3.0);
        let tr = solve_bvp(&Potential::inverse_square(), &b, 1e-10).unwrap();
        assert!((tr.energy() - 1.0).abs() < 1e-8);
        assert!(tr.initial().p.abs() < 1e-6);
        assert_eq!(tr.boundary(), &b);
    }

    #[test]
    fn bvp_free_particle() {
        let tr = solve_bvp(&free(), &BoundarySpec::final_position(1.0, 1.0, 2.0), 1e-10).unwrap();
        assert!((tr.initial().p - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bvp_asymptotic_velocity_conserves_energy() {
        let v = Potential::inverse_square();
        let tr = solve_bvp(
            &v,
            &BoundarySpec::asymptotic_velocity(1.0, 5.0, 2f64.sqrt()),
            1e-10,
        )
        .unwrap();
        let last = tr.last();
        assert!((last.p - 2f64.sqrt()).abs() < 1e-9);
        // E = v²/2 + V(q_f); V(q_f) is not negligible at t_f = 5
        assert!((tr.energy() - (1.0 + 1.0 / (last.q * last.q))).abs() < 1e-9);
    }

    #[test]
    fn bvp_asymptotic_velocity_late_time_energy() {
        let v = Potential::inverse_square();
        let tr = solve_bvp(
            &v,
            &BoundarySpec::asymptotic_velocity(1.0, 100.0, 2f64.sqrt()),
            1e-10,
        )
        .unwrap();
        assert!((tr.energy() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn bvp_errors() {
        let v = Potential::inverse_square();
        // p0 = 0 already overshoots: q(2) = 3 > 2.5
        let err = solve_bvp(&v, &BoundarySpec::final_position(1.0, 2.0, 2.5), 1e-8).unwrap_err();
        assert!(matches!(err, Error::Unreachable(_)), "{err:?}");
        assert!(solve_bvp(&v, &BoundarySpec::final_position(2.0, 2.0, 1.0), 1e-8).is_err());
        assert!(solve_bvp(&v, &BoundarySpec::final_position(-1.0, 2.0, 3.0), 1e-8).is_err());
    }

    #[test]
    fn csv_and_json_layout() {
        let tr = integrate_ivp(&free(), 1.0, 1.0, 1.0, 1e-6).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "t,q,p\n0.0000000000000000e0,1.0000000000000000e0,1.0000000000000000e0\n"
        ));
        assert_eq!(text.lines().count(), tr.samples().len() + 1);
        let json = tr.to_json();
        assert_eq!(json["energy"], 0.5);
        assert_eq!(json["boundary"]["target"]["kind"], "final_position");
        assert!(json["stats"]["max_energy_drift"].is_number());
    }
}
