//! Boundary terms of the on-shell variation, with and without the
//! counterterm, and what the canonical map Q = 1/q does to them.

use std::f64::consts::SQRT_2;

use halfbind::action::{
    bare_variation_boundary_term, canonical_transform_diagnostic, epsilon_scaled_variation,
    improved_variation_boundary_term,
};
use halfbind::counterterm::counterterm_inverse_square;
use halfbind::dynamics::{solve_bvp, BoundarySpec};
use halfbind::potential::Potential;

fn main() -> halfbind::Result<()> {
    let pot = Potential::inverse_square();
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12} {:>14}",
        "t_f", "δq", "bare", "improved", "Q", "P"
    );
    for t_f in [10.0, 40.0, 160.0, 640.0] {
        let traj = solve_bvp(
            &pot,
            &BoundarySpec::asymptotic_velocity(2.0, t_f, SQRT_2),
            1e-10,
        )?;
        let ct = counterterm_inverse_square(traj.last().q, t_f, 0.0)?;
        // δq = q_f Δq / t_f stays finite as t_f grows
        let dq = epsilon_scaled_variation(&traj, 1.0);
        let canon = canonical_transform_diagnostic(&traj);
        println!(
            "{t_f:>6} {dq:>12.6} {:>12.6} {:>12.3e} {:>12.3e} {:>14.4e}",
            bare_variation_boundary_term(&traj, dq),
            improved_variation_boundary_term(&traj, &ct, dq),
            canon.q_transformed,
            canon.p_transformed
        );
    }
    Ok(())
}
