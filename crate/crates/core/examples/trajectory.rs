//! Integrates the 1/q² problem and compares with the exact orbit
//! q² = 1/E + 2E(t - t0)², then solves a boundary problem by shooting.

use halfbind::dynamics::{
    integrate_ivp, integrate_symplectic, inverse_square_exact, solve_bvp, BoundarySpec,
};
use halfbind::potential::Potential;

fn main() -> halfbind::Result<()> {
    let pot = Potential::inverse_square();
    let energy = 1.0;

    let adaptive = integrate_ivp(&pot, 1.0, 0.0, 20.0, 1e-10)?;
    let symplectic = integrate_symplectic(&pot, 1.0, 0.0, 20.0, 1e-3)?;
    for (name, traj) in [("dormand-prince", &adaptive), ("forest-ruth", &symplectic)] {
        let worst = traj
            .samples()
            .iter()
            .map(|s| {
                let (q, _) = inverse_square_exact(energy, 0.0, s.t);
                ((s.q - q) / q).abs()
            })
            .fold(0.0f64, f64::max);
        println!(
            "{name:>15}: {} samples, max relative error {worst:.2e}, energy drift {:.2e}",
            traj.samples().len(),
            traj.stats().max_energy_drift
        );
    }

    // fix the final position instead of the initial momentum
    let bvp = solve_bvp(&pot, &BoundarySpec::final_position(2.0, 10.0, 30.0), 1e-10)?;
    let first = bvp.initial();
    let last = bvp.last();
    println!(
        "\nshooting q(0) = 2 -> q(10) = 30: p0 = {:.12}, q(10) = {:.12}, E = {:.12}",
        first.p,
        last.q,
        bvp.energy()
    );

    let esc = solve_bvp(
        &pot,
        &BoundarySpec::asymptotic_velocity(2.0, 100.0, 2f64.sqrt()),
        1e-10,
    )?;
    println!(
        "escape with q'(100) = √2: p0 = {:.12}, E = {:.12} (-> v²/2 = 1 as t_f grows)",
        esc.initial().p,
        esc.energy()
    );
    Ok(())
}
