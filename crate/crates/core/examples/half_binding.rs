//! Classifies a few potentials as half-binding or not.

use halfbind::potential::{check_half_binding, Potential, UserPotential};

fn main() -> halfbind::Result<()> {
    let candidates = vec![
        Potential::inverse_square(),
        Potential::inverse_power(0.5, 3.0)?,
        Potential::user(UserPotential::from_registry("exponential", &[1.0, 2.0])?),
        Potential::user(UserPotential::from_registry("inverse_linear", &[1.0])?),
        Potential::user(UserPotential::from_registry("quadratic", &[1.0])?),
    ];
    println!(
        "{:<40} {:>8} {:>9} {:>7} {:>6}  verdict",
        "potential", "positive", "monotone", "decays", "binds"
    );
    for pot in &candidates {
        let r = check_half_binding(pot, 1e-3, 1e3, 200)?;
        println!(
            "{:<40} {:>8} {:>9} {:>7} {:>6}  {}",
            pot.label(),
            r.positive,
            r.monotone_decreasing,
            r.decays_faster_than_1_over_q,
            r.binds_at_origin,
            r.verdict
        );
    }
    Ok(())
}
