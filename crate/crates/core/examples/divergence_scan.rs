//! Bare versus improved action along escaping trajectories with fixed
//! final velocity √2.

use std::f64::consts::SQRT_2;

use halfbind::action::divergence_scan;
use halfbind::counterterm::{CountertermMethod, CountertermScheme};
use halfbind::dynamics::BoundarySpec;
use halfbind::potential::Potential;

fn main() -> halfbind::Result<()> {
    let pot = Potential::inverse_square();
    let family = BoundarySpec::asymptotic_velocity(2.0, 1.0, SQRT_2);
    let grid = [25.0, 50.0, 100.0, 200.0, 400.0, 800.0];

    for method in [
        CountertermMethod::AnalyticInverseSquare,
        CountertermMethod::AsymptoticLeading,
    ] {
        let scheme = CountertermScheme::new(method);
        let scan = divergence_scan(&pot, &family, &grid, &scheme, 1e-10, 1.0)?;
        println!("counterterm: {}", method.as_str());
        println!(
            "{:>6} {:>14} {:>14} {:>14} {:>12}",
            "t_f", "I", "S(t_f)", "Gamma", "p - dS/dq"
        );
        for r in &scan.reports {
            println!(
                "{:>6} {:>14.6} {:>14.6} {:>14.9} {:>12.3e}",
                r.t_f, r.i_bulk, r.s_boundary, r.gamma, r.variation_residual
            );
        }
        let d = &scan.diagnostic;
        println!(
            "slope of I: {:.6}   Gamma limit: {:.9}   variation exponent: {:.4}\n",
            d.i_slope_fit, d.gamma_limit, d.variation_exponent_fit
        );
    }
    Ok(())
}
