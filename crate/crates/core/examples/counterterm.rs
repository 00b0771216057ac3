//! The Hamilton-Jacobi counterterm for V = 1/q², evaluated three ways.

use std::f64::consts::{PI, SQRT_2};

use halfbind::counterterm::{
    asymptotic_counterterm, counterterm_general, counterterm_inverse_square, hj_residual, Partials,
};
use halfbind::potential::Potential;

fn main() -> halfbind::Result<()> {
    let pot = Potential::inverse_square();
    println!(
        "{:>6} {:>5} {:>20} {:>20} {:>14} {:>10}",
        "q", "t", "closed form", "numeric + √2π/2", "leading q²/2t", "HJ resid"
    );
    for (q, t) in [
        (2.0, 1.0),
        (3.0, 0.5),
        (5.0, 2.0),
        (10.0, 1.0),
        (50.0, 10.0),
    ] {
        let exact = counterterm_inverse_square(q, t, 0.0)?;
        let numeric = counterterm_general(&pot, q, t, 0.0, 1e-10)?;
        let leading = asymptotic_counterterm(q, t)?;
        let resid = hj_residual(
            |q, t| counterterm_inverse_square(q, t, 0.0),
            &pot,
            q,
            t,
            Partials::Analytic,
        )?;
        println!(
            "{q:>6} {t:>5} {:>20.14} {:>20.14} {:>14.6} {resid:>10.1e}",
            exact.value,
            numeric.value + SQRT_2 * PI / 2.0,
            leading.value
        );
    }

    // inside the caustic q⁴ < 8t² there is no real envelope
    match counterterm_inverse_square(1.0, 1.0, 0.0) {
        Ok(ct) => println!("unexpected value {}", ct.value),
        Err(e) => println!("\n(q, t) = (1, 1): {e}"),
    }
    Ok(())
}
