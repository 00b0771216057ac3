//! A screened potential e^{-q/ℓ}/q² has no closed-form counterterm; the
//! numeric envelope route still renders the action finite.

use halfbind::action::divergence_scan;
use halfbind::counterterm::{hj_residual, CountertermMethod, CountertermScheme, Partials};
use halfbind::dynamics::BoundarySpec;
use halfbind::potential::{check_half_binding, Potential, UserPotential};

fn main() -> halfbind::Result<()> {
    let pot = Potential::user(UserPotential::new(
        "screened",
        |q| (-q / 5.0).exp() / (q * q),
        |q| -(-q / 5.0).exp() * (0.2 + 2.0 / q) / (q * q),
    ));
    println!(
        "half-binding: {}",
        check_half_binding(&pot, 1e-3, 1e3, 200)?.verdict
    );

    let scheme = CountertermScheme::new(CountertermMethod::NumericEnvelope).with_tol(1e-9);
    for (q, t) in [(3.0, 1.0), (10.0, 4.0)] {
        let ct = scheme.evaluate(&pot, q, t)?;
        let r = hj_residual(
            |q, t| scheme.evaluate(&pot, q, t),
            &pot,
            q,
            t,
            Partials::CentralDifference { h: 2e-3 },
        )?;
        println!(
            "S({q}, {t}) = {:.12}  E* = {:.12}  HJ residual {r:.1e}",
            ct.value, ct.envelope_energy
        );
    }

    // V(1) ≈ 0.82 > v²/2 would already be exceeded at rest, so start further out
    let family = BoundarySpec::asymptotic_velocity(2.0, 1.0, 1.0);
    let scan = divergence_scan(
        &pot,
        &family,
        &[20.0, 40.0, 80.0, 160.0],
        &scheme,
        1e-10,
        1.0,
    )?;
    for r in &scan.reports {
        println!(
            "t_f = {:>5}  I = {:>12.6}  Gamma = {:.9}",
            r.t_f, r.i_bulk, r.gamma
        );
    }
    println!("Gamma limit {:.9}", scan.diagnostic.gamma_limit);
    Ok(())
}
