//! Dilaton-gravity counterterm S(X) for the ab-family and the identity
//! V = -[(S²)' + S² U]/2 that reconstructs the potential.

use halfbind::dilaton::{dilaton_counterterm, DilatonModel};

fn main() -> halfbind::Result<()> {
    let models = [
        DilatonModel::from_catalog("ab", &[0.0, 0.0, 1.0], (0.0, 10.0))?,
        DilatonModel::from_catalog("witten", &[1.0], (1.0, 10.0))?,
        DilatonModel::from_catalog("schwarzschild", &[1.0], (0.5, 10.0))?,
        DilatonModel::from_catalog("jackiw_teitelboim", &[1.0], (0.0, 10.0))?,
    ];
    for model in &models {
        println!(
            "{} (X_ref_U = {}, X_ref_V = {})",
            model.name(),
            model.x_ref_u(),
            model.x_ref_v()
        );
        for x in [2.0, 3.0, 4.0, 8.0] {
            let s = dilaton_counterterm(model, x, 1e-10)?;
            let resid = s
                .identity_residual
                .map(|r| format!("{r:.1e}"))
                .unwrap_or_else(|| "-".into());
            println!(
                "  X = {x:<4} S = {:<20.15} identity residual {resid}",
                s.value
            );
        }
    }

    let wrong = DilatonModel::new("repulsive", |_| 0.0, |_| 0.5, (0.0, 4.0))?;
    if let Err(e) = dilaton_counterterm(&wrong, 2.0, 1e-10) {
        println!("\nV > 0: {e}");
    }
    Ok(())
}
