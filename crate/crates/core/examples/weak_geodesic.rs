//! Weak geodesic between two potentials, its invariants and the envelope oracle.

use std::sync::Arc;

use kahler_quant::mabuchi::{dp_endpoint, dp_proxy, weak_geodesic, SweepOptions};
use kahler_quant::toric::{softplus, BackgroundForm, InvariantPotential, QuadratureGrid};

fn main() -> kahler_quant::Result<()> {
    let form = BackgroundForm::fubini_study();
    let grid = Arc::new(QuadratureGrid::gauss_legendre(256)?);
    let u0 = InvariantPotential::from_log_fn(&grid, |t| 0.5 * softplus(2.0 * t) - softplus(t))?;
    let u1 = InvariantPotential::from_log_fn(&grid, |t| softplus(t - 1.0) - softplus(t) + 0.3)?;

    let surface = weak_geodesic(&u0, &u1, &form, 0.0, 64)?;
    surface.validate()?;
    println!("{}", serde_json::to_string_pretty(&surface.summary())?);

    let ends = dp_endpoint(&surface, 2.0)?;
    println!(
        "d_2 at t = 0: {:.5}, at t = 1: {:.5}, interior spread {:.3}%",
        ends.start,
        ends.end,
        100.0 * ends.spread
    );
    println!("d_2 from the dual: {:.5}", surface.dual().dp(2.0));
    println!("proxy: {:.5}", dp_proxy(&u0, &u1, &form, 2.0)?);

    let coarse = Arc::new(QuadratureGrid::gauss_legendre(64)?);
    let a = InvariantPotential::from_log_fn(&coarse, |t| 0.5 * softplus(2.0 * t) - softplus(t))?;
    let b = InvariantPotential::from_log_fn(&coarse, |t| softplus(t - 1.0) - softplus(t) + 0.3)?;
    let small = weak_geodesic(&a, &b, &form, 0.0, 16)?;
    let (diff, stats) = small.cross_check(&SweepOptions::default())?;
    println!(
        "envelope sweep differs by {diff:.2e} after {} sweeps (mesh {:.3})",
        stats.sweeps,
        small.resolution()
    );

    let out = std::env::temp_dir().join("weak_geodesic.csv");
    surface.write_csv(&out)?;
    println!("surface written to {}", out.display());
    Ok(())
}
