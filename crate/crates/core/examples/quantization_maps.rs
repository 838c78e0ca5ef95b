//! Hilbert and Fubini–Study maps on O(d) over the projective line.

use kahler_quant::quantmaps::{bergman_roundtrip, fs, hilb};
use kahler_quant::toric::{build_model, softplus, InvariantPotential};

fn main() -> kahler_quant::Result<()> {
    for d in [2, 4, 8] {
        let model = build_model(d, 512)?;
        let grid = model.grid().clone();
        let g = hilb(&InvariantPotential::zero(&grid), &model)?;
        let worst = (0..=d)
            .map(|j| (g.diagonal()[j] * (d + 1) as f64 * model.ln_binomial(j).exp() - 1.0).abs())
            .fold(0.0, f64::max);
        let rho = fs(&g, &model)?;
        let flat = rho.sup_distance(&InvariantPotential::constant(
            &grid,
            ((d + 1) as f64).ln() / d as f64,
        ))?;
        println!("d = {d}: Gram oracle error {worst:.1e}, FS(Hilb(0)) off constant by {flat:.1e}");
    }

    // Roundtrip error of a smooth potential shrinks with the degree.
    for d in [4, 8, 16, 32] {
        let model = build_model(d, 256)?;
        let u = InvariantPotential::from_log_fn(model.grid(), |t| {
            0.5 * softplus(2.0 * t) - softplus(t)
        })?;
        let rho = bergman_roundtrip(&u, &model)?;
        println!(
            "d = {d:2}: sup |FS(Hilb(u)) - u| = {:.4}",
            rho.sup_distance(&u)?
        );
    }
    Ok(())
}
