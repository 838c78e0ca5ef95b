//! Decreasing smooth approximations of a potential with a flat spot.

use std::sync::Arc;

use kahler_quant::mabuchi::smooth_decreasing;
use kahler_quant::toric::{
    min_density, softplus, BackgroundForm, InvariantPotential, QuadratureGrid,
};

fn main() -> kahler_quant::Result<()> {
    let form = BackgroundForm::semipositive_big();
    let grid = Arc::new(QuadratureGrid::gauss_legendre(256)?);
    // Full weight max(0, 2τ): the density vanishes away from τ = 0.
    let u = InvariantPotential::from_log_fn(&grid, |t| (2.0 * t).max(0.0) - softplus(2.0 * t))?;
    let eps = 0.25;
    let mut previous: Option<InvariantPotential> = None;
    for j in [1, 2, 4, 8, 16, 32, 64] {
        let uj = smooth_decreasing(&u, j, &form, eps)?;
        let gap = uj.sup_distance(&u)?;
        let down = previous.as_ref().map(|p| {
            uj.values()
                .iter()
                .zip(p.values())
                .map(|(a, b)| a - b)
                .fold(f64::NEG_INFINITY, f64::max)
        });
        println!(
            "j = {j:2}: sup gap {gap:.4}, min density {:.2e}, max step up {:?}",
            min_density(&uj, &form.with_epsilon(eps)),
            down
        );
        previous = Some(uj);
    }
    Ok(())
}
