//! FS images of a matrix geodesic and the eigenvalue band for their increments.

use kahler_quant::harness::eigenvalue_band;
use kahler_quant::hermgeo::MatrixGeodesic;
use kahler_quant::moment::dp_exact;
use kahler_quant::quantmaps::{fs_along_geodesic, hilb, profile_along_geodesic};
use kahler_quant::toric::{build_model, InvariantPotential};

fn main() -> kahler_quant::Result<()> {
    let d = 2;
    let model = build_model(d, 256)?;
    let h0 = hilb(&InvariantPotential::zero(model.grid()), &model)?.diagonal();
    let g = MatrixGeodesic::diagonal(&h0, &[-1.0, 0.0, 1.0])?;

    let u3 = fs_along_geodesic(&g, 3.0, &model)?;
    println!(
        "FS(H(3)) at the first and last node: {:.4} {:.4}",
        u3.values()[0],
        u3.values()[u3.len() - 1]
    );

    let times: Vec<f64> = (-10..=10).map(|i| 0.5 * i as f64).collect();
    let band = eigenvalue_band(&g, &model, &times)?;
    println!(
        "band [{:.3}, {:.3}] per unit time, slacks {:.2e} {:.2e}",
        band.lower, band.upper, band.lower_slack, band.upper_slack
    );

    let start = profile_along_geodesic(&g, 0.0)?;
    for t in [1.0, 5.0, 20.0] {
        let dp = dp_exact(&profile_along_geodesic(&g, t)?, &start, 2.0)?;
        println!("t = {t:4}: d_2 = {dp:.5}, hat = {:.5}", g.speed() * t);
    }
    Ok(())
}
