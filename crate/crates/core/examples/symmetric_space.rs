//! Distances and geodesics between positive-definite Hermitian matrices.

use kahler_quant::hermgeo::{
    geodesic_speed, geodesic_through, hat_distance, metric_inner, HermitianMatrix, PosDefMetric,
};
use kahler_quant::linalg::{CMatrix, C64};

fn main() -> kahler_quant::Result<()> {
    let c = |re: f64| C64::new(re, 0.0);
    let h0 = PosDefMetric::identity(2);
    let h1 = PosDefMetric::new(CMatrix::from_row_slice(
        2,
        2,
        &[c(2.0), c(1.0), c(1.0), c(2.0)],
    ))?;

    let g = geodesic_through(&h0, &h1)?;
    println!("direction eigenvalues {:?}", g.eigenvalues());
    println!(
        "hat distance {:.6} (ln 3 / sqrt 2 = {:.6})",
        hat_distance(&h0, &h1)?,
        3f64.ln() / 2f64.sqrt()
    );
    println!("speed {:.6}", geodesic_speed(&g));
    println!("H(1) matches H1 to {:.2e}", g.eval(1.0).relative_error(&h1));
    println!("H(-3) eigenvalues {:?}", g.eval(-3.0).eigenvalues());

    let v = HermitianMatrix::from_real_diagonal(&[1.0, 0.0]);
    let w = HermitianMatrix::from_real_diagonal(&[0.0, 1.0]);
    println!("<V, W> at I = {}", metric_inner(&h0, &v, &w)?);
    Ok(())
}
