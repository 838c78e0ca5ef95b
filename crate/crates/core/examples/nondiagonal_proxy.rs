//! Proxy distance between FS images of non-diagonal metrics.

use kahler_quant::harness::sampling::{cell_rng, random_metric};
use kahler_quant::hermgeo::hat_distance;
use kahler_quant::quantmaps::{AngularFs, AngularQuadrature};

fn main() -> kahler_quant::Result<()> {
    let d = 4;
    let quad = AngularQuadrature::for_degree(d);
    let mut rng = cell_rng(11, 0);
    for _ in 0..3 {
        let h0 = random_metric(d + 1, &mut rng)?;
        let h1 = random_metric(d + 1, &mut rng)?;
        let (a, b) = (AngularFs::new(&h0)?, AngularFs::new(&h1)?);
        let proxy = quad.dp_proxy(&a, &b, 2.0)?;
        println!(
            "mass {:.8}, proxy {proxy:.5}, hat {:.5}, FS at x = 1, angle 0.3: {:.5}",
            quad.mass(&a),
            hat_distance(&h0, &h1)?,
            a.potential(1.0, 0.3)
        );
    }
    Ok(())
}
