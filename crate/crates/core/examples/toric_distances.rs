//! Grid-free Mabuchi distances between FS images of diagonal metrics.

use kahler_quant::hermgeo::{hat_distance, PosDefMetric};
use kahler_quant::moment::{dp_exact, dp_proxy_exact, FsProfile};

fn main() -> kahler_quant::Result<()> {
    // diag(1, e^t) on O(1): a translation in the log coordinate.
    let base = FsProfile::new(1, vec![0.0, 0.0])?;
    for t in [1.0, 10.0, 50.0] {
        let moved = FsProfile::new(1, vec![0.0, -t])?;
        let h = PosDefMetric::from_diagonal(&[1.0, f64::exp(t)])?;
        println!(
            "t = {t:4}: d_2 = {:.4}, proxy = {:.4}, hat = {:.4}",
            dp_exact(&moved, &base, 2.0)?,
            dp_proxy_exact(&moved, &base, 2.0)?,
            hat_distance(&PosDefMetric::identity(2), &h)?
        );
    }
    // diag(1, e^t, 1) on O(2): the sections 1 and z^2 never vanish together.
    let base = FsProfile::new(2, vec![0.0, 0.0, 0.0])?;
    for t in [1.0, 10.0, 50.0] {
        let moved = FsProfile::new(2, vec![0.0, -t, 0.0])?;
        println!(
            "zero block t = {t:4}: d_2 = {:.6}",
            dp_exact(&moved, &base, 2.0)?
        );
    }
    Ok(())
}
