//! The three-step ladder: regularize, smooth, quantize.

use std::sync::Arc;

use kahler_quant::ladder::{run_ladder, LadderConfig};
use kahler_quant::lse::log_sum_exp;
use kahler_quant::toric::{softplus, BackgroundForm, InvariantPotential, QuadratureGrid};

fn potential(grid: &Arc<QuadratureGrid>, c: [f64; 3]) -> kahler_quant::Result<InvariantPotential> {
    InvariantPotential::from_log_fn(grid, |t| {
        log_sum_exp(&[c[0].ln(), c[1].ln() + t, c[2].ln() + 2.0 * t]) - softplus(2.0 * t)
    })
}

fn main() -> kahler_quant::Result<()> {
    let grid = Arc::new(QuadratureGrid::gauss_legendre(256)?);
    let u0 = potential(&grid, [1.0, 3.0, 0.5])?;
    let u1 = potential(&grid, [2.0, 0.2, 4.0])?;
    let config = LadderConfig::default();
    let run = run_ladder(&u0, &u1, &BackgroundForm::semipositive_big(), &config)?;
    println!("reference epsilon {}", run.report.reference_epsilon);
    println!(" ell  j  k  degree   step1    step2    step3    total");
    for r in &run.report.rungs {
        println!(
            "{:4} {:2} {:2} {:7} {:.5}  {:.5}  {:.5}  {:.5}",
            r.ell,
            r.j_chosen,
            r.k_chosen,
            r.degree,
            r.step1_error,
            r.step2_error,
            r.step3_error,
            r.total_error_on_k
        );
    }
    for rung in &run.rungs {
        println!(
            "rung {} replays bit for bit: {}",
            rung.record.ell,
            rung.quantized.replays(&grid)?
        );
    }
    Ok(())
}
