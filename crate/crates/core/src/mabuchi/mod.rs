//! Distances and weak geodesics in the space of invariant potentials.

mod envelope;
mod legendre;
mod smoothing;
mod surface;

pub use envelope::{envelope_sweep, SweepOptions, SweepStats};
pub use legendre::GeodesicDual;
pub use smoothing::{bandwidth, shift, smooth_decreasing};
pub use surface::{weak_geodesic, GeodesicSurface, SurfaceSummary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::toric::{self, BackgroundForm, InvariantPotential};

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "p = {p} must be at least 1"
        )));
    }
    Ok(())
}

/// `((1/V) ∫ |u0 − u1|^p (ω_{u0} + ω_{u1}))^{1/p}`.
pub fn dp_proxy(
    u0: &InvariantPotential,
    u1: &InvariantPotential,
    form: &BackgroundForm,
    p: f64,
) -> Result<f64> {
    check_p(p)?;
    u0.check_same_grid(u1)?;
    let m0 = toric::ma_masses(u0, form)?;
    let m1 = toric::ma_masses(u1, form)?;
    let total: f64 = u0
        .values()
        .iter()
        .zip(u1.values())
        .zip(m0.iter().zip(&m1))
        .map(|((a, b), (x, y))| (a - b).abs().powf(p) * (x.max(0.0) + y.max(0.0)))
        .sum();
    Ok((total / form.mass()).powf(1.0 / p))
}

/// `d_p` read off the surface at the two ends and across interior times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointDistance {
    pub start: f64,
    pub end: f64,
    pub min_interior: f64,
    pub max_interior: f64,
    /// `(max − min) / max` over interior times.
    pub spread: f64,
}

fn energy(velocity: &[f64], masses: &[f64], mass: f64, p: f64) -> f64 {
    let total: f64 = velocity
        .iter()
        .zip(masses)
        .map(|(v, m)| v.abs().powf(p) * m.max(0.0))
        .sum();
    (total / mass).powf(1.0 / p)
}

/// `((1/V) ∫ |∂_t U|^p ω_{u_t})^{1/p}` with one-sided three-point stencils at
/// `t = 0, 1` and central differences inside.
pub fn dp_endpoint(surface: &GeodesicSurface, p: f64) -> Result<EndpointDistance> {
    check_p(p)?;
    surface.validate()?;
    let steps = surface.steps();
    if steps < 2 {
        return Err(Error::InvalidParameter(
            "need at least two time steps".into(),
        ));
    }
    let dt = 1.0 / steps as f64;
    let rows = surface.values();
    let form = surface.form();
    let tau = surface.grid().log_nodes();
    let mass = form.mass();
    let masses = |n: usize| {
        let psi: Vec<f64> = rows[n]
            .iter()
            .zip(tau)
            .map(|(u, &t)| u + form.weight(t))
            .collect();
        toric::node_masses(&psi, tau, mass)
    };
    let m = tau.len();
    let start_vel: Vec<f64> = (0..m)
        .map(|i| (-3.0 * rows[0][i] + 4.0 * rows[1][i] - rows[2][i]) / (2.0 * dt))
        .collect();
    let end_vel: Vec<f64> = (0..m)
        .map(|i| {
            (3.0 * rows[steps][i] - 4.0 * rows[steps - 1][i] + rows[steps - 2][i]) / (2.0 * dt)
        })
        .collect();
    let start = energy(&start_vel, &masses(0), mass, p);
    let end = energy(&end_vel, &masses(steps), mass, p);
    let interior: Vec<f64> = (1..steps)
        .map(|n| {
            let vel: Vec<f64> = (0..m)
                .map(|i| (rows[n + 1][i] - rows[n - 1][i]) / (2.0 * dt))
                .collect();
            energy(&vel, &masses(n), mass, p)
        })
        .collect();
    let min_interior = interior.iter().copied().fold(f64::INFINITY, f64::min);
    let max_interior = interior.iter().copied().fold(0.0, f64::max);
    let spread = if max_interior > 0.0 {
        (max_interior - min_interior) / max_interior
    } else {
        0.0
    };
    Ok(EndpointDistance {
        start,
        end,
        min_interior,
        max_interior,
        spread,
    })
}
