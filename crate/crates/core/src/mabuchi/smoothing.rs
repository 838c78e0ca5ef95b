//! Decreasing approximation by smooth strictly psh potentials.
//!
//! The convexified full weight is a sum of hinges `μ_k (τ − a_k)_+`; each hinge
//! is mollified exactly by a Gaussian of width `σ`, giving
//! `G_σ(y) = y Φ(y/σ) + σ φ(y/σ)`. `G_σ` increases with `σ` and lies above the
//! hinge, so shrinking `σ` and the additive shift together makes the sequence
//! decrease.

use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use super::legendre::lower_hull;
use crate::error::{Error, Result};
use crate::toric::{BackgroundForm, InvariantPotential};

/// Mollification width at index `j`.
pub fn bandwidth(j: usize) -> f64 {
    0.5 / j as f64
}

/// Additive shift at index `j`.
pub fn shift(j: usize) -> f64 {
    0.5 / j as f64
}

fn gaussian_hinge(normal: &Normal, y: f64, sigma: f64) -> f64 {
    let z = y / sigma;
    y * normal.cdf(z) + sigma * normal.pdf(z)
}

/// The `j`-th member of a decreasing sequence of smooth, strictly
/// `(form + ε ω)`-psh potentials converging uniformly to `u`.
pub fn smooth_decreasing(
    u: &InvariantPotential,
    j: usize,
    form: &BackgroundForm,
    epsilon: f64,
) -> Result<InvariantPotential> {
    if j == 0 {
        return Err(Error::InvalidParameter(
            "smoothing index starts at 1".into(),
        ));
    }
    let form = form.with_epsilon(epsilon);
    let mass = form.mass();
    let grid = u.grid();
    let tau = grid.log_nodes();
    let psi = u.full_weight(&form);
    let hull = lower_hull(tau, &psi);

    // Hinges: slope jumps at hull vertices, with end slopes 0 and `mass`.
    let mut corners = Vec::with_capacity(hull.len());
    let mut previous = 0.0;
    for (k, &v) in hull.iter().enumerate() {
        let next = match hull.get(k + 1) {
            Some(&w) => ((psi[w] - psi[v]) / (tau[w] - tau[v])).clamp(previous, mass),
            None => mass,
        };
        corners.push((tau[v], next - previous));
        previous = next;
    }
    let base = psi[hull[0]];

    let sigma = bandwidth(j);
    let normal = Normal::standard();
    let background = form.weights_on(grid);
    // Mixing in the background weight keeps every node mass positive even where
    // the mollified hinges are numerically affine.
    let bound = u.values().iter().fold(0.0f64, |a, v| a.max(v.abs())) + mass;
    let eta = shift(j) / (2.0 * (1.0 + bound));
    let values = tau
        .iter()
        .zip(&background)
        .map(|(&x, &b)| {
            let smooth: f64 = base
                + corners
                    .iter()
                    .map(|&(a, w)| w * gaussian_hinge(&normal, x - a, sigma))
                    .sum::<f64>();
            (1.0 - eta) * (smooth - b) + shift(j)
        })
        .collect();
    InvariantPotential::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hinge_mollifier_is_above_and_monotone() {
        let n = Normal::standard();
        for y in [-1.0, -0.1, 0.0, 0.2, 3.0] {
            let wide = gaussian_hinge(&n, y, 0.5);
            let narrow = gaussian_hinge(&n, y, 0.25);
            assert!(narrow >= y.max(0.0));
            assert!(wide >= narrow);
        }
    }
}
