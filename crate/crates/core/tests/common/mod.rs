#![allow(dead_code)]

use std::sync::Arc;

use kahler_quant::hermgeo::{geodesic_eval, MatrixGeodesic, PosDefMetric};
use kahler_quant::linalg::{random_gaussian_matrix, CMatrix, C64};
use kahler_quant::lse::log_sum_exp;
use kahler_quant::toric::{softplus, InvariantPotential, QuadratureGrid};
use rand::Rng;

pub fn gl_grid(m: usize) -> Arc<QuadratureGrid> {
    Arc::new(QuadratureGrid::gauss_legendre(m).unwrap())
}

/// `G G* + n/10 I` for Gaussian `G`.
pub fn random_pd<R: Rng>(n: usize, rng: &mut R) -> PosDefMetric {
    let g = random_gaussian_matrix(n, rng);
    let m = &g * g.adjoint() + CMatrix::identity(n, n) * C64::new(0.1 * n as f64, 0.0);
    PosDefMetric::new(m).unwrap()
}

/// Eigenvalues of `H0^{-1} H1` through a Cholesky factor of `H0`.
pub fn relative_spectrum_oracle(h0: &PosDefMetric, h1: &PosDefMetric) -> Vec<f64> {
    let l = h0.as_matrix().clone().cholesky().unwrap().l();
    let li = l.try_inverse().unwrap();
    let m = &li * h1.as_matrix() * li.adjoint();
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut v: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `ψ = (1/m) ln Σ_j e^{c_j + jτ}` minus `weight`.
pub fn log_poly(
    grid: &Arc<QuadratureGrid>,
    c: &[f64],
    scale: f64,
    weight: fn(f64) -> f64,
) -> InvariantPotential {
    InvariantPotential::from_log_fn(grid, |t| {
        let e: Vec<f64> = c
            .iter()
            .enumerate()
            .map(|(j, cj)| cj + j as f64 * t)
            .collect();
        scale * log_sum_exp(&e) - weight(t)
    })
    .unwrap()
}

/// Smooth strictly `ω`-psh potential of the reference form.
pub fn fs_potential(grid: &Arc<QuadratureGrid>, c: &[f64]) -> InvariantPotential {
    log_poly(grid, c, 1.0 / (c.len() - 1) as f64, softplus)
}

/// Bounded potential of the semi-positive form.
pub fn big_potential(grid: &Arc<QuadratureGrid>, c: &[f64; 3]) -> InvariantPotential {
    log_poly(grid, c, 1.0, |t| softplus(2.0 * t))
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `‖H'' − H' H^{-1} H'‖` at `t` by central differences of step `h`.
pub fn ode_residual(g: &MatrixGeodesic, t: f64, h: f64) -> f64 {
    let m = |s: f64| geodesic_eval(g, s).as_matrix().clone();
    let (a, b, c) = (m(t - h), m(t), m(t + h));
    let first = (&c - &a) * C64::new(0.5 / h, 0.0);
    let second = (&c - &b * C64::new(2.0, 0.0) + &a) * C64::new(1.0 / (h * h), 0.0);
    let binv = b.try_inverse().unwrap();
    (second - &first * binv * &first).norm()
}
