//! The model geometry: `O(d)` over the projective line with its Fubini–Study
//! reference metric, S¹-invariant potentials sampled on a quadrature grid, and
//! the discrete Monge–Ampère measure in the log coordinate.
//!
//! Coordinates: `x = |z|^2`, `τ = ln x`, `s = x / (1 + x)`. The reference form
//! has unit density in `s`, so the grid is Gauss–Legendre on `s ∈ (0, 1)`.

use std::num::NonZeroUsize;
use std::path::Path;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

pub const DEFAULT_GRID: usize = 256;
pub const MIN_GRID: usize = 16;
pub const DEFAULT_DELTA: f64 = 0.05;
const PSH_TOL: f64 = 1e-9;

/// `ln(1 + e^τ)` without overflow.
pub fn softplus(tau: f64) -> f64 {
    if tau > 0.0 {
        tau + (-tau).exp().ln_1p()
    } else {
        tau.exp().ln_1p()
    }
}

/// `e^τ / (1 + e^τ)`.
pub fn logistic(tau: f64) -> f64 {
    if tau >= 0.0 {
        1.0 / (1.0 + (-tau).exp())
    } else {
        let e = tau.exp();
        e / (1.0 + e)
    }
}

/// Quadrature nodes on `(0, ∞)` with weights summing to the unit reference volume.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    s: Vec<f64>,
    one_minus_s: Vec<f64>,
    weights: Vec<f64>,
    log_nodes: Vec<f64>,
}

impl QuadratureGrid {
    /// Gauss–Legendre rule on `s ∈ (0,1)` with `size` nodes.
    pub fn gauss_legendre(size: usize) -> Result<Self> {
        if size < MIN_GRID {
            return Err(Error::InvalidParameter(format!(
                "grid size {size} below minimum {MIN_GRID}"
            )));
        }
        let rule = GaussLegendre::new(NonZeroUsize::new(size).expect("size checked"));
        let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut s = vec![0.0; size];
        let mut weights = vec![0.0; size];
        // Take the accurate small side from the symmetric partner so that
        // s and 1 − s are both exact mirror images.
        for i in 0..size {
            let mirror = size - 1 - i;
            let (xi, w) = pairs[i];
            let (xi_m, w_m) = pairs[mirror];
            s[i] = if i <= mirror {
                0.5 * (1.0 + xi)
            } else {
                0.5 * (1.0 - xi_m)
            };
            weights[i] = 0.25 * (w + w_m);
        }
        let one_minus_s: Vec<f64> = (0..size).map(|i| s[size - 1 - i]).collect();
        Self::from_parts(s, one_minus_s, weights)
    }

    /// Grid at prescribed log-nodes with cell weights `s(τ_{i+½}) − s(τ_{i−½})`.
    pub fn from_log_nodes(log_nodes: &[f64]) -> Result<Self> {
        let m = log_nodes.len();
        if m < 2 {
            return Err(Error::InvalidParameter("need at least two nodes".into()));
        }
        if log_nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "log nodes must increase strictly".into(),
            ));
        }
        let s: Vec<f64> = log_nodes.iter().map(|&t| logistic(t)).collect();
        let one_minus_s: Vec<f64> = log_nodes.iter().map(|&t| logistic(-t)).collect();
        let mut edges = Vec::with_capacity(m + 1);
        edges.push(0.0);
        for w in log_nodes.windows(2) {
            edges.push(logistic(0.5 * (w[0] + w[1])));
        }
        edges.push(1.0);
        let weights = edges.windows(2).map(|e| e[1] - e[0]).collect();
        Self::from_parts(s, one_minus_s, weights)
    }

    /// Uniform log grid on `[-half_width, half_width]`.
    pub fn uniform_log(size: usize, half_width: f64) -> Result<Self> {
        if size < 2 || !(half_width > 0.0) {
            return Err(Error::InvalidParameter("degenerate uniform grid".into()));
        }
        let h = 2.0 * half_width / (size - 1) as f64;
        let nodes: Vec<f64> = (0..size).map(|i| -half_width + h * i as f64).collect();
        Self::from_log_nodes(&nodes)
    }

    fn from_parts(s: Vec<f64>, one_minus_s: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let log_nodes: Vec<f64> = s
            .iter()
            .zip(&one_minus_s)
            .map(|(a, b)| a.ln() - b.ln())
            .collect();
        if log_nodes.windows(2).any(|w| !(w[1] > w[0])) || weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidParameter("degenerate quadrature".into()));
        }
        Ok(Self {
            s,
            one_minus_s,
            weights,
            log_nodes,
        })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// `x_i = e^{τ_i}`.
    pub fn nodes(&self) -> Vec<f64> {
        self.log_nodes.iter().map(|t| t.exp()).collect()
    }

    pub fn log_nodes(&self) -> &[f64] {
        &self.log_nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn moment_nodes(&self) -> &[f64] {
        &self.s
    }

    pub fn complementary_moment_nodes(&self) -> &[f64] {
        &self.one_minus_s
    }

    /// Density of the reference form against the weights (identically one).
    pub fn reference_density(&self) -> Vec<f64> {
        vec![1.0; self.len()]
    }

    /// Indices of nodes with `x ∈ [δ, 1/δ]`.
    pub fn compact_indices(&self, delta: f64) -> Vec<usize> {
        let bound = -delta.ln();
        (0..self.len())
            .filter(|&i| self.log_nodes[i].abs() <= bound)
            .collect()
    }

    /// Largest gap between consecutive log-nodes.
    pub fn max_log_spacing(&self) -> f64 {
        self.log_nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn same_as(&self, other: &QuadratureGrid) -> bool {
        std::ptr::eq(self, other) || self == other
    }
}

/// `Σ values_i · density_i · weight_i`.
pub fn integrate(values: &[f64], density: &[f64], grid: &QuadratureGrid) -> Result<f64> {
    if values.len() != grid.len() || density.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: if values.len() != grid.len() {
                values.len()
            } else {
                density.len()
            },
        });
    }
    Ok(values
        .iter()
        .zip(density)
        .zip(grid.weights())
        .map(|((v, d), w)| v * d * w)
        .sum())
}

/// The line bundle `O(d)` with monomial sections `z^j`, `j = 0..=d`.
#[derive(Debug, Clone)]
pub struct LineBundleModel {
    degree: usize,
    grid: Arc<QuadratureGrid>,
}

impl LineBundleModel {
    pub fn new(degree: usize, grid: Arc<QuadratureGrid>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidParameter("degree must be at least 1".into()));
        }
        Ok(Self { degree, grid })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim_sections(&self) -> usize {
        self.degree + 1
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    /// `|z^j|^2 = x^j / (1 + x)^d`.
    pub fn fiber_norm(&self, j: usize, x: f64) -> f64 {
        let d = self.degree as i32;
        let s = x / (1.0 + x);
        let r = 1.0 / (1.0 + x);
        s.powi(j as i32) * r.powi(d - j as i32)
    }

    pub fn fiber_norms(&self, x: f64) -> Vec<f64> {
        (0..=self.degree).map(|j| self.fiber_norm(j, x)).collect()
    }

    /// `ln |z^j|^2` at grid node `i`.
    pub fn log_fiber_norm(&self, j: usize, i: usize) -> f64 {
        let a = if j == 0 {
            0.0
        } else {
            j as f64 * self.grid.s[i].ln()
        };
        let b = if j == self.degree {
            0.0
        } else {
            (self.degree - j) as f64 * self.grid.one_minus_s[i].ln()
        };
        a + b
    }

    pub fn ln_binomial(&self, j: usize) -> f64 {
        ln_binomial(self.degree as u64, j as u64)
    }
}

/// Model of degree `degree` on a Gauss–Legendre grid of `grid_size` nodes.
pub fn build_model(degree: usize, grid_size: usize) -> Result<LineBundleModel> {
    LineBundleModel::new(degree, Arc::new(QuadratureGrid::gauss_legendre(grid_size)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    /// The reference form, mass 1, weight `ln(1 + e^τ)`.
    FubiniStudy,
    /// Pullback of the reference form under `z ↦ z^2`: mass 2, weight
    /// `ln(1 + e^{2τ})`, vanishing at both poles.
    SemipositiveBig,
}

/// A background form plus `ε` times the reference form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundForm {
    pub kind: FormKind,
    pub epsilon: f64,
}

impl BackgroundForm {
    pub fn fubini_study() -> Self {
        Self {
            kind: FormKind::FubiniStudy,
            epsilon: 0.0,
        }
    }

    pub fn semipositive_big() -> Self {
        Self {
            kind: FormKind::SemipositiveBig,
            epsilon: 0.0,
        }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        Self { epsilon, ..self }
    }

    fn base_mass(&self) -> f64 {
        match self.kind {
            FormKind::FubiniStudy => 1.0,
            FormKind::SemipositiveBig => 2.0,
        }
    }

    /// Total mass of the class; also the upper end of the moment interval.
    pub fn mass(&self) -> f64 {
        self.base_mass() + self.epsilon
    }

    /// The weight `φ0(τ)`.
    pub fn weight(&self, tau: f64) -> f64 {
        let base = match self.kind {
            FormKind::FubiniStudy => softplus(tau),
            FormKind::SemipositiveBig => softplus(2.0 * tau),
        };
        base + self.epsilon * softplus(tau)
    }

    /// `φ0'(τ)`, the moment map of the background.
    pub fn slope(&self, tau: f64) -> f64 {
        let base = match self.kind {
            FormKind::FubiniStudy => logistic(tau),
            FormKind::SemipositiveBig => 2.0 * logistic(2.0 * tau),
        };
        base + self.epsilon * logistic(tau)
    }

    /// Density of the form with respect to the reference form, `φ0'' / (s (1 − s))`.
    pub fn density(&self, tau: f64) -> f64 {
        let base = match self.kind {
            FormKind::FubiniStudy => 1.0,
            FormKind::SemipositiveBig => {
                // 4 x (1 + x)^2 / (1 + x^2)^2, written in the bounded variable s.
                let s = logistic(tau);
                let r = logistic(-tau);
                let q = s * s + r * r;
                4.0 * s * r / (q * q)
            }
        };
        base + self.epsilon
    }

    pub fn weights_on(&self, grid: &QuadratureGrid) -> Vec<f64> {
        grid.log_nodes().iter().map(|&t| self.weight(t)).collect()
    }

    pub fn density_on(&self, grid: &QuadratureGrid) -> Vec<f64> {
        grid.log_nodes().iter().map(|&t| self.density(t)).collect()
    }
}

/// An S¹-invariant potential sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantPotential {
    values: Vec<f64>,
    grid: Arc<QuadratureGrid>,
}

impl InvariantPotential {
    pub fn new(grid: &Arc<QuadratureGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            values,
            grid: Arc::clone(grid),
        })
    }

    pub fn zero(grid: &Arc<QuadratureGrid>) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid: Arc::clone(grid),
        }
    }

    pub fn constant(grid: &Arc<QuadratureGrid>, c: f64) -> Self {
        Self {
            values: vec![c; grid.len()],
            grid: Arc::clone(grid),
        }
    }

    /// Samples `f(τ)` at the log-nodes.
    pub fn from_log_fn<F: Fn(f64) -> f64>(grid: &Arc<QuadratureGrid>, f: F) -> Result<Self> {
        Self::new(grid, grid.log_nodes().iter().map(|&t| f(t)).collect())
    }

    /// Samples `f(x)` at the nodes.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: &Arc<QuadratureGrid>, f: F) -> Result<Self> {
        Self::from_log_fn(grid, |t| f(t.exp()))
    }

    /// Potential whose full weight is `ψ(τ)`: `u = ψ − φ0`.
    pub fn from_full_weight(
        grid: &Arc<QuadratureGrid>,
        form: &BackgroundForm,
        full: &[f64],
    ) -> Result<Self> {
        let values = full
            .iter()
            .zip(grid.log_nodes())
            .map(|(p, &t)| p - form.weight(t))
            .collect();
        Self::new(grid, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v + c).collect(),
            grid: Arc::clone(&self.grid),
        }
    }

    /// `ψ_i = φ0(τ_i) + u_i`.
    pub fn full_weight(&self, form: &BackgroundForm) -> Vec<f64> {
        self.values
            .iter()
            .zip(self.grid.log_nodes())
            .map(|(u, &t)| form.weight(t) + u)
            .collect()
    }

    pub fn check_same_grid(&self, other: &InvariantPotential) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `max_i |u_i − v_i|`.
    pub fn sup_distance(&self, other: &InvariantPotential) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(sup_abs_diff(&self.values, &other.values))
    }

    /// `max_{i ∈ idx} |u_i − v_i|`.
    pub fn sup_distance_on(&self, other: &InvariantPotential, idx: &[usize]) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(idx
            .iter()
            .map(|&i| (self.values[i] - other.values[i]).abs())
            .fold(0.0, f64::max))
    }

    /// Writes `(x, u)` rows with a header.
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["x", "u"])?;
        for (t, u) in self.grid.log_nodes().iter().zip(&self.values) {
            w.write_record([format!("{:e}", t.exp()), format!("{u:e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `(x, u)` rows; the `x` column must match the grid nodes.
    pub fn read_csv<P: AsRef<Path>>(grid: &Arc<QuadratureGrid>, path: P) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let mut values = Vec::with_capacity(grid.len());
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k)
                    .ok_or_else(|| Error::Parse(format!("row {i}: missing column {k}")))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {i}: {e}")))
            };
            let x = parse(0)?;
            let tau = *grid.log_nodes().get(i).ok_or(Error::GridMismatch)?;
            if (x.ln() - tau).abs() > 1e-9 * (1.0 + tau.abs()) {
                return Err(Error::GridMismatch);
            }
            values.push(parse(1)?);
        }
        Self::new(grid, values)
    }
}

pub(crate) fn sup_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Discrete Monge–Ampère measure of a full weight `ψ` on log-nodes `τ`.
///
/// Node `i` carries the length of the slope interval `[m_{i−½}, m_{i+½}]` of the
/// piecewise-linear extension, with end slopes `0` and `mass`. Node masses
/// telescope to exactly `mass`.
pub fn node_masses(psi: &[f64], tau: &[f64], mass: f64) -> Vec<f64> {
    let m = psi.len();
    let mut slopes = Vec::with_capacity(m + 1);
    slopes.push(0.0);
    for i in 0..m - 1 {
        slopes.push((psi[i + 1] - psi[i]) / (tau[i + 1] - tau[i]));
    }
    slopes.push(mass);
    slopes.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Node masses of `form + dd^c u`; errors when some node mass is negative
/// beyond roundoff.
pub fn ma_masses(u: &InvariantPotential, form: &BackgroundForm) -> Result<Vec<f64>> {
    let masses = node_masses(&u.full_weight(form), u.grid.log_nodes(), form.mass());
    let tol = PSH_TOL * form.mass();
    if let Some((node, &mass)) = masses.iter().enumerate().find(|(_, m)| **m < -tol) {
        return Err(Error::NotPsh { node, mass });
    }
    Ok(masses)
}

/// Density of `form + dd^c u` against the grid weights, so that integrating one
/// returns the mass of the class.
pub fn ma_density(u: &InvariantPotential, form: &BackgroundForm) -> Result<Vec<f64>> {
    let masses = ma_masses(u, form)?;
    Ok(masses
        .iter()
        .zip(u.grid.weights())
        .map(|(m, w)| m.max(0.0) / w)
        .collect())
}

/// True when every node mass is at least `-tol`.
pub fn is_psh(u: &InvariantPotential, form: &BackgroundForm) -> bool {
    ma_masses(u, form).is_ok()
}

/// Smallest node density, positive for strictly psh potentials.
pub fn min_density(u: &InvariantPotential, form: &BackgroundForm) -> f64 {
    let masses = node_masses(&u.full_weight(form), u.grid.log_nodes(), form.mass());
    masses
        .iter()
        .zip(u.grid.weights())
        .map(|(m, w)| m / w)
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fiber_norm_examples() {
        let model = build_model(2, 64).unwrap();
        assert_eq!(model.fiber_norms(1.0), vec![0.25, 0.25, 0.25]);
        let model = build_model(1, 64).unwrap();
        let near_zero = model.fiber_norms(1e-300);
        assert_eq!(near_zero[0], 1.0);
        assert!(near_zero[1] < 1e-299);
    }

    #[test]
    fn binomial_partition_of_unity() {
        let grid = Arc::new(QuadratureGrid::gauss_legendre(128).unwrap());
        for d in [1usize, 5, 17, 64] {
            let model = LineBundleModel::new(d, Arc::clone(&grid)).unwrap();
            for i in 0..grid.len() {
                let total: f64 = (0..=d)
                    .map(|j| (model.ln_binomial(j) + model.log_fiber_norm(j, i)).exp())
                    .sum();
                assert!((total - 1.0).abs() < 1e-12, "d={d} i={i} {total}");
            }
        }
    }

    #[test]
    fn grid_is_symmetric_and_normalized() {
        let grid = QuadratureGrid::gauss_legendre(DEFAULT_GRID).unwrap();
        let total: f64 = grid.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
        let tau = grid.log_nodes();
        for i in 0..tau.len() {
            assert_eq!(tau[i], -tau[tau.len() - 1 - i]);
        }
        assert!(grid.log_nodes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn semipositive_density_vanishes_at_poles() {
        let form = BackgroundForm::semipositive_big();
        assert!(form.density(-40.0) < 1e-16);
        assert!(form.density(40.0) < 1e-16);
        assert!((form.density(0.0) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn node_masses_telescope() {
        let grid = Arc::new(QuadratureGrid::gauss_legendre(64).unwrap());
        let u = InvariantPotential::from_log_fn(&grid, |t| {
            0.5 * (1.0 + t.exp() + (2.0 * t).exp()).ln() - softplus(t)
        })
        .unwrap();
        let form = BackgroundForm::fubini_study().with_epsilon(0.5);
        let total: f64 = ma_masses(&u, &form).unwrap().iter().sum();
        assert!((total - 1.5).abs() < 1e-14);
    }

    #[test]
    fn non_psh_is_flagged() {
        let grid = Arc::new(QuadratureGrid::gauss_legendre(64).unwrap());
        let u = InvariantPotential::from_log_fn(&grid, |t| -2.0 * softplus(t)).unwrap();
        assert!(matches!(
            ma_density(&u, &BackgroundForm::fubini_study()),
            Err(Error::NotPsh { .. })
        ));
    }
}
