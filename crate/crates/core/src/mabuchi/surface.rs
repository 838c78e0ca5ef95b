//! Weak geodesics sampled on `times × grid`.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::envelope::{envelope_sweep, SweepOptions, SweepStats};
use super::legendre::GeodesicDual;
use crate::error::{Error, Result};
use crate::toric::{self, BackgroundForm, InvariantPotential, QuadratureGrid};

/// `U(t, x)` on `T + 1` uniform times and the grid of the endpoints.
#[derive(Debug, Clone)]
pub struct GeodesicSurface {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
    u0: InvariantPotential,
    u1: InvariantPotential,
    form: BackgroundForm,
    dual: GeodesicDual,
}

/// Diagnostics written next to an exported surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSummary {
    pub steps: usize,
    pub grid_size: usize,
    pub epsilon: f64,
    pub boundary_gap: f64,
    pub convexity_defect: f64,
    pub lipschitz_constant: f64,
    pub max_increment_rate: f64,
    pub ma_residual: f64,
}

fn full_weights(u: &InvariantPotential, form: &BackgroundForm) -> Result<Vec<f64>> {
    toric::ma_masses(u, form)?;
    Ok(u.full_weight(form))
}

/// The weak geodesic between `u0` and `u1` for `form + ε ω`, by partial
/// Legendre transform, sampled at `steps + 1` uniform times.
pub fn weak_geodesic(
    u0: &InvariantPotential,
    u1: &InvariantPotential,
    form: &BackgroundForm,
    epsilon: f64,
    steps: usize,
) -> Result<GeodesicSurface> {
    u0.check_same_grid(u1)?;
    if steps < 2 {
        return Err(Error::InvalidParameter(
            "need at least two time steps".into(),
        ));
    }
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} must be nonnegative"
        )));
    }
    let form = form.with_epsilon(epsilon);
    let psi0 = full_weights(u0, &form)?;
    let psi1 = full_weights(u1, &form)?;
    let grid = u0.grid();
    let tau = grid.log_nodes();
    let dual = GeodesicDual::new(tau, &psi0, &psi1, form.mass())?;
    let background = form.weights_on(grid);
    let times: Vec<f64> = (0..=steps).map(|n| n as f64 / steps as f64).collect();
    let values = times
        .iter()
        .enumerate()
        .map(|(n, &t)| {
            if n == 0 {
                u0.values().to_vec()
            } else if n == steps {
                u1.values().to_vec()
            } else {
                tau.iter()
                    .zip(&background)
                    .map(|(&x, b)| dual.eval(t, x) - b)
                    .collect()
            }
        })
        .collect();
    Ok(GeodesicSurface {
        times,
        values,
        u0: u0.clone(),
        u1: u1.clone(),
        form,
        dual,
    })
}

impl GeodesicSurface {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        self.u0.grid()
    }

    /// The form including its `ε` part.
    pub fn form(&self) -> &BackgroundForm {
        &self.form
    }

    pub fn epsilon(&self) -> f64 {
        self.form.epsilon
    }

    pub fn endpoints(&self) -> (&InvariantPotential, &InvariantPotential) {
        (&self.u0, &self.u1)
    }

    pub fn dual(&self) -> &GeodesicDual {
        &self.dual
    }

    pub fn row(&self, n: usize) -> InvariantPotential {
        InvariantPotential::new(self.grid(), self.values[n].clone()).expect("rows are finite")
    }

    /// `u_t(x)` at any `t ∈ [0, 1]` and grid node `i`.
    pub fn eval_node(&self, t: f64, i: usize) -> f64 {
        let tau = self.grid().log_nodes()[i];
        self.dual.eval(t, tau) - self.form.weight(tau)
    }

    /// `u_t` on the grid at any `t ∈ [0, 1]`.
    pub fn slice(&self, t: f64) -> InvariantPotential {
        if t == 0.0 {
            return self.u0.clone();
        }
        if t == 1.0 {
            return self.u1.clone();
        }
        let values = (0..self.grid().len())
            .map(|i| self.eval_node(t, i))
            .collect();
        InvariantPotential::new(self.grid(), values).expect("finite")
    }

    /// Largest mismatch between the boundary rows and the endpoint data.
    pub fn boundary_gap(&self) -> f64 {
        let last = self.values.len() - 1;
        toric::sup_abs_diff(&self.values[0], self.u0.values())
            .max(toric::sup_abs_diff(&self.values[last], self.u1.values()))
    }

    /// Most negative second difference in `t` (zero when convex).
    pub fn convexity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for n in 1..self.values.len() - 1 {
            for i in 0..self.grid().len() {
                let second =
                    self.values[n + 1][i] - 2.0 * self.values[n][i] + self.values[n - 1][i];
                worst = worst.min(second);
            }
        }
        worst
    }

    /// `sup_x |u_0 − u_1|`.
    pub fn lipschitz_constant(&self) -> f64 {
        toric::sup_abs_diff(self.u0.values(), self.u1.values())
    }

    /// `sup_x (u_0 − u_1)`.
    pub fn one_sided_lipschitz_constant(&self) -> f64 {
        self.u0
            .values()
            .iter()
            .zip(self.u1.values())
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest `|U(t_{n+1}, x) − U(t_n, x)| / Δt`.
    pub fn max_increment_rate(&self) -> f64 {
        let mut worst = 0.0f64;
        for n in 0..self.values.len() - 1 {
            let dt = self.times[n + 1] - self.times[n];
            worst = worst.max(toric::sup_abs_diff(&self.values[n + 1], &self.values[n]) / dt);
        }
        worst
    }

    /// Largest excess over the chord `(1 − t) u_0 + t u_1`.
    pub fn affine_bound_excess(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for (n, &t) in self.times.iter().enumerate() {
            for i in 0..self.grid().len() {
                let chord = (1.0 - t) * self.u0.values()[i] + t * self.u1.values()[i];
                worst = worst.max(self.values[n][i] - chord);
            }
        }
        worst
    }

    /// Discrete Monge–Ampère residual at interior nodes: the curvature along the
    /// local ruling direction times the τ-curvature of the time slice.
    pub fn ma_residual(&self) -> f64 {
        let grid = self.grid();
        let tau = grid.log_nodes();
        let m = tau.len();
        let dt = 1.0 / self.steps() as f64;
        let mut worst = 0.0f64;
        for n in 1..self.steps() {
            let t = self.times[n];
            let h = dt.min(t).min(1.0 - t);
            let psi: Vec<f64> = (0..m).map(|i| self.dual.eval(t, tau[i])).collect();
            for i in 1..m - 1 {
                let v = self.dual.ruling_slope(t, tau[i]);
                let along = (self.dual.eval(t + h, tau[i] + h * v) - 2.0 * psi[i]
                    + self.dual.eval(t - h, tau[i] - h * v))
                    / (h * h);
                let (l, r) = (tau[i] - tau[i - 1], tau[i + 1] - tau[i]);
                let across =
                    2.0 * ((psi[i + 1] - psi[i]) / r - (psi[i] - psi[i - 1]) / l) / (l + r);
                worst = worst.max((along * across).abs());
            }
        }
        worst
    }

    pub fn summary(&self) -> SurfaceSummary {
        SurfaceSummary {
            steps: self.steps(),
            grid_size: self.grid().len(),
            epsilon: self.epsilon(),
            boundary_gap: self.boundary_gap(),
            convexity_defect: self.convexity_defect(),
            lipschitz_constant: self.lipschitz_constant(),
            max_increment_rate: self.max_increment_rate(),
            ma_residual: self.ma_residual(),
        }
    }

    /// Checks boundary exactness, `t`-convexity and the `t`-Lipschitz bound.
    pub fn validate(&self) -> Result<()> {
        let s = self.summary();
        if s.boundary_gap != 0.0 {
            return Err(Error::SurfaceInvariant(format!(
                "boundary gap {}",
                s.boundary_gap
            )));
        }
        if s.convexity_defect < -1e-8 {
            return Err(Error::SurfaceInvariant(format!(
                "convexity defect {}",
                s.convexity_defect
            )));
        }
        if s.max_increment_rate > s.lipschitz_constant + 1e-8 {
            return Err(Error::SurfaceInvariant(format!(
                "increment rate {} exceeds {}",
                s.max_increment_rate, s.lipschitz_constant
            )));
        }
        Ok(())
    }

    /// Solves the same problem with the envelope sweep and returns
    /// `max |U_sweep − U|` over the grid.
    pub fn cross_check(&self, opts: &SweepOptions) -> Result<(f64, SweepStats)> {
        let tau = self.grid().log_nodes();
        let psi0 = self.u0.full_weight(&self.form);
        let psi1 = self.u1.full_weight(&self.form);
        let background = self.form.weights_on(self.grid());
        let (sweep, stats) =
            envelope_sweep(tau, &psi0, &psi1, self.form.mass(), self.steps(), opts)?;
        let mut worst = 0.0f64;
        for (row, ours) in sweep.iter().zip(&self.values) {
            for ((s, b), u) in row.iter().zip(&background).zip(ours) {
                worst = worst.max((s - b - u).abs());
            }
        }
        Ok((worst, stats))
    }

    /// Mesh size of the `(t, τ)` grid: `max(Δt, max Δτ)`.
    pub fn resolution(&self) -> f64 {
        (1.0 / self.steps() as f64).max(self.grid().max_log_spacing())
    }

    /// Writes the surface as a matrix (one row per time) and a JSON sidecar.
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["t".to_string()];
        header.extend(self.grid().nodes().iter().map(|x| format!("x={x:e}")));
        w.write_record(&header)?;
        for (t, row) in self.times.iter().zip(&self.values) {
            let mut rec = vec![format!("{t:e}")];
            rec.extend(row.iter().map(|v| format!("{v:e}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
        let sidecar = path.with_extension("summary.json");
        std::fs::write(sidecar, serde_json::to_string_pretty(&self.summary())?)?;
        Ok(())
    }
}
