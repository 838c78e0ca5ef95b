//! Three-step quantization of weak geodesics for a semi-positive big form.
//!
//! For each rung `ℓ`: regularize the form to `θ + ω/ℓ` (step 1), smooth the
//! endpoints with index `j` (step 2), then quantize the smoothed endpoints in
//! degree `k(2ℓ + 1)`, join them by the matrix geodesic and map back through
//! `(1/ℓ) FS` (step 3).
//!
//! Degree bookkeeping: `θ` has degree 2 and `ω` degree 1, so `ℓθ + ω` has
//! degree `2ℓ + 1`. A `(θ + ω/ℓ)`-potential `u` becomes the unit-mass
//! potential `w = (g + ℓu) / (2ℓ + 1)` with `g = ℓ(ln(1 + x²) − 2 ln(1 + x))`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermgeo::{HermitianMatrix, MatrixGeodesic};
use crate::lse::log_sum_exp;
use crate::mabuchi::{smooth_decreasing, weak_geodesic, GeodesicSurface};
use crate::quantmaps::hilb_log_diagonal;
use crate::toric::{softplus, BackgroundForm, InvariantPotential, LineBundleModel, QuadratureGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderConfig {
    pub ell_max: usize,
    /// Rungs to run, each in `1..=ell_max`.
    pub rungs: Vec<usize>,
    pub delta: f64,
    pub steps: usize,
    pub grid_size: usize,
    pub j_cap: usize,
    pub k_cap: usize,
}

impl Default for LadderConfig {
    fn default() -> Self {
        Self {
            ell_max: 4,
            rungs: vec![1, 2, 4],
            delta: crate::toric::DEFAULT_DELTA,
            steps: 16,
            grid_size: 256,
            j_cap: 256,
            k_cap: 128,
        }
    }
}

impl LadderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ell_max == 0 || self.j_cap == 0 || self.k_cap == 0 {
            return Err(Error::InvalidParameter(
                "caps and ell_max must be at least 1".into(),
            ));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta {} not in (0, 1)",
                self.delta
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidParameter(
                "need at least two time steps".into(),
            ));
        }
        if self.rungs.iter().any(|&l| l == 0 || l > self.ell_max) {
            return Err(Error::InvalidParameter(
                "rungs must lie in 1..=ell_max".into(),
            ));
        }
        Ok(())
    }

    /// `ε` of the reference geodesic that stands in for the `θ`-geodesic.
    pub fn reference_epsilon(&self) -> f64 {
        1.0 / (4.0 * self.ell_max as f64)
    }
}

/// One rung of the ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RungRecord {
    pub ell: usize,
    pub epsilon: f64,
    pub j_chosen: usize,
    pub k_chosen: usize,
    pub degree: usize,
    pub step1_error: f64,
    pub step2_error: f64,
    pub step3_error: f64,
    pub total_error_on_k: f64,
    /// Step-2 errors at every `j` tried, in search order.
    pub j_trials: Vec<(usize, f64)>,
    /// Step-3 errors at every `k` tried, in search order.
    pub k_trials: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub config: LadderConfig,
    pub reference_epsilon: f64,
    pub rungs: Vec<RungRecord>,
}

/// The quantized path of one rung, kept so that every `û_t` can be replayed.
#[derive(Debug, Clone)]
pub struct QuantizedPath {
    pub ell: usize,
    pub k: usize,
    pub geodesic: MatrixGeodesic,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct RungArtifacts {
    pub record: RungRecord,
    pub regularized: GeodesicSurface,
    pub smoothed: GeodesicSurface,
    pub quantized: QuantizedPath,
}

#[derive(Debug, Clone)]
pub struct LadderRun {
    pub report: LadderReport,
    pub reference: GeodesicSurface,
    pub rungs: Vec<RungArtifacts>,
}

/// `g = ℓ(ln(1 + x²) − 2 ln(1 + x))`.
fn degree_shift(ell: usize, tau: f64) -> f64 {
    ell as f64 * (softplus(2.0 * tau) - 2.0 * softplus(tau))
}

/// Unit-mass potential in the degree-`(2ℓ+1)` normalization.
pub fn lift_potential(u: &InvariantPotential, ell: usize) -> Result<InvariantPotential> {
    let scale = (2 * ell + 1) as f64;
    let values = u
        .values()
        .iter()
        .zip(u.grid().log_nodes())
        .map(|(v, &t)| (degree_shift(ell, t) + ell as f64 * v) / scale)
        .collect();
    InvariantPotential::new(u.grid(), values)
}

/// Inverse of [`lift_potential`]: `u = ((2ℓ+1) w − g) / ℓ`.
pub fn lower_potential(w: &[f64], grid: &QuadratureGrid, ell: usize) -> Vec<f64> {
    let scale = (2 * ell + 1) as f64;
    w.iter()
        .zip(grid.log_nodes())
        .map(|(v, &t)| (scale * v - degree_shift(ell, t)) / ell as f64)
        .collect()
}

/// Matrix geodesic between `N · Hilb_D` of the lifted endpoints; the factor
/// `N = D + 1` removes the constant `ln N / D` of the Bergman roundtrip.
pub fn quantize_endpoints(
    u0: &InvariantPotential,
    u1: &InvariantPotential,
    ell: usize,
    k: usize,
) -> Result<MatrixGeodesic> {
    let degree = k * (2 * ell + 1);
    let model = LineBundleModel::new(degree, Arc::clone(u0.grid()))?;
    let log_n = ((degree + 1) as f64).ln();
    let h0 = hilb_log_diagonal(&lift_potential(u0, ell)?, &model)?;
    let h1 = hilb_log_diagonal(&lift_potential(u1, ell)?, &model)?;
    let p: Vec<f64> = h0.iter().map(|l| (0.5 * (l + log_n)).exp()).collect();
    if let Some(i) = p.iter().position(|v| !v.is_normal()) {
        return Err(Error::NonFinite(i));
    }
    let a: Vec<f64> = h0.iter().zip(&h1).map(|(x, y)| y - x).collect();
    let base = crate::linalg::diagonal_matrix(&p);
    MatrixGeodesic::new(base, HermitianMatrix::from_real_diagonal(&a))
}

/// `û_t = (1/ℓ) FS_k(H_t)` on the grid, relative to `θ + ω/ℓ`.
pub fn quantized_slice(
    geodesic: &MatrixGeodesic,
    grid: &Arc<QuadratureGrid>,
    ell: usize,
    t: f64,
) -> Result<Vec<f64>> {
    let degree = geodesic.dim() - 1;
    let model = LineBundleModel::new(degree, Arc::clone(grid))?;
    let coeffs = crate::quantmaps::geodesic_log_coeffs(geodesic, t)?;
    let d = degree as f64;
    let mut terms = vec![0.0; coeffs.len()];
    let w: Vec<f64> = (0..grid.len())
        .map(|i| {
            for (j, slot) in terms.iter_mut().enumerate() {
                *slot = coeffs[j] + model.log_fiber_norm(j, i);
            }
            log_sum_exp(&terms) / d
        })
        .collect();
    Ok(lower_potential(&w, grid, ell))
}

fn sup_over(a: &[Vec<f64>], b: &[Vec<f64>], idx: Option<&[usize]>) -> f64 {
    let mut worst = 0.0f64;
    for (ra, rb) in a.iter().zip(b) {
        match idx {
            Some(idx) => {
                for &i in idx {
                    worst = worst.max((ra[i] - rb[i]).abs());
                }
            }
            None => {
                for (x, y) in ra.iter().zip(rb) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
    }
    worst
}

/// Smallest index in `1..=cap` passing `ok`, by doubling then bisection. The
/// closure returns the error at an index; every evaluation is recorded.
fn search_index<F>(
    cap: usize,
    target: f64,
    what: &'static str,
    mut error_at: F,
) -> Result<(usize, Vec<(usize, f64)>)>
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut trials = Vec::new();
    let mut best = f64::INFINITY;
    let mut failing = 0usize;
    let mut idx = 1usize;
    let passing = loop {
        let e = error_at(idx)?;
        trials.push((idx, e));
        best = best.min(e);
        if e <= target {
            break idx;
        }
        failing = idx;
        if idx >= cap {
            return Err(Error::CapExhausted {
                what,
                cap,
                best,
                target,
            });
        }
        idx = (idx * 2).min(cap);
    };
    let (mut lo, mut hi) = (failing, passing);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let e = error_at(mid)?;
        trials.push((mid, e));
        if e <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, trials))
}

/// Selected indices and the artifacts they produce.
#[derive(Debug, Clone)]
pub struct Selection {
    pub j: usize,
    pub k: usize,
    pub smoothed: GeodesicSurface,
    pub quantized: QuantizedPath,
    pub step2_error: f64,
    pub step3_error: f64,
    pub j_trials: Vec<(usize, f64)>,
    pub k_trials: Vec<(usize, f64)>,
}

/// Finds the smallest `j` with the smoothed geodesic within `1/ℓ` of the
/// regularized one, then the smallest `k` with the quantized path within `1/ℓ`
/// of the smoothed geodesic.
pub fn select_indices(
    regularized: &GeodesicSurface,
    ell: usize,
    config: &LadderConfig,
) -> Result<Selection> {
    let target = 1.0 / ell as f64;
    let (u0, u1) = regularized.endpoints();
    let epsilon = regularized.epsilon();
    let base = BackgroundForm {
        epsilon: 0.0,
        ..*regularized.form()
    };
    let steps = regularized.steps();
    let smoothed_at = |j: usize| -> Result<GeodesicSurface> {
        let a = smooth_decreasing(u0, j, &base, epsilon)?;
        let b = smooth_decreasing(u1, j, &base, epsilon)?;
        weak_geodesic(&a, &b, &base, epsilon, steps)
    };
    let step = |s: u8| {
        move |e: Error| Error::LadderStep {
            rung: ell,
            step: s,
            source: Box::new(e),
        }
    };
    let (j, j_trials) = search_index(config.j_cap, target, "smoothing index j", |j| {
        Ok(sup_over(
            smoothed_at(j)?.values(),
            regularized.values(),
            None,
        ))
    })
    .map_err(step(2))?;
    let smoothed = smoothed_at(j).map_err(step(2))?;
    let step2_error = sup_over(smoothed.values(), regularized.values(), None);

    let (s0, s1) = smoothed.endpoints();
    let grid = s0.grid();
    let path_at = |k: usize| -> Result<QuantizedPath> {
        let geodesic = quantize_endpoints(s0, s1, ell, k)?;
        let values = smoothed
            .times()
            .iter()
            .map(|&t| quantized_slice(&geodesic, grid, ell, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(QuantizedPath {
            ell,
            k,
            geodesic,
            times: smoothed.times().to_vec(),
            values,
        })
    };
    let (k, k_trials) = search_index(config.k_cap, target, "quantization index k", |k| {
        Ok(sup_over(&path_at(k)?.values, smoothed.values(), None))
    })
    .map_err(step(3))?;
    let quantized = path_at(k).map_err(step(3))?;
    let step3_error = sup_over(&quantized.values, smoothed.values(), None);
    Ok(Selection {
        j,
        k,
        smoothed,
        quantized,
        step2_error,
        step3_error,
        j_trials,
        k_trials,
    })
}

/// Runs every configured rung for the endpoints `u0`, `u1` of `form`.
pub fn run_ladder(
    u0: &InvariantPotential,
    u1: &InvariantPotential,
    form: &BackgroundForm,
    config: &LadderConfig,
) -> Result<LadderRun> {
    config.validate()?;
    let base = BackgroundForm {
        epsilon: 0.0,
        ..*form
    };
    let reference_epsilon = config.reference_epsilon();
    let reference = weak_geodesic(u0, u1, &base, reference_epsilon, config.steps)?;
    let compact = u0.grid().compact_indices(config.delta);
    let rungs = config
        .rungs
        .par_iter()
        .map(|&ell| -> Result<RungArtifacts> {
            let epsilon = 1.0 / ell as f64;
            let regularized = weak_geodesic(u0, u1, &base, epsilon, config.steps).map_err(|e| {
                Error::LadderStep {
                    rung: ell,
                    step: 1,
                    source: Box::new(e),
                }
            })?;
            let step1_error = sup_over(regularized.values(), reference.values(), Some(&compact));
            let sel = select_indices(&regularized, ell, config)?;
            let total_error_on_k =
                sup_over(&sel.quantized.values, reference.values(), Some(&compact));
            let record = RungRecord {
                ell,
                epsilon,
                j_chosen: sel.j,
                k_chosen: sel.k,
                degree: sel.k * (2 * ell + 1),
                step1_error,
                step2_error: sel.step2_error,
                step3_error: sel.step3_error,
                total_error_on_k,
                j_trials: sel.j_trials,
                k_trials: sel.k_trials,
            };
            Ok(RungArtifacts {
                record,
                regularized,
                smoothed: sel.smoothed,
                quantized: sel.quantized,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LadderRun {
        report: LadderReport {
            config: config.clone(),
            reference_epsilon,
            rungs: rungs.iter().map(|r| r.record.clone()).collect(),
        },
        reference,
        rungs,
    })
}

impl QuantizedPath {
    /// Recomputes every `û_t` from the stored geodesic; true when all values
    /// agree bit for bit.
    pub fn replays(&self, grid: &Arc<QuadratureGrid>) -> Result<bool> {
        for (t, row) in self.times.iter().zip(&self.values) {
            let again = quantized_slice(&self.geodesic, grid, self.ell, *t)?;
            if again
                .iter()
                .zip(row)
                .any(|(a, b)| a.to_bits() != b.to_bits())
            {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
