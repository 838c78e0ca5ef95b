//! Iterative convex-envelope sweep, an independent solver for weak geodesics.
//!
//! Starting from the affine-in-`t` upper bound, every interior value is pushed
//! down to the chord values of a fixed family of stencils (τ-neighbours and
//! oblique `(t, τ)` pairs) until nothing moves. The limit is the largest grid
//! function satisfying all stencil convexity constraints.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SweepOptions {
    /// Oblique slopes `dτ/dt` sampled in `[-max_slope, max_slope]`.
    pub max_slope: f64,
    pub slope_step: f64,
    /// Largest time offset (in steps) on either side of a stencil.
    pub max_reach: usize,
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            max_slope: 4.0,
            slope_step: 0.1,
            max_reach: 2,
            tolerance: 1e-13,
            max_sweeps: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepStats {
    pub sweeps: usize,
    pub last_change: f64,
}

/// Row value at an arbitrary `τ`, with the same extension rule as the data:
/// constant on the left, slope `mass` on the right.
fn row_value(tau: &[f64], row: &[f64], mass: f64, x: f64) -> f64 {
    let m = tau.len();
    if x <= tau[0] {
        return row[0];
    }
    if x >= tau[m - 1] {
        return row[m - 1] + mass * (x - tau[m - 1]);
    }
    let k = tau.partition_point(|v| *v <= x).min(m - 1);
    let (a, b) = (k - 1, k);
    let w = (x - tau[a]) / (tau[b] - tau[a]);
    (1.0 - w) * row[a] + w * row[b]
}

/// Full weights on `times × tau` for the envelope with boundary rows `psi0`, `psi1`.
pub fn envelope_sweep(
    tau: &[f64],
    psi0: &[f64],
    psi1: &[f64],
    mass: f64,
    steps: usize,
    opts: &SweepOptions,
) -> Result<(Vec<Vec<f64>>, SweepStats)> {
    let m = tau.len();
    if psi0.len() != m || psi1.len() != m {
        return Err(Error::GridMismatch);
    }
    if steps < 2 || m < 3 {
        return Err(Error::InvalidParameter("sweep grid too small".into()));
    }
    let dt = 1.0 / steps as f64;
    let mut grid: Vec<Vec<f64>> = (0..=steps)
        .map(|n| {
            let t = n as f64 * dt;
            (0..m).map(|i| (1.0 - t) * psi0[i] + t * psi1[i]).collect()
        })
        .collect();

    let count = (opts.max_slope / opts.slope_step).round() as i64;
    let slopes: Vec<f64> = (-count..=count)
        .map(|k| k as f64 * opts.slope_step)
        .collect();
    let mut offsets = Vec::new();
    for a in 1..=opts.max_reach {
        for b in 1..=opts.max_reach {
            offsets.push((a, b));
        }
    }

    for sweep in 1..=opts.max_sweeps {
        let mut change = 0.0f64;
        for n in 1..steps {
            for i in 0..m {
                let current = grid[n][i];
                let mut best = current;
                if i > 0 && i + 1 < m {
                    let (l, r) = (tau[i] - tau[i - 1], tau[i + 1] - tau[i]);
                    let chord = (r * grid[n][i - 1] + l * grid[n][i + 1]) / (l + r);
                    best = best.min(chord);
                }
                for &(a, b) in &offsets {
                    if a > n || n + b > steps {
                        continue;
                    }
                    let (fa, fb) = (a as f64, b as f64);
                    for &sigma in &slopes {
                        let lo = row_value(tau, &grid[n - a], mass, tau[i] - sigma * fa * dt);
                        let hi = row_value(tau, &grid[n + b], mass, tau[i] + sigma * fb * dt);
                        best = best.min((fb * lo + fa * hi) / (fa + fb));
                    }
                }
                if best < current {
                    change = change.max(current - best);
                    grid[n][i] = best;
                }
            }
        }
        if change <= opts.tolerance {
            return Ok((
                grid,
                SweepStats {
                    sweeps: sweep,
                    last_change: change,
                },
            ));
        }
        if sweep == opts.max_sweeps {
            return Err(Error::NoConvergence {
                sweeps: sweep,
                change,
            });
        }
    }
    unreachable!("loop returns on its last iteration")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_data_is_fixed() {
        let tau: Vec<f64> = (0..12).map(|i| -3.0 + 0.5 * i as f64).collect();
        let psi0: Vec<f64> = tau.iter().map(|t| crate::toric::softplus(*t)).collect();
        let psi1: Vec<f64> = psi0.iter().map(|v| v - 0.3).collect();
        let opts = SweepOptions {
            slope_step: 0.5,
            ..Default::default()
        };
        let (grid, stats) = envelope_sweep(&tau, &psi0, &psi1, 1.0, 4, &opts).unwrap();
        assert!(stats.sweeps <= 2);
        for (n, row) in grid.iter().enumerate() {
            let t = n as f64 / 4.0;
            for (v, p) in row.iter().zip(&psi0) {
                assert!((v - p + 0.3 * t).abs() < 1e-12);
            }
        }
    }
}
