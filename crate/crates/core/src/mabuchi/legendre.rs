//! Exact weak geodesics for piecewise-linear toric data.
//!
//! A full weight `ψ` known at knots `τ_i`, extended with slope `0` on the left
//! and slope `mass` on the right, has Legendre dual `ψ*(κ) = max_i(κ τ_i − ψ_i)`
//! on `[0, mass]`. The geodesic is `ψ_t = ((1 − t) ψ_0* + t ψ_1*)*`: a piecewise
//! affine function of `(t, τ)` whose kinks run along straight segments from
//! `(0, a_r)` to `(1, b_r)`.

use crate::error::{Error, Result};

/// Indices of the lower convex hull of `(x_i, y_i)`, `x` strictly increasing.
pub(crate) fn lower_hull(x: &[f64], y: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Drop b when it lies on or above the chord from a to i.
            let cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Slope breakpoints of `ψ*` on `[0, mass]` and the knot active on each piece.
#[derive(Debug, Clone)]
pub(crate) struct Dual {
    /// `0 = κ_0 ≤ κ_1 ≤ … ≤ κ_K = mass`.
    pub breaks: Vec<f64>,
    /// Knot position active on `[κ_k, κ_{k+1}]`.
    pub knot_tau: Vec<f64>,
    /// Knot value active on `[κ_k, κ_{k+1}]`.
    pub knot_psi: Vec<f64>,
}

impl Dual {
    pub fn new(tau: &[f64], psi: &[f64], mass: f64) -> Self {
        let hull = lower_hull(tau, psi);
        let mut breaks = vec![0.0];
        let mut knot_tau = Vec::with_capacity(hull.len());
        let mut knot_psi = Vec::with_capacity(hull.len());
        for w in hull.windows(2) {
            let slope = ((psi[w[1]] - psi[w[0]]) / (tau[w[1]] - tau[w[0]])).clamp(0.0, mass);
            let last = *breaks.last().expect("nonempty");
            breaks.push(slope.max(last));
            knot_tau.push(tau[w[0]]);
            knot_psi.push(psi[w[0]]);
        }
        let last = *hull.last().expect("nonempty");
        breaks.push(mass);
        knot_tau.push(tau[last]);
        knot_psi.push(psi[last]);
        Self {
            breaks,
            knot_tau,
            knot_psi,
        }
    }

    /// Index of the piece containing `κ` (the right one at a breakpoint).
    fn piece(&self, kappa: f64) -> usize {
        let k = self.breaks.partition_point(|b| *b <= kappa);
        k.saturating_sub(1).min(self.knot_tau.len() - 1)
    }

    pub fn eval(&self, kappa: f64) -> f64 {
        let k = self.piece(kappa);
        kappa * self.knot_tau[k] - self.knot_psi[k]
    }
}

/// Interpolated dual data: breakpoints `κ_r` shared by both ends, the dual
/// values there, and the kink segment `(a_r, b_r)` of every piece.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicDual {
    kappa: Vec<f64>,
    star0: Vec<f64>,
    star1: Vec<f64>,
    start: Vec<f64>,
    end: Vec<f64>,
    mass: f64,
}

impl GeodesicDual {
    pub fn new(tau: &[f64], psi0: &[f64], psi1: &[f64], mass: f64) -> Result<Self> {
        if tau.len() != psi0.len() || tau.len() != psi1.len() {
            return Err(Error::GridMismatch);
        }
        let d0 = Dual::new(tau, psi0, mass);
        let d1 = Dual::new(tau, psi1, mass);
        let mut kappa: Vec<f64> = d0.breaks.iter().chain(&d1.breaks).copied().collect();
        kappa.sort_by(f64::total_cmp);
        kappa.dedup();
        let star0 = kappa.iter().map(|&k| d0.eval(k)).collect();
        let star1 = kappa.iter().map(|&k| d1.eval(k)).collect();
        let mut start = Vec::with_capacity(kappa.len() - 1);
        let mut end = Vec::with_capacity(kappa.len() - 1);
        for w in kappa.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            start.push(d0.knot_tau[d0.piece(mid)]);
            end.push(d1.knot_tau[d1.piece(mid)]);
        }
        Ok(Self {
            kappa,
            star0,
            star1,
            start,
            end,
            mass,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Slope breakpoints `κ_r`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.kappa
    }

    /// Kink segments `(a_r, b_r)`: the kink of piece `r` sits at
    /// `(1 − t) a_r + t b_r` at time `t`.
    pub fn rulings(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.start.iter().copied().zip(self.end.iter().copied())
    }

    fn kink(&self, r: usize, t: f64) -> f64 {
        (1.0 - t) * self.start[r] + t * self.end[r]
    }

    fn value_at_break(&self, r: usize, t: f64, tau: f64) -> f64 {
        self.kappa[r] * tau - ((1.0 - t) * self.star0[r] + t * self.star1[r])
    }

    /// Index of the first kink at or right of `τ` at time `t`.
    fn locate(&self, t: f64, tau: f64) -> usize {
        let (mut lo, mut hi) = (0usize, self.start.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.kink(mid, t) < tau {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// `ψ_t(τ) = max_r (κ_r τ − ψ_t*(κ_r))`.
    pub fn eval(&self, t: f64, tau: f64) -> f64 {
        let r = self.locate(t, tau);
        let lo = r.saturating_sub(1);
        let hi = (r + 1).min(self.kappa.len() - 1);
        (lo..=hi)
            .map(|k| self.value_at_break(k, t, tau))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Reference evaluation scanning every breakpoint.
    pub fn eval_exhaustive(&self, t: f64, tau: f64) -> f64 {
        (0..self.kappa.len())
            .map(|k| self.value_at_break(k, t, tau))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Slope of the kink segment through `(t, τ)`, interpolated between the two
    /// kinks that bracket it. Outside all kinks the surface is affine in `t`.
    pub fn ruling_slope(&self, t: f64, tau: f64) -> f64 {
        let r = self.locate(t, tau);
        if r == 0 || r >= self.start.len() {
            return 0.0;
        }
        let left = self.kink(r - 1, t);
        let right = self.kink(r, t);
        let s_left = self.end[r - 1] - self.start[r - 1];
        let s_right = self.end[r] - self.start[r];
        if right - left <= 0.0 {
            return s_right;
        }
        let lambda = ((tau - left) / (right - left)).clamp(0.0, 1.0);
        (1.0 - lambda) * s_left + lambda * s_right
    }

    /// `(1/mass ∫_0^mass |ψ_1* − ψ_0*|^p dκ)^{1/p}`, exact for the piecewise-linear
    /// dual up to a fixed Gauss–Legendre rule on each piece.
    pub fn dp(&self, p: f64) -> f64 {
        const NODES: [f64; 5] = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683,
            0.0,
            0.538_469_310_105_683,
            0.906_179_845_938_664,
        ];
        const WEIGHTS: [f64; 5] = [
            0.236_926_885_056_189,
            0.478_628_670_499_366,
            0.568_888_888_888_889,
            0.478_628_670_499_366,
            0.236_926_885_056_189,
        ];
        let mut total = 0.0;
        for r in 0..self.kappa.len() - 1 {
            let (k0, k1) = (self.kappa[r], self.kappa[r + 1]);
            let half = 0.5 * (k1 - k0);
            if half <= 0.0 {
                continue;
            }
            let g0 = self.star1[r] - self.star0[r];
            let g1 = self.star1[r + 1] - self.star0[r + 1];
            if g0 * g1 < 0.0 {
                // Split at the sign change so each half is a smooth power.
                let cut = g0 / (g0 - g1);
                let len = k1 - k0;
                total += (cut * len) * g0.abs().powf(p) / (p + 1.0);
                total += ((1.0 - cut) * len) * g1.abs().powf(p) / (p + 1.0);
                continue;
            }
            for (x, w) in NODES.iter().zip(WEIGHTS) {
                let g = g0 + (g1 - g0) * 0.5 * (1.0 + x);
                total += w * half * g.abs().powf(p);
            }
        }
        (total / self.mass).powf(1.0 / p)
    }
}
