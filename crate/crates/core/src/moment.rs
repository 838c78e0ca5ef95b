//! Grid-free toric description of Fubini–Study images of diagonal metrics.
//!
//! For a diagonal `H` on `O(d)` the full weight of `FS(H)` is
//! `ψ(τ) = (1/d) ln Σ_j e^{c_j + jτ}` with `c_j = −ln H_jj`. Its moment map
//! `ψ'` is a diffeomorphism onto `(0, 1)` and its Legendre dual `ψ*` turns
//! Mabuchi geodesics into straight lines, which gives closed-form distances
//! that do not depend on how far the measures have drifted along the τ axis.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::hermgeo::PosDefMetric;
use crate::lse::{log_sum_exp, softmax};

/// Gauss–Legendre nodes on the moment interval used by the distance integrals.
pub const MOMENT_NODES: usize = 256;

const BRACKET_LIMIT: f64 = 1e8;

/// `ψ(τ) = (1/d) ln Σ_j e^{c_j + jτ}`; entries with `c_j = −∞` are absent sections.
#[derive(Debug, Clone, PartialEq)]
pub struct FsProfile {
    degree: usize,
    log_coeffs: Vec<f64>,
}

impl FsProfile {
    pub fn new(degree: usize, log_coeffs: Vec<f64>) -> Result<Self> {
        if degree == 0 || log_coeffs.len() != degree + 1 {
            return Err(Error::DimensionMismatch {
                expected: degree + 1,
                found: log_coeffs.len(),
            });
        }
        if log_coeffs.iter().any(|c| c.is_nan() || *c == f64::INFINITY) {
            return Err(Error::InvalidParameter(
                "coefficients must be finite or -inf".into(),
            ));
        }
        if log_coeffs.iter().filter(|c| c.is_finite()).count() < 2 {
            return Err(Error::InvalidParameter("need at least two sections".into()));
        }
        Ok(Self { degree, log_coeffs })
    }

    /// Profile of `FS(H)` for a diagonal metric in the monomial frame.
    pub fn from_metric(h: &PosDefMetric) -> Result<Self> {
        if !h.is_diagonal() {
            return Err(Error::NotInvariant);
        }
        let coeffs = h.diagonal().iter().map(|v| -v.ln()).collect();
        Self::new(h.dim() - 1, coeffs)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn log_coeffs(&self) -> &[f64] {
        &self.log_coeffs
    }

    fn exponents(&self, tau: f64) -> Vec<f64> {
        self.log_coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c + j as f64 * tau)
            .collect()
    }

    /// The full weight `ψ(τ)`.
    pub fn psi(&self, tau: f64) -> f64 {
        log_sum_exp(&self.exponents(tau)) / self.degree as f64
    }

    /// The potential `u = ψ − ln(1 + e^τ)` relative to the reference weight.
    pub fn potential(&self, tau: f64) -> f64 {
        self.psi(tau) - crate::toric::softplus(tau)
    }

    /// `(ψ'(τ), ψ''(τ))`.
    pub fn moment_and_curvature(&self, tau: f64) -> (f64, f64) {
        let mut p = Vec::with_capacity(self.degree + 1);
        softmax(&self.exponents(tau), &mut p);
        let d = self.degree as f64;
        let mean: f64 = p.iter().enumerate().map(|(j, w)| w * j as f64).sum();
        let second: f64 = p
            .iter()
            .enumerate()
            .map(|(j, w)| w * (j as f64 - mean).powi(2))
            .sum();
        (mean / d, second / d)
    }

    pub fn moment(&self, tau: f64) -> f64 {
        self.moment_and_curvature(tau).0
    }

    /// Closure of the image of the moment map.
    pub fn moment_range(&self) -> (f64, f64) {
        let d = self.degree as f64;
        let lo = self
            .log_coeffs
            .iter()
            .position(|c| c.is_finite())
            .unwrap_or(0);
        let hi = self
            .log_coeffs
            .iter()
            .rposition(|c| c.is_finite())
            .unwrap_or(0);
        (lo as f64 / d, hi as f64 / d)
    }

    /// The unique `τ` with `ψ'(τ) = m`, by safeguarded Newton iteration.
    pub fn inverse_moment(&self, m: f64) -> Result<f64> {
        let (lo_m, hi_m) = self.moment_range();
        if !(m > lo_m && m < hi_m) {
            return Err(Error::InvalidParameter(format!(
                "moment {m} outside ({lo_m}, {hi_m})"
            )));
        }
        let mut a = -1.0;
        while self.moment(a) > m {
            a *= 2.0;
            if a < -BRACKET_LIMIT {
                return Err(Error::NoConvergence {
                    sweeps: 0,
                    change: a,
                });
            }
        }
        let mut b = 1.0;
        while self.moment(b) < m {
            b *= 2.0;
            if b > BRACKET_LIMIT {
                return Err(Error::NoConvergence {
                    sweeps: 0,
                    change: b,
                });
            }
        }
        let mut t = 0.5 * (a + b);
        for _ in 0..200 {
            let (mom, curv) = self.moment_and_curvature(t);
            let f = mom - m;
            if f == 0.0 {
                return Ok(t);
            }
            if f > 0.0 {
                b = t;
            } else {
                a = t;
            }
            let newton = t - f / curv;
            let next = if curv > 0.0 && newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            let step = (next - t).abs();
            t = next;
            if step <= 4.0 * f64::EPSILON * (1.0 + t.abs())
                || b - a <= 4.0 * f64::EPSILON * (1.0 + t.abs())
            {
                return Ok(t);
            }
        }
        Ok(t)
    }

    /// Legendre dual `ψ*(m) = m τ(m) − ψ(τ(m))` on the open moment interval.
    pub fn dual(&self, m: f64) -> Result<f64> {
        let tau = self.inverse_moment(m)?;
        Ok(m * tau - self.psi(tau))
    }

    /// `ψ*` at the nodes of [`moment_rule`]; needs the full moment range.
    pub fn dual_samples(&self) -> Result<Vec<f64>> {
        if self.moment_range() != (0.0, 1.0) {
            return Err(Error::InvalidParameter(
                "moment range must be the full interval".into(),
            ));
        }
        moment_rule().iter().map(|&(m, _)| self.dual(m)).collect()
    }

    /// Profile with coefficients `c_j − t a_j`: the image of the diagonal
    /// geodesic `H(t) = H(0) e^{tA}`.
    pub fn flowed(&self, direction: &[f64], t: f64) -> Result<Self> {
        if direction.len() != self.log_coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.log_coeffs.len(),
                found: direction.len(),
            });
        }
        let coeffs = self
            .log_coeffs
            .iter()
            .zip(direction)
            .map(|(c, a)| c - t * a)
            .collect();
        Self::new(self.degree, coeffs)
    }
}

/// Gauss–Legendre rule on `[0, 1]` with [`MOMENT_NODES`] nodes, sorted by node.
pub fn moment_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let rule = GaussLegendre::new(NonZeroUsize::new(MOMENT_NODES).expect("nonzero"));
        let mut pairs: Vec<(f64, f64)> = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (1.0 + x), 0.5 * w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    })
}

fn check_pair(a: &FsProfile, b: &FsProfile, p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "p = {p} must be at least 1"
        )));
    }
    if a.moment_range() != b.moment_range() {
        return Err(Error::InvalidParameter(
            "profiles have different moment ranges".into(),
        ));
    }
    if a.moment_range() != (0.0, 1.0) {
        return Err(Error::InvalidParameter(
            "moment range must be the full interval".into(),
        ));
    }
    Ok(())
}

/// Exact Mabuchi distance `(∫_0^1 |ψ_a* − ψ_b*|^p dm)^{1/p}` of unit-mass profiles.
pub fn dp_exact(a: &FsProfile, b: &FsProfile, p: f64) -> Result<f64> {
    check_pair(a, b, p)?;
    Ok(dp_from_duals(&a.dual_samples()?, &b.dual_samples()?, p))
}

/// `d_p` from duals sampled by [`FsProfile::dual_samples`].
pub fn dp_from_duals(a: &[f64], b: &[f64], p: f64) -> f64 {
    let total: f64 = moment_rule()
        .iter()
        .zip(a.iter().zip(b))
        .map(|((_, w), (x, y))| w * (x - y).abs().powf(p))
        .sum();
    total.powf(1.0 / p)
}

/// `((1/V) ∫ |u_a − u_b|^p (ω_a + ω_b))^{1/p}`, integrating each measure in its
/// own moment coordinate.
pub fn dp_proxy_exact(a: &FsProfile, b: &FsProfile, p: f64) -> Result<f64> {
    check_pair(a, b, p)?;
    let mut total = 0.0;
    for &(m, w) in moment_rule() {
        let ta = a.inverse_moment(m)?;
        let tb = b.inverse_moment(m)?;
        total += w * (a.psi(ta) - b.psi(ta)).abs().powf(p);
        total += w * (a.psi(tb) - b.psi(tb)).abs().powf(p);
    }
    Ok(total.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::softplus;

    fn reference() -> FsProfile {
        FsProfile::new(1, vec![0.0, 0.0]).unwrap()
    }

    #[test]
    fn reference_profile_is_softplus() {
        let f = reference();
        for t in [-30.0, -1.0, 0.0, 2.5, 40.0] {
            assert!((f.psi(t) - softplus(t)).abs() < 1e-14);
            assert!(f.potential(t).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_moment_roundtrip() {
        let f = FsProfile::new(4, vec![0.3, -1.0, 2.0, 0.0, -0.5]).unwrap();
        for m in [1e-6, 0.01, 0.3, 0.5, 0.77, 0.999] {
            let t = f.inverse_moment(m).unwrap();
            assert!((f.moment(t) - m).abs() < 1e-13, "m={m}");
        }
        assert!(f.inverse_moment(0.0).is_err());
    }

    #[test]
    fn dual_of_reference_is_entropy() {
        // ψ = softplus has ψ*(m) = m ln m + (1 − m) ln(1 − m).
        let f = reference();
        for m in [0.1, 0.5, 0.9] {
            let expected = m * f64::ln(m) + (1.0 - m) * f64::ln(1.0 - m);
            assert!((f.dual(m).unwrap() - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn constant_shift_distances() {
        let a = FsProfile::new(3, vec![0.1, 0.2, -0.3, 0.4]).unwrap();
        let b = FsProfile::new(3, vec![0.1 - 0.6, 0.2 - 0.6, -0.3 - 0.6, 0.4 - 0.6]).unwrap();
        // c_j shifted by −0.6 raises ψ by 0.2.
        assert!((dp_exact(&a, &b, 2.0).unwrap() - 0.2).abs() < 1e-12);
        let proxy = dp_proxy_exact(&a, &b, 2.0).unwrap();
        assert!((proxy - 0.2 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn translation_distance_is_linear() {
        // ψ_t(τ) = softplus(τ − t): the dual gains −t m, so d_p = t / (p + 1)^{1/p}.
        let a = reference();
        let b = a.flowed(&[0.0, 1.0], 5.0).unwrap();
        let d2 = dp_exact(&a, &b, 2.0).unwrap();
        assert!((d2 - 5.0 / 3f64.sqrt()).abs() < 1e-10, "{d2}");
    }
}
