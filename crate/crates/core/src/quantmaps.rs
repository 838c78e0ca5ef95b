//! The quantization maps between potentials and Hermitian metrics on sections.
//!
//! `hilb` sends a potential to the Gram matrix of the monomials under
//! `∫ |s|^2 e^{−d u} ω`; `fs` sends a metric to `(1/d) ln(v* H^{-1} v)`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::path::Path;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::hermgeo::{MatrixGeodesic, PosDefMetric};
use crate::linalg::{self, CMatrix, C64};
use crate::lse::log_sum_exp;
use crate::moment::FsProfile;
use crate::toric::{self, BackgroundForm, InvariantPotential, LineBundleModel};

/// A metric on sections written in the monomial frame of a model.
pub type GramMatrix = PosDefMetric;

fn check_grid(u: &InvariantPotential, model: &LineBundleModel) -> Result<()> {
    if u.grid().same_as(model.grid()) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

fn check_dim(h: &PosDefMetric, model: &LineBundleModel) -> Result<()> {
    if h.dim() != model.dim_sections() {
        return Err(Error::DimensionMismatch {
            expected: model.dim_sections(),
            found: h.dim(),
        });
    }
    Ok(())
}

/// `ln G_jj` for the Hilbert metric of `u`, evaluated entirely in log space.
pub fn hilb_log_diagonal(u: &InvariantPotential, model: &LineBundleModel) -> Result<Vec<f64>> {
    check_grid(u, model)?;
    let grid = model.grid();
    let d = model.degree() as f64;
    let base: Vec<f64> = grid
        .weights()
        .iter()
        .zip(u.values())
        .map(|(w, v)| w.ln() - d * v)
        .collect();
    let mut terms = vec![0.0; grid.len()];
    Ok((0..=model.degree())
        .map(|j| {
            for (i, t) in terms.iter_mut().enumerate() {
                *t = base[i] + model.log_fiber_norm(j, i);
            }
            log_sum_exp(&terms)
        })
        .collect())
}

/// The Gram matrix of the monomials, diagonal by S¹-invariance.
pub fn hilb(u: &InvariantPotential, model: &LineBundleModel) -> Result<GramMatrix> {
    let logs = hilb_log_diagonal(u, model)?;
    if let Some(i) = logs.iter().position(|l| l.abs() > 700.0) {
        return Err(Error::NonFinite(i));
    }
    PosDefMetric::from_diagonal(&logs.iter().map(|l| l.exp()).collect::<Vec<_>>())
}

/// `(1/d) ln Σ_j |z^j|^2 e^{c_j}` on the grid.
fn fs_from_log_coeffs(coeffs: &[f64], model: &LineBundleModel) -> Result<InvariantPotential> {
    let grid = model.grid();
    let d = model.degree() as f64;
    let mut terms = vec![0.0; coeffs.len()];
    let values = (0..grid.len())
        .map(|i| {
            for (j, t) in terms.iter_mut().enumerate() {
                *t = coeffs[j] + model.log_fiber_norm(j, i);
            }
            log_sum_exp(&terms) / d
        })
        .collect();
    InvariantPotential::new(grid, values)
}

/// `(1/d) ln(v* H^{-1} v)` for a diagonal `H`; non-diagonal metrics give
/// non-invariant potentials and are rejected (see [`AngularFs`]).
pub fn fs(h: &GramMatrix, model: &LineBundleModel) -> Result<InvariantPotential> {
    check_dim(h, model)?;
    if !h.is_diagonal() {
        return Err(Error::NotInvariant);
    }
    let coeffs: Vec<f64> = h.diagonal().iter().map(|v| -v.ln()).collect();
    let u = fs_from_log_coeffs(&coeffs, model)?;
    toric::ma_masses(&u, &BackgroundForm::fubini_study())?;
    Ok(u)
}

/// Log-coefficients of `FS(H(t))` in the monomial frame, valid when the
/// eigenframe `B = Q* P^{-1}` maps each monomial to a single eigen-direction.
///
/// `v* H(t)^{-1} v = Σ_j e^{−tλ_j} |(B v)_j|^2`.
pub fn geodesic_log_coeffs(g: &MatrixGeodesic, t: f64) -> Result<Vec<f64>> {
    let n = g.dim();
    if g.is_diagonal() {
        let a = g.direction().diagonal();
        return Ok((0..n)
            .map(|j| -2.0 * g.base_factor()[(j, j)].norm().ln() - t * a[j])
            .collect());
    }
    let p_inv = g
        .base_factor()
        .clone()
        .try_inverse()
        .ok_or(Error::Singular)?;
    let b = g.eigenvectors().adjoint() * p_inv;
    let mut coeffs = vec![f64::NEG_INFINITY; n];
    for row in 0..n {
        let (col, peak) = (0..n)
            .map(|c| (c, b[(row, c)].norm_sqr()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty");
        let rest: f64 = (0..n)
            .filter(|&c| c != col)
            .map(|c| b[(row, c)].norm_sqr())
            .sum();
        if rest > 1e-24 * peak || coeffs[col] != f64::NEG_INFINITY {
            return Err(Error::NotInvariant);
        }
        coeffs[col] = peak.ln() - t * g.eigenvalues()[row];
    }
    Ok(coeffs)
}

/// `FS(H(t))` in the eigenframe of the direction, stable for large `|tλ|`.
pub fn fs_along_geodesic(
    g: &MatrixGeodesic,
    t: f64,
    model: &LineBundleModel,
) -> Result<InvariantPotential> {
    if g.dim() != model.dim_sections() {
        return Err(Error::DimensionMismatch {
            expected: model.dim_sections(),
            found: g.dim(),
        });
    }
    fs_from_log_coeffs(&geodesic_log_coeffs(g, t)?, model)
}

/// Grid-free profile of `FS(H(t))`.
pub fn profile_along_geodesic(g: &MatrixGeodesic, t: f64) -> Result<FsProfile> {
    FsProfile::new(g.dim() - 1, geodesic_log_coeffs(g, t)?)
}

/// `fs(hilb(u))`.
pub fn bergman_roundtrip(
    u: &InvariantPotential,
    model: &LineBundleModel,
) -> Result<InvariantPotential> {
    fs(&hilb(u, model)?, model)
}

/// Writes a metric as dense rows of `re, im` pairs.
pub fn write_gram_csv<P: AsRef<Path>>(h: &PosDefMetric, path: P) -> Result<()> {
    let n = h.dim();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = Vec::with_capacity(2 * n);
    for c in 0..n {
        header.push(format!("re_{c}"));
        header.push(format!("im_{c}"));
    }
    w.write_record(&header)?;
    for r in 0..n {
        let mut row = Vec::with_capacity(2 * n);
        for c in 0..n {
            let z = h.as_matrix()[(r, c)];
            row.push(format!("{:e}", z.re));
            row.push(format!("{:e}", z.im));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a metric written by [`write_gram_csv`].
pub fn read_gram_csv<P: AsRef<Path>>(path: P) -> Result<PosDefMetric> {
    let mut r = csv::Reader::from_path(path)?;
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let nums: Vec<f64> = rec
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(e.to_string()))
            })
            .collect::<Result<_>>()?;
        if nums.len() % 2 != 0 {
            return Err(Error::Parse("odd number of columns".into()));
        }
        rows.push(nums.chunks(2).map(|c| C64::new(c[0], c[1])).collect());
    }
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::NotSquare {
            rows: n,
            cols: rows.first().map_or(0, Vec::len),
        });
    }
    PosDefMetric::new(CMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

/// Evaluator for `FS(H)` at arbitrary points, including non-diagonal `H`.
///
/// Uses the chart `z` for `|z| ≤ 1` and `w = 1/z` beyond, so no power of `|z|`
/// exceeds one.
#[derive(Debug, Clone)]
pub struct AngularFs {
    degree: usize,
    inverse: CMatrix,
}

impl AngularFs {
    pub fn new(h: &PosDefMetric) -> Result<Self> {
        if h.dim() < 2 {
            return Err(Error::InvalidParameter("need degree at least 1".into()));
        }
        let e = linalg::eigh(h.as_matrix());
        Ok(Self {
            degree: h.dim() - 1,
            inverse: linalg::spectral(&e, |x| 1.0 / x),
        })
    }

    fn coeff(&self, j: usize, k: usize, flipped: bool) -> C64 {
        if flipped {
            self.inverse[(self.degree - j, self.degree - k)]
        } else {
            self.inverse[(j, k)]
        }
    }

    /// `(F, F_z, F_{z z̄})` for `F = Σ G_jk z̄^j z^k` in the chosen chart.
    fn local(&self, r: f64, theta: f64, flipped: bool) -> (f64, C64, f64) {
        let n = self.degree + 1;
        let z = C64::from_polar(r, theta);
        let mut pow = vec![C64::new(1.0, 0.0); n];
        for j in 1..n {
            pow[j] = pow[j - 1] * z;
        }
        let mut f = C64::new(0.0, 0.0);
        let mut fz = C64::new(0.0, 0.0);
        let mut fzz = C64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                let g = self.coeff(j, k, flipped);
                let zj = pow[j].conj();
                f += g * zj * pow[k];
                if k >= 1 {
                    fz += g * zj * pow[k - 1] * k as f64;
                    if j >= 1 {
                        fzz += g * pow[j - 1].conj() * pow[k - 1] * (j * k) as f64;
                    }
                }
            }
        }
        (f.re, fz, fzz.re)
    }

    /// `FS(H)` relative to the reference weight at `z = r e^{iθ}`, `r ≤ 1`, in
    /// the given chart. In the flipped chart `r = 1/|z|`.
    fn potential_local(&self, r: f64, theta: f64, flipped: bool) -> f64 {
        let (f, _, _) = self.local(r, theta, flipped);
        (f.ln() - self.degree as f64 * (1.0 + r * r).ln()) / self.degree as f64
    }

    /// `FS(H)` at `z = √x e^{iθ}`.
    pub fn potential(&self, x: f64, theta: f64) -> f64 {
        if x <= 1.0 {
            self.potential_local(x.sqrt(), theta, false)
        } else {
            self.potential_local(1.0 / x.sqrt(), -theta, true)
        }
    }

    /// Density of `ω_{FS(H)}` against `dA / π` in the local chart.
    fn density_local(&self, r: f64, theta: f64, flipped: bool) -> f64 {
        let (f, fz, fzz) = self.local(r, theta, flipped);
        (f * fzz - fz.norm_sqr()) / (f * f) / self.degree as f64
    }
}

/// Two-chart product quadrature on the sphere: Gauss–Legendre in `r ∈ (0,1)`,
/// trapezoid in `θ`.
#[derive(Debug, Clone)]
pub struct AngularQuadrature {
    radial: Vec<(f64, f64)>,
    angles: usize,
}

impl AngularQuadrature {
    pub fn new(radial: usize, angles: usize) -> Result<Self> {
        if radial < 2 || angles < 2 {
            return Err(Error::InvalidParameter(
                "angular quadrature too small".into(),
            ));
        }
        let rule = GaussLegendre::new(NonZeroUsize::new(radial).expect("nonzero"));
        let radial = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (1.0 + x), 0.5 * w))
            .collect();
        Ok(Self { radial, angles })
    }

    /// Default resolution for degree `d`.
    pub fn for_degree(d: usize) -> Self {
        Self::new(96, 4 * d + 24).expect("valid sizes")
    }

    /// `((1/V) ∫ |u_a − u_b|^p (ω_a + ω_b))^{1/p}` for `u = FS(H)`.
    pub fn dp_proxy(&self, a: &AngularFs, b: &AngularFs, p: f64) -> Result<f64> {
        if a.degree != b.degree {
            return Err(Error::DimensionMismatch {
                expected: a.degree + 1,
                found: b.degree + 1,
            });
        }
        let d = a.degree as f64;
        let dtheta = 2.0 * PI / self.angles as f64;
        let mut total = 0.0;
        for flipped in [false, true] {
            for &(r, wr) in &self.radial {
                for k in 0..self.angles {
                    let theta = k as f64 * dtheta;
                    let (fa, _, _) = a.local(r, theta, flipped);
                    let (fb, _, _) = b.local(r, theta, flipped);
                    let diff = ((fa.ln() - fb.ln()) / d).abs().powf(p);
                    let mass =
                        a.density_local(r, theta, flipped) + b.density_local(r, theta, flipped);
                    // dA / π = r dr dθ / π
                    total += diff * mass * wr * r * dtheta / PI;
                }
            }
        }
        Ok(total.powf(1.0 / p))
    }

    /// Total mass of `ω_{FS(H)}`; one up to quadrature error.
    pub fn mass(&self, a: &AngularFs) -> f64 {
        let dtheta = 2.0 * PI / self.angles as f64;
        let mut total = 0.0;
        for flipped in [false, true] {
            for &(r, wr) in &self.radial {
                for k in 0..self.angles {
                    total += a.density_local(r, k as f64 * dtheta, flipped) * wr * r * dtheta / PI;
                }
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermgeo::HermitianMatrix;
    use crate::linalg::random_unitary;
    use crate::toric::build_model;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::function::factorial::binomial;

    #[test]
    fn hilb_of_zero_matches_beta_integrals() {
        let model = build_model(2, 64).unwrap();
        let h = hilb(&InvariantPotential::zero(model.grid()), &model).unwrap();
        let diag = h.diagonal();
        for (got, want) in diag.iter().zip([1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        let model = build_model(8, 64).unwrap();
        let h = hilb(&InvariantPotential::zero(model.grid()), &model).unwrap();
        for (j, g) in h.diagonal().iter().enumerate() {
            assert!((g * 9.0 * binomial(8, j as u64) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn hilb_scales_with_constants() {
        let model = build_model(3, 64).unwrap();
        let u =
            InvariantPotential::from_log_fn(model.grid(), |t| 0.2 * toric::logistic(t)).unwrap();
        let a = hilb(&u, &model).unwrap().diagonal();
        let b = hilb(&u.shifted(0.7), &model).unwrap().diagonal();
        for (x, y) in a.iter().zip(&b) {
            assert!((y / x - (-3.0f64 * 0.7).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn fs_examples() {
        let model = build_model(5, 128).unwrap();
        let u = fs(&PosDefMetric::identity(6), &model).unwrap();
        // The first node is close to x = 0 where only z^0 contributes.
        assert!(u.values()[0].abs() < 1e-3);
        let h = PosDefMetric::from_diagonal(&[1.0, 2.0, 0.5, 3.0, 1.0, 0.2]).unwrap();
        let a = fs(&h, &model).unwrap();
        let b = fs(&h.scaled(4.0).unwrap(), &model).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - 4f64.ln() / 5.0 - y).abs() < 1e-13);
        }
        let rt = bergman_roundtrip(&InvariantPotential::zero(model.grid()), &model).unwrap();
        for v in rt.values() {
            assert!((v - 6f64.ln() / 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fs_rejects_non_diagonal() {
        let model = build_model(1, 32).unwrap();
        let m = CMatrix::from_fn(2, 2, |r, c| C64::new(if r == c { 2.0 } else { 1.0 }, 0.0));
        let h = PosDefMetric::new(m).unwrap();
        assert!(matches!(fs(&h, &model), Err(Error::NotInvariant)));
    }

    #[test]
    fn geodesic_image_matches_direct_evaluation() {
        let model = build_model(2, 64).unwrap();
        let g = MatrixGeodesic::diagonal(&[1.0, 2.0, 0.5], &[-1.0, 0.0, 1.0]).unwrap();
        let a = fs_along_geodesic(&g, 3.0, &model).unwrap();
        let b = fs(&g.eval(3.0), &model).unwrap();
        assert!(a.sup_distance(&b).unwrap() < 1e-12);
    }

    #[test]
    fn scalar_direction_translates() {
        let model = build_model(3, 64).unwrap();
        let g = MatrixGeodesic::diagonal(&[1.0, 2.0, 0.5, 1.0], &[0.4; 4]).unwrap();
        let u0 = fs_along_geodesic(&g, 0.0, &model).unwrap();
        let u = fs_along_geodesic(&g, 2.5, &model).unwrap();
        for (a, b) in u0.values().iter().zip(u.values()) {
            assert!((a - 0.4 * 2.5 / 3.0 - b).abs() < 1e-13);
        }
    }

    #[test]
    fn permuted_eigenframe_is_accepted() {
        // A unitary that only permutes and rephases monomials keeps FS invariant.
        let model = build_model(2, 64).unwrap();
        let mut u = CMatrix::zeros(3, 3);
        u[(0, 2)] = C64::new(0.0, 1.0);
        u[(1, 0)] = C64::new(1.0, 0.0);
        u[(2, 1)] = C64::new(-1.0, 0.0);
        let a = HermitianMatrix::from_real_diagonal(&[0.5, -1.0, 2.0])
            .conjugated(&u)
            .unwrap();
        let g = MatrixGeodesic::new(CMatrix::identity(3, 3), a).unwrap();
        let via_frame = fs_along_geodesic(&g, 1.5, &model).unwrap();
        let direct = fs(&g.eval(1.5), &model);
        // g.eval(1.5) is diagonal up to roundoff from the conjugation.
        if let Ok(direct) = direct {
            assert!(via_frame.sup_distance(&direct).unwrap() < 1e-12);
        }
        let diag = g.eval(1.5).diagonal();
        let from_diag = fs(&PosDefMetric::from_diagonal(&diag).unwrap(), &model).unwrap();
        assert!(via_frame.sup_distance(&from_diag).unwrap() < 1e-12);
    }

    #[test]
    fn angular_matches_invariant_for_diagonal() {
        let model = build_model(3, 128).unwrap();
        let h = PosDefMetric::from_diagonal(&[0.3, 1.0, 2.0, 0.7]).unwrap();
        let u = fs(&h, &model).unwrap();
        let ang = AngularFs::new(&h).unwrap();
        for (t, v) in model.grid().log_nodes().iter().zip(u.values()).step_by(7) {
            assert!((ang.potential(t.exp(), 0.4) - v).abs() < 1e-12);
        }
        let q = AngularQuadrature::for_degree(3);
        assert!((q.mass(&ang) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn angular_fs_is_unitarily_natural() {
        // Rotating the metric by a unitary changes FS, but the mass stays one.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(3, &mut rng);
        let h = PosDefMetric::from_diagonal(&[1.0, 0.5, 2.0])
            .unwrap()
            .congruence(&u)
            .unwrap();
        let q = AngularQuadrature::for_degree(2);
        assert!((q.mass(&AngularFs::new(&h).unwrap()) - 1.0).abs() < 1e-8);
    }
}
