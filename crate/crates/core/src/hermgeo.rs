//! Geometry of the symmetric space of positive-definite Hermitian matrices.
//!
//! The Riemannian metric at `H` is `(1/N) Tr(H^{-1} V H^{-1} W)`; geodesics are
//! `t -> P exp(tA) P*` and travel at constant speed `sqrt((1/N) Tr A^2)`.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Eigh, C64};

const SYMMETRY_TOL: f64 = 1e-12;

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::InvalidParameter(
            "matrix dimension must be positive".into(),
        ));
    }
    if let Some(i) = m
        .iter()
        .position(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::NonFinite(i));
    }
    Ok(())
}

fn hermitian_part(m: CMatrix) -> Result<CMatrix> {
    check_square(&m)?;
    let defect = linalg::hermitian_defect(&m);
    if defect > SYMMETRY_TOL * (1.0 + linalg::max_abs(&m)) {
        return Err(Error::NotHermitian { defect });
    }
    Ok(if defect == 0.0 {
        m
    } else {
        linalg::symmetrize(&m)
    })
}

/// Lower-triangular factor of a Hermitian matrix, or `None` when a pivot is
/// not strictly positive.
fn cholesky_factor(m: &CMatrix) -> Option<CMatrix> {
    let n = m.nrows();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = m[(j, j)].re;
        for k in 0..j {
            pivot -= l[(j, k)].norm_sqr();
        }
        if !(pivot > 0.0) || !pivot.is_finite() {
            return None;
        }
        let d = pivot.sqrt();
        l[(j, j)] = C64::new(d, 0.0);
        for i in j + 1..n {
            let mut acc = m[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / d;
        }
    }
    Some(l)
}

/// An element of the tangent space: an N×N Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
}

impl HermitianMatrix {
    /// Validates conjugate symmetry, symmetrizing defects below `1e-12` relative.
    pub fn new(m: CMatrix) -> Result<Self> {
        Ok(Self {
            m: hermitian_part(m)?,
        })
    }

    pub fn from_real_diagonal(values: &[f64]) -> Self {
        Self {
            m: linalg::diagonal_matrix(values),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            m: CMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: CMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn is_diagonal(&self) -> bool {
        linalg::is_exactly_diagonal(&self.m)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        linalg::real_diagonal(&self.m)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigh(&self.m).values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            m: self.m.map(|z| z * c),
        }
    }

    /// `U A U*` for a unitary (or any) matrix `U`.
    pub fn conjugated(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        Ok(Self {
            m: linalg::symmetrize(&(u * &self.m * u.adjoint())),
        })
    }
}

/// A positive-definite Hermitian matrix: an inner product on an N-dimensional
/// space of sections.
#[derive(Debug, Clone, PartialEq)]
pub struct PosDefMetric {
    m: CMatrix,
}

impl PosDefMetric {
    /// Validates symmetry and certifies positivity with a Cholesky factorization.
    pub fn new(m: CMatrix) -> Result<Self> {
        let m = hermitian_part(m)?;
        cholesky_factor(&m).ok_or(Error::NotPositiveDefinite)?;
        Ok(Self { m })
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "matrix dimension must be positive".into(),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if values.iter().any(|&v| v <= 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self {
            m: linalg::diagonal_matrix(values),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: CMatrix::identity(n, n),
        }
    }

    /// Caller guarantees the matrix is Hermitian positive definite.
    pub(crate) fn new_unchecked(m: CMatrix) -> Self {
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn is_diagonal(&self) -> bool {
        linalg::is_exactly_diagonal(&self.m)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        linalg::real_diagonal(&self.m)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigh(&self.m).values
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "scale {c} must be positive"
            )));
        }
        Ok(Self {
            m: self.m.map(|z| z * c),
        })
    }

    /// `Q H Q*`; errors if the result is not positive definite (singular `Q`).
    pub fn congruence(&self, q: &CMatrix) -> Result<Self> {
        if q.nrows() != self.dim() || q.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: q.nrows(),
            });
        }
        Self::new(linalg::symmetrize(&(q * &self.m * q.adjoint())))
    }

    /// Relative Frobenius distance `‖H − K‖ / ‖K‖`.
    pub fn relative_error(&self, reference: &PosDefMetric) -> f64 {
        (&self.m - &reference.m).norm() / reference.m.norm()
    }

    fn solve(&self, rhs: &CMatrix) -> Result<CMatrix> {
        let l = cholesky_factor(&self.m).ok_or(Error::NotPositiveDefinite)?;
        let y = l.solve_lower_triangular(rhs).ok_or(Error::Singular)?;
        l.adjoint()
            .solve_upper_triangular(&y)
            .ok_or(Error::Singular)
    }
}

fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `(1/N) Tr(H^{-1} V H^{-1} W)`.
pub fn metric_inner(h: &PosDefMetric, v: &HermitianMatrix, w: &HermitianMatrix) -> Result<f64> {
    same_dim(h.dim(), v.dim())?;
    same_dim(h.dim(), w.dim())?;
    let x = h.solve(v.as_matrix())?;
    let y = h.solve(w.as_matrix())?;
    let n = h.dim();
    let mut trace = 0.0;
    for i in 0..n {
        for k in 0..n {
            trace += (x[(i, k)] * y[(k, i)]).re;
        }
    }
    Ok(trace / n as f64)
}

/// The geodesic `t -> P exp(tA) P*`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGeodesic {
    base_factor: CMatrix,
    direction: HermitianMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl MatrixGeodesic {
    pub fn new(base_factor: CMatrix, direction: HermitianMatrix) -> Result<Self> {
        check_square(&base_factor)?;
        same_dim(direction.dim(), base_factor.nrows())?;
        if base_factor.clone().try_inverse().is_none() {
            return Err(Error::Singular);
        }
        let Eigh { values, vectors } = linalg::eigh(direction.as_matrix());
        Ok(Self {
            base_factor,
            direction,
            eigenvalues: values,
            eigenvectors: vectors,
        })
    }

    /// Geodesic through `diag(h0)` with diagonal direction `diag(a)`.
    pub fn diagonal(h0: &[f64], a: &[f64]) -> Result<Self> {
        same_dim(h0.len(), a.len())?;
        let start = PosDefMetric::from_diagonal(h0)?;
        let p = linalg::diagonal_matrix(
            &start
                .diagonal()
                .iter()
                .map(|v| v.sqrt())
                .collect::<Vec<_>>(),
        );
        Self::new(p, HermitianMatrix::from_real_diagonal(a))
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    pub fn base_factor(&self) -> &CMatrix {
        &self.base_factor
    }

    pub fn direction(&self) -> &HermitianMatrix {
        &self.direction
    }

    /// Eigenvalues of the direction, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary eigenframe of the direction, columns matching `eigenvalues`.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn start(&self) -> PosDefMetric {
        self.eval(0.0)
    }

    /// True when both `P` and `A` are diagonal, so every `H(t)` is diagonal.
    pub fn is_diagonal(&self) -> bool {
        linalg::is_exactly_diagonal(&self.base_factor) && self.direction.is_diagonal()
    }

    pub fn eval(&self, t: f64) -> PosDefMetric {
        let n = self.dim();
        if self.is_diagonal() {
            let a = self.direction.diagonal();
            let values: Vec<f64> = (0..n)
                .map(|i| self.base_factor[(i, i)].norm_sqr() * (t * a[i]).exp())
                .collect();
            return PosDefMetric::new_unchecked(linalg::diagonal_matrix(&values));
        }
        let b = &self.base_factor * &self.eigenvectors;
        let scaled = CMatrix::from_fn(n, n, |r, c| b[(r, c)] * (t * self.eigenvalues[c]).exp());
        PosDefMetric::new_unchecked(linalg::symmetrize(&(scaled * b.adjoint())))
    }

    /// `sqrt((1/N) Σ λ_i^2)`.
    pub fn speed(&self) -> f64 {
        let n = self.eigenvalues.len() as f64;
        (self.eigenvalues.iter().map(|l| l * l).sum::<f64>() / n).sqrt()
    }
}

/// The geodesic with `H(0) = H0`, `H(1) = H1`, using `P = H0^{1/2}`.
pub fn geodesic_through(h0: &PosDefMetric, h1: &PosDefMetric) -> Result<MatrixGeodesic> {
    same_dim(h0.dim(), h1.dim())?;
    if h0.is_diagonal() && h1.is_diagonal() {
        let d0 = h0.diagonal();
        let d1 = h1.diagonal();
        let a: Vec<f64> = d0.iter().zip(&d1).map(|(x, y)| (y / x).ln()).collect();
        return MatrixGeodesic::diagonal(&d0, &a);
    }
    let e0 = linalg::eigh(h0.as_matrix());
    let p = linalg::spectral(&e0, f64::sqrt);
    let p_inv = linalg::spectral(&e0, |x| 1.0 / x.sqrt());
    let inner = linalg::symmetrize(&(&p_inv * h1.as_matrix() * &p_inv));
    let e1 = linalg::eigh(&inner);
    if e1.values[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    let a = HermitianMatrix {
        m: linalg::spectral(&e1, f64::ln),
    };
    MatrixGeodesic::new(p, a)
}

pub fn geodesic_eval(g: &MatrixGeodesic, t: f64) -> PosDefMetric {
    g.eval(t)
}

pub fn geodesic_speed(g: &MatrixGeodesic) -> f64 {
    g.speed()
}

/// Eigenvalues of `H0^{-1} H1`, ascending.
pub fn relative_spectrum(h0: &PosDefMetric, h1: &PosDefMetric) -> Result<Vec<f64>> {
    same_dim(h0.dim(), h1.dim())?;
    if h0.is_diagonal() && h1.is_diagonal() {
        let mut mu: Vec<f64> = h0
            .diagonal()
            .iter()
            .zip(h1.diagonal())
            .map(|(x, y)| y / x)
            .collect();
        mu.sort_by(f64::total_cmp);
        return Ok(mu);
    }
    let e0 = linalg::eigh(h0.as_matrix());
    let s = linalg::spectral(&e0, |x| 1.0 / x.sqrt());
    let inner = linalg::symmetrize(&(&s * h1.as_matrix() * &s));
    let mu = linalg::eigh(&inner).values;
    if mu[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(mu)
}

/// `sqrt((1/N) Σ ln^2 μ_i)` over the eigenvalues `μ_i` of `H0^{-1} H1`.
pub fn hat_distance(h0: &PosDefMetric, h1: &PosDefMetric) -> Result<f64> {
    let mu = relative_spectrum(h0, h1)?;
    let n = mu.len() as f64;
    Ok((mu.iter().map(|m| m.ln().powi(2)).sum::<f64>() / n).sqrt())
}
