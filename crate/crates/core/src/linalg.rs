//! Dense complex matrix helpers built on a single Hermitian eigendecomposition.

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in i..n {
            defect = defect.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    defect
}

pub(crate) fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// True when every off-diagonal entry is exactly zero.
pub(crate) fn is_exactly_diagonal(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == C64::new(0.0, 0.0)))
}

pub(crate) fn real_diagonal(m: &CMatrix) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, i)].re).collect()
}

pub(crate) fn diagonal_matrix(values: &[f64]) -> CMatrix {
    let n = values.len();
    let mut m = CMatrix::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = C64::new(v, 0.0);
    }
    m
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub(crate) struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub(crate) fn eigh(m: &CMatrix) -> Eigh {
    let n = m.nrows();
    if is_exactly_diagonal(m) {
        // Permutation eigenbasis keeps diagonal inputs exact.
        let diag = real_diagonal(m);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
        let mut vectors = CMatrix::zeros(n, n);
        for (col, &row) in order.iter().enumerate() {
            vectors[(row, col)] = C64::new(1.0, 0.0);
        }
        return Eigh {
            values: order.iter().map(|&i| diag[i]).collect(),
            vectors,
        };
    }
    let decomposition = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| decomposition.eigenvalues[a].total_cmp(&decomposition.eigenvalues[b]));
    let values = order
        .iter()
        .map(|&i| decomposition.eigenvalues[i])
        .collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| decomposition.eigenvectors[(r, order[c])]);
    Eigh { values, vectors }
}

/// `V f(Λ) V*` for the eigenpairs `e`.
pub(crate) fn spectral<F: Fn(f64) -> f64>(e: &Eigh, f: F) -> CMatrix {
    let n = e.values.len();
    let scaled = CMatrix::from_fn(n, n, |r, c| e.vectors[(r, c)] * f(e.values[c]));
    let out = scaled * e.vectors.adjoint();
    symmetrize(&out)
}

/// Complex matrix with independent standard Gaussian real and imaginary parts.
pub fn random_gaussian_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of `R`'s
/// diagonal folded back into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = random_gaussian_matrix(n, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..n {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for row in 0..n {
            q[(row, c)] *= phase;
        }
    }
    q
}
