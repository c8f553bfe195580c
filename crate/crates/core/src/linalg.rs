//! Thin helpers over nalgebra for the small dense complex matrices used
//! throughout the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues and eigenvectors of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    HermitianEigen { values, vectors }
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_eigenvalues_desc(m: &CMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Gram matrix on the smaller side of `c`: `C C†` if `c` has no more rows
/// than columns, `C† C` otherwise. Both share the same nonzero spectrum.
pub fn smaller_gram(c: &CMatrix) -> CMatrix {
    if c.nrows() <= c.ncols() {
        c * c.adjoint()
    } else {
        c.adjoint() * c
    }
}

pub fn frobenius_sq(c: &CMatrix) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum()
}

pub fn max_hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}
