//! Dense complex matrix aliases and a few helpers used throughout the crate.

use nalgebra::{DMatrix, DVector, Dim, Matrix, RawStorage};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Squared Frobenius norm of any complex matrix or vector view.
pub fn fro2<R: Dim, C: Dim, S: RawStorage<Complex64, R, C>>(m: &Matrix<Complex64, R, C, S>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Squared Euclidean norm of a vector.
pub fn norm2(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `a · bᵀ` (plain transpose, no conjugation).
pub fn outer_t(a: &CVector, b: &CVector) -> CMatrix {
    CMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j])
}

/// `Re{Tr(A·Bᴴ)}`, i.e. the real Frobenius inner product of two equal-shape matrices.
pub fn re_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum()
}

/// Largest absolute entry of `a − b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
