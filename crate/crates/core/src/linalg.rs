//! Thin helpers over nalgebra shared by the numerical modules.

use alloc::vec::Vec;

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub(crate) fn sort_ascending(v: &mut [f64]) {
    v.sort_by(|a, b| a.total_cmp(b));
}

pub(crate) fn sort_descending(v: &mut [f64]) {
    v.sort_by(|a, b| b.total_cmp(a));
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// Only the lower triangle is read, so the input must already be Hermitian.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    sort_ascending(&mut ev);
    ev
}

/// Eigenvalues of a real symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(m: &RMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    sort_ascending(&mut ev);
    ev
}

/// `M^{-1/2}` for a Hermitian positive definite matrix, `None` if any eigenvalue is below `floor`.
pub fn inverse_sqrt(m: &CMatrix, floor: f64) -> Option<CMatrix> {
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= floor) {
        return None;
    }
    let n = m.nrows();
    let scaled = DMatrix::from_fn(n, n, |i, j| {
        eig.eigenvectors[(i, j)] * Complex64::from(1.0 / eig.eigenvalues[j].sqrt())
    });
    Some(&scaled * eig.eigenvectors.adjoint())
}

/// Determinant through partial-pivot LU.
pub fn determinant(m: &RMatrix) -> f64 {
    m.clone().lu().determinant()
}

/// Inverse through partial-pivot LU together with the 1-norm condition number.
///
/// Returns `None` when LU meets an exactly zero pivot.
pub fn invert_with_condition(m: &RMatrix) -> Option<(RMatrix, f64)> {
    let inv = m.clone().lu().try_inverse()?;
    let cond = one_norm(m) * one_norm(&inv);
    Some((inv, cond))
}

pub(crate) fn one_norm(m: &RMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Singular values in nonincreasing order.
pub fn singular_values_of<T>(m: &DMatrix<T>) -> Vec<f64>
where
    T: ComplexField<RealField = f64>,
{
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sort_descending(&mut s);
    s
}

/// Kronecker product of two complex matrices.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
