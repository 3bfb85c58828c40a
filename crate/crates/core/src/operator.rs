//! Hermitian operators, states, POVMs and MICs.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix};
use crate::tol;

/// A `d x d` complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Validates and symmetrizes `matrix`.
    ///
    /// Residuals up to [`tol::HERMITIAN`] are absorbed by replacing the input
    /// with `(A + A^dagger)/2`; anything larger is rejected.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let adjoint = matrix.adjoint();
        let residual = linalg::max_abs_diff(&matrix, &adjoint);
        if residual > tol::HERMITIAN {
            return Err(Error::NonHermitian { residual });
        }
        let matrix = (matrix + adjoint) * Complex64::from(0.5);
        Ok(Self { matrix })
    }

    /// Builds from row-major real and imaginary parts.
    pub fn from_parts(re: &[f64], im: &[f64], d: usize) -> Result<Self> {
        if re.len() != d * d || im.len() != d * d {
            return Err(Error::ShapeMismatch {
                expected: d * d,
                found: re.len().max(im.len()),
            });
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| {
            Complex64::new(re[i * d + j], im[i * d + j])
        }))
    }

    pub(crate) fn from_hermitian_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(d, d),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        Self {
            matrix: DMatrix::from_fn(
                d,
                d,
                |i, j| if i == j { diag[i].into() } else { 0.0.into() },
            ),
        }
    }

    /// Rank-1 projector onto the ray of `psi` (normalization is applied here).
    pub fn projector(psi: &DVector<Complex64>) -> Self {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let matrix = psi * psi.adjoint() * Complex64::from(1.0 / norm2);
        Self::from_hermitian_unchecked(matrix).symmetrized()
    }

    /// `U A U^dagger` for a unitary `u`.
    pub fn conjugate(&self, u: &CMatrix) -> Self {
        Self::from_hermitian_unchecked(u * &self.matrix * u.adjoint()).symmetrized()
    }

    /// `X A X^dagger` for an arbitrary square `x`; the result stays Hermitian.
    pub fn congruence(&self, x: &CMatrix) -> Self {
        self.conjugate(x)
    }

    fn symmetrized(self) -> Self {
        let adj = self.matrix.adjoint();
        Self {
            matrix: (self.matrix + adj) * Complex64::from(0.5),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        hs_inner_unchecked(self, self)
    }

    /// Row-major real parts.
    pub fn re_parts(&self) -> Vec<f64> {
        let d = self.dim();
        (0..d * d).map(|k| self.matrix[(k / d, k % d)].re).collect()
    }

    /// Row-major imaginary parts.
    pub fn im_parts(&self) -> Vec<f64> {
        let d = self.dim();
        (0..d * d).map(|k| self.matrix[(k / d, k % d)].im).collect()
    }

    /// Column-stacked vectorization `|A>>`.
    pub fn vectorize(&self) -> DVector<Complex64> {
        DVector::from_iterator(self.matrix.len(), self.matrix.iter().copied())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: Self) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: Self) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        HermitianOperator {
            matrix: &self.matrix * Complex64::from(rhs),
        }
    }
}

/// Hilbert-Schmidt inner product `tr(AB)`.
pub fn hs_inner(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    a.check_dim(b)?;
    Ok(hs_inner_unchecked(a, b))
}

pub(crate) fn hs_inner_unchecked(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    // tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B
    a.matrix
        .iter()
        .zip(b.matrix.iter())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

/// Smallest eigenvalue.
pub fn min_eigenvalue(a: &HermitianOperator) -> f64 {
    a.eigenvalues()[0]
}

/// Sum of a nonempty list of same-dimension operators.
pub fn sum_operators(ops: &[HermitianOperator]) -> Result<HermitianOperator> {
    let first = ops.first().ok_or(Error::EmptyPovm)?;
    let mut acc = first.matrix.clone();
    for op in &ops[1..] {
        first.check_dim(op)?;
        acc += &op.matrix;
    }
    Ok(HermitianOperator { matrix: acc })
}

/// A unit-trace positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > tol::TRACE {
            return Err(Error::TraceMismatch { trace });
        }
        let min_eigenvalue = min_eigenvalue(&op);
        if min_eigenvalue < -tol::PSD {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { op })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            op: &HermitianOperator::identity(d) * (1.0 / d as f64),
        }
    }

    /// Pure state `|psi><psi|` (normalized internally).
    pub fn pure(psi: &DVector<Complex64>) -> Self {
        Self {
            op: HermitianOperator::projector(psi),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.op
    }

    pub fn purity(&self) -> f64 {
        self.op.purity()
    }
}

impl AsRef<HermitianOperator> for DensityOperator {
    fn as_ref(&self) -> &HermitianOperator {
        &self.op
    }
}

/// An ordered list of positive semidefinite effects resolving the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<HermitianOperator>,
    resolve_residual: f64,
}

impl Povm {
    pub fn new(effects: Vec<HermitianOperator>) -> Result<Self> {
        let total = sum_operators(&effects)?;
        let d = total.dim();
        for e in &effects {
            let min_eigenvalue = min_eigenvalue(e);
            if min_eigenvalue < -tol::PSD {
                return Err(Error::NotPositive { min_eigenvalue });
            }
        }
        let resolve_residual = linalg::max_abs_diff(total.matrix(), &CMatrix::identity(d, d));
        if resolve_residual > tol::RESOLVE {
            return Err(Error::NotResolvingIdentity {
                residual: resolve_residual,
            });
        }
        Ok(Self {
            effects,
            resolve_residual,
        })
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn into_effects(self) -> Vec<HermitianOperator> {
        self.effects
    }

    /// Largest entrywise deviation of `sum(effects)` from the identity.
    pub fn resolve_residual(&self) -> f64 {
        self.resolve_residual
    }
}

/// Real symmetric matrix of pairwise Hilbert-Schmidt inner products.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    matrix: RMatrix,
}

impl GramMatrix {
    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::symmetric_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn determinant(&self) -> f64 {
        linalg::determinant(&self.matrix)
    }
}

/// `[G]_ij = tr(ops_i ops_j)`.
pub fn gram_matrix<T: AsRef<HermitianOperator>>(ops: &[T]) -> Result<GramMatrix> {
    let n = ops.len();
    if let Some(first) = ops.first() {
        for op in ops {
            first.as_ref().check_dim(op.as_ref())?;
        }
    }
    let mut matrix = RMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = hs_inner_unchecked(ops[i].as_ref(), ops[j].as_ref());
            matrix[(i, j)] = v;
            matrix[(j, i)] = v;
        }
    }
    Ok(GramMatrix { matrix })
}

impl AsRef<HermitianOperator> for HermitianOperator {
    fn as_ref(&self) -> &HermitianOperator {
        self
    }
}

/// Outcome of [`check_mic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicVerdict {
    pub is_mic: bool,
    pub min_gram_eigenvalue: f64,
    pub resolve_residual: f64,
}

/// Tests whether a POVM is minimal informationally complete: `d^2` effects
/// with a full-rank Gram matrix (smallest eigenvalue above `tol`).
pub fn check_mic(povm: &Povm, tol: f64) -> MicVerdict {
    let d = povm.dim();
    let gram = gram_matrix(povm.effects()).expect("POVM effects share a dimension");
    let min_gram_eigenvalue = gram.min_eigenvalue();
    MicVerdict {
        is_mic: povm.len() == d * d && min_gram_eigenvalue > tol,
        min_gram_eigenvalue,
        resolve_residual: povm.resolve_residual(),
    }
}

/// A minimal informationally complete POVM.
#[derive(Debug, Clone, PartialEq)]
pub struct Mic {
    povm: Povm,
    weights: Vec<f64>,
    gram: GramMatrix,
}

impl Mic {
    pub fn new(povm: Povm) -> Result<Self> {
        let d = povm.dim();
        if povm.len() != d * d {
            return Err(Error::WrongEffectCount {
                expected: d * d,
                found: povm.len(),
            });
        }
        let gram = gram_matrix(povm.effects())?;
        let min_eigenvalue = gram.min_eigenvalue();
        if min_eigenvalue <= tol::RANK {
            return Err(Error::GramRankDeficient { min_eigenvalue });
        }
        let weights: Vec<f64> = povm
            .effects()
            .iter()
            .map(HermitianOperator::trace)
            .collect();
        let sum: f64 = weights.iter().sum();
        if (sum - d as f64).abs() > tol::TRACE {
            return Err(Error::WeightSumMismatch {
                sum,
                expected: d as f64,
            });
        }
        Ok(Self {
            povm,
            weights,
            gram,
        })
    }

    pub fn from_effects(effects: Vec<HermitianOperator>) -> Result<Self> {
        Self::new(Povm::new(effects)?)
    }

    pub fn dim(&self) -> usize {
        self.povm.dim()
    }

    pub fn len(&self) -> usize {
        self.povm.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        self.povm.effects()
    }

    /// `h_i = tr H_i`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    /// True when every effect has rank one to within `tol` on `(tr H)^2 - tr H^2`.
    pub fn is_rank_one(&self, tol: f64) -> bool {
        self.effects()
            .iter()
            .zip(&self.weights)
            .all(|(e, h)| h * h - e.purity() <= tol)
    }
}
