//! The Born Rule three ways: operator form, quasistochastic (Phi-deformed)
//! form, and the classical law of total probability.

use alloc::vec::Vec;
use core::ops::Deref;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::operator::{
    hs_inner_unchecked, min_eigenvalue, DensityOperator, HermitianOperator, Povm,
};
use crate::process::{PhiMatrix, ReferenceProcess};
use crate::tol;

fn check_sum(entries: &[f64]) -> Result<f64> {
    let sum: f64 = entries.iter().sum();
    if !sum.is_finite() || (sum - 1.0).abs() > tol::PROB_SUM {
        return Err(Error::NotNormalizable { sum });
    }
    Ok(sum - 1.0)
}

/// Removes a sum residual below tolerance from the largest entry.
fn absorb_residual(entries: &mut [f64], residual: f64) {
    if residual == 0.0 {
        return;
    }
    let largest = entries
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("nonempty");
    entries[largest] -= residual;
}

/// Nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(mut entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::NotNormalizable { sum: 0.0 });
        }
        if let Some((index, &value)) = entries
            .iter()
            .enumerate()
            .find(|(_, &x)| x < -tol::PROB_NEGATIVE)
        {
            return Err(Error::NegativeProbability { index, value });
        }
        let residual = check_sum(&entries)?;
        absorb_residual(&mut entries, residual);
        Ok(Self(entries))
    }

    pub fn uniform(n: usize) -> Self {
        Self(alloc::vec![1.0 / n as f64; n])
    }

    /// Point mass on `index`.
    pub fn vertex(n: usize, index: usize) -> Self {
        let mut v = alloc::vec![0.0; n];
        v[index] = 1.0;
        Self(v)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ProbVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Real entries summing to one; entries may be negative or exceed one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiProbVector(Vec<f64>);

impl QuasiProbVector {
    pub fn new(mut entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::NotNormalizable { sum: 0.0 });
        }
        let residual = check_sum(&entries)?;
        absorb_residual(&mut entries, residual);
        Ok(Self(entries))
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for QuasiProbVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `n_out x d^2` matrix whose column `i` is `P(D | H_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalMatrix(RMatrix);

impl ConditionalMatrix {
    pub fn new(matrix: RMatrix) -> Result<Self> {
        for c in matrix.column_iter() {
            ProbVector::new(c.iter().copied().collect())?;
        }
        Ok(Self(matrix))
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.0
    }
}

/// `Q(D_j) = tr rho D_j`.
pub fn born_probabilities(rho: &DensityOperator, povm: &Povm) -> Result<ProbVector> {
    if rho.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            found: rho.dim(),
        });
    }
    ProbVector::new(
        povm.effects()
            .iter()
            .map(|e| hs_inner_unchecked(rho.operator(), e))
            .collect(),
    )
}

/// `P(D_j | H_i) = tr D_j sigma_i`.
pub fn conditional_matrix(povm: &Povm, proc: &ReferenceProcess) -> Result<ConditionalMatrix> {
    if povm.dim() != proc.dim() {
        return Err(Error::DimensionMismatch {
            expected: proc.dim(),
            found: povm.dim(),
        });
    }
    let states = proc.post_states();
    let m = RMatrix::from_fn(povm.len(), states.len(), |j, i| {
        hs_inner_unchecked(&povm.effects()[j], states[i].operator())
    });
    ConditionalMatrix::new(m)
}

fn mat_vec(m: &RMatrix, v: &[f64]) -> Result<Vec<f64>> {
    if m.ncols() != v.len() {
        return Err(Error::ShapeMismatch {
            expected: m.ncols(),
            found: v.len(),
        });
    }
    Ok((m * DVector::from_column_slice(v))
        .iter()
        .copied()
        .collect())
}

/// `Phi P(H)`: expansion coefficients of the state in the post-measurement basis.
pub fn quasi_image(p_ref: &ProbVector, phi: &PhiMatrix) -> Result<QuasiProbVector> {
    QuasiProbVector::new(renormalize_drift(mat_vec(phi.matrix(), p_ref)?)?)
}

fn renormalize_drift(v: Vec<f64>) -> Result<Vec<f64>> {
    let sum: f64 = v.iter().sum();
    if !sum.is_finite() || (sum - 1.0).abs() > tol::PHI_DRIFT {
        return Err(Error::NotNormalizable { sum });
    }
    Ok(v.into_iter().map(|x| x / sum).collect())
}

/// `Q(D) = P(D|H) Phi P(H)`.
pub fn q_via_phi(
    p_ref: &ProbVector,
    cond: &ConditionalMatrix,
    phi: &PhiMatrix,
) -> Result<ProbVector> {
    if cond.matrix().ncols() != phi.order() {
        return Err(Error::ShapeMismatch {
            expected: phi.order(),
            found: cond.matrix().ncols(),
        });
    }
    let coeffs = mat_vec(phi.matrix(), p_ref)?;
    ProbVector::new(renormalize_drift(mat_vec(cond.matrix(), &coeffs)?)?)
}

/// Law of total probability `P(D) = P(D|H) P(H)`.
pub fn ltp(p_ref: &ProbVector, cond: &ConditionalMatrix) -> Result<ProbVector> {
    ProbVector::new(mat_vec(cond.matrix(), p_ref)?)
}

/// Result of [`reconstruct_state`]: a unit-trace Hermitian operator that may
/// fail to be positive when the reference vector lies outside the image of
/// state space.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub operator: HermitianOperator,
    pub min_eigenvalue: f64,
}

impl Reconstruction {
    pub fn is_state(&self) -> bool {
        self.min_eigenvalue >= -tol::PSD
    }

    pub fn into_density(self) -> Result<DensityOperator> {
        DensityOperator::new(self.operator)
    }
}

/// `rho = sum_i [Phi P(H)]_i sigma_i`.
pub fn reconstruct_state(p_ref: &[f64], proc: &ReferenceProcess) -> Result<Reconstruction> {
    reconstruct_with_phi(p_ref, proc, &crate::process::phi(proc)?)
}

/// [`reconstruct_state`] with a precomputed `phi(proc)`.
pub fn reconstruct_with_phi(
    p_ref: &[f64],
    proc: &ReferenceProcess,
    phi: &PhiMatrix,
) -> Result<Reconstruction> {
    let n = proc.mic().len();
    if p_ref.len() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            found: p_ref.len(),
        });
    }
    let coeffs = mat_vec(phi.matrix(), p_ref)?;
    let d = proc.dim();
    let mut acc = HermitianOperator::zeros(d);
    for (c, s) in coeffs.iter().zip(proc.post_states()) {
        acc = &acc + &(s.operator() * *c);
    }
    let min_eigenvalue = min_eigenvalue(&acc);
    Ok(Reconstruction {
        operator: acc,
        min_eigenvalue,
    })
}

/// Total negative mass `sum_i max(0, -q_i)`.
pub fn negativity(qp: &[f64]) -> f64 {
    qp.iter().map(|&x| (-x).max(0.0)).sum()
}

/// Distances between two outcome vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    /// `max_j |a_j - b_j|`
    pub max_gap: f64,
    /// `(1/2) sum_j |a_j - b_j|`
    pub total_variation: f64,
}

pub fn deviation(a: &[f64], b: &[f64]) -> Result<Deviation> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
    let max_gap = diffs.clone().fold(0.0, f64::max);
    let total_variation = 0.5 * diffs.sum::<f64>();
    Ok(Deviation {
        max_gap,
        total_variation,
    })
}
