//! Reference processes and their quasistochastic matrices.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, RMatrix};
use crate::operator::{gram_matrix, hs_inner_unchecked, DensityOperator, Mic};
use crate::tol;

/// A MIC measurement followed by preparation of `post_states[i]` on outcome `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceProcess {
    mic: Mic,
    post_states: Vec<DensityOperator>,
}

impl ReferenceProcess {
    /// Requires `d^2` post-measurement states of matching dimension whose
    /// Gram matrix has full rank.
    pub fn new(mic: Mic, post_states: Vec<DensityOperator>) -> Result<Self> {
        check_post_states(&mic, &post_states)?;
        let min_eigenvalue = gram_matrix(&post_states)?.min_eigenvalue();
        if min_eigenvalue <= tol::RANK {
            return Err(Error::DependentPostStates { min_eigenvalue });
        }
        Ok(Self { mic, post_states })
    }

    pub fn dim(&self) -> usize {
        self.mic.dim()
    }

    pub fn mic(&self) -> &Mic {
        &self.mic
    }

    pub fn post_states(&self) -> &[DensityOperator] {
        &self.post_states
    }
}

fn check_post_states(mic: &Mic, post_states: &[DensityOperator]) -> Result<()> {
    if post_states.len() != mic.len() {
        return Err(Error::WrongEffectCount {
            expected: mic.len(),
            found: post_states.len(),
        });
    }
    for s in post_states {
        if s.dim() != mic.dim() {
            return Err(Error::DimensionMismatch {
                expected: mic.dim(),
                found: s.dim(),
            });
        }
    }
    Ok(())
}

/// `[M]_ij = tr H_i sigma_j` without requiring the states to be independent.
pub fn phi_inverse_of(mic: &Mic, post_states: &[DensityOperator]) -> Result<RMatrix> {
    check_post_states(mic, post_states)?;
    let n = mic.len();
    Ok(RMatrix::from_fn(n, n, |i, j| {
        hs_inner_unchecked(&mic.effects()[i], post_states[j].operator())
    }))
}

/// `[Phi^{-1}]_ij = tr H_i sigma_j`; column-stochastic.
pub fn phi_inverse(proc: &ReferenceProcess) -> RMatrix {
    phi_inverse_of(&proc.mic, &proc.post_states).expect("validated process")
}

/// How a [`PhiMatrix`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    FromProcess,
    ClosedFormSic,
}

/// Column-quasistochastic matrix mapping reference probabilities to
/// expansion coefficients in the post-measurement basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiMatrix {
    matrix: RMatrix,
    provenance: Provenance,
    condition_number: f64,
}

impl PhiMatrix {
    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// 1-norm condition number of the matrix that was inverted (or of the closed form).
    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    pub fn order(&self) -> usize {
        self.matrix.nrows()
    }

    /// Hilbert space dimension `d`, with `order = d^2`.
    pub fn dim(&self) -> usize {
        let n = self.order();
        (0..=n).find(|d| d * d >= n).unwrap_or(0)
    }

    pub fn determinant(&self) -> f64 {
        linalg::determinant(&self.matrix)
    }
}

/// Inverts a column-stochastic `[tr H_i sigma_j]`, refusing condition numbers above `cond_max`.
pub fn invert_checked(m: &RMatrix, cond_max: f64) -> Result<(RMatrix, f64)> {
    match linalg::invert_with_condition(m) {
        Some((inv, cond)) if cond.is_finite() && cond <= cond_max => Ok((inv, cond)),
        Some((_, cond)) => Err(Error::IllConditioned {
            condition_number: cond,
        }),
        None => Err(Error::IllConditioned {
            condition_number: f64::INFINITY,
        }),
    }
}

/// `Phi = [tr H_i sigma_j]^{-1}` with the default condition-number cap.
pub fn phi(proc: &ReferenceProcess) -> Result<PhiMatrix> {
    phi_with_cond_max(proc, tol::COND_MAX)
}

pub fn phi_with_cond_max(proc: &ReferenceProcess, cond_max: f64) -> Result<PhiMatrix> {
    let (matrix, condition_number) = invert_checked(&phi_inverse(proc), cond_max)?;
    Ok(PhiMatrix {
        matrix,
        provenance: Provenance::FromProcess,
        condition_number,
    })
}

/// Closed form `(d+1) I - J/d` for a SIC measured and re-prepared.
pub fn phi_sic(d: usize) -> PhiMatrix {
    let n = d * d;
    let df = d as f64;
    let matrix = RMatrix::from_fn(n, n, |i, j| {
        if i == j {
            df + 1.0 - 1.0 / df
        } else {
            -1.0 / df
        }
    });
    let condition_number = linalg::invert_with_condition(&matrix).map_or(f64::INFINITY, |(_, c)| c);
    PhiMatrix {
        matrix,
        provenance: Provenance::ClosedFormSic,
        condition_number,
    }
}

/// Column classification of a square real matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnClass {
    /// Columns sum to 1 and every entry is at least `-tol`.
    Stochastic,
    /// Columns sum to 1 but some entry is negative.
    Quasistochastic,
    Neither,
}

pub fn classify_columns(m: &RMatrix, tol: f64) -> ColumnClass {
    let sums_ok = m.column_iter().all(|c| (c.sum() - 1.0).abs() <= tol);
    if !sums_ok {
        ColumnClass::Neither
    } else if m.iter().all(|&x| x >= -tol) {
        ColumnClass::Stochastic
    } else {
        ColumnClass::Quasistochastic
    }
}

/// Post-measurement states `sigma_i = H_i / h_i`.
pub fn proportional_process(mic: &Mic) -> Result<ReferenceProcess> {
    let mut post = Vec::with_capacity(mic.len());
    for (index, (e, &h)) in mic.effects().iter().zip(mic.weights()).enumerate() {
        if h <= 0.0 {
            return Err(Error::ZeroEffect { index });
        }
        post.push(DensityOperator::new(e * (1.0 / h))?);
    }
    ReferenceProcess::new(mic.clone(), post)
}
