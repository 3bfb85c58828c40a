//! Majorization orders, the mean inequalities, singular values, and the
//! spectral checks built on them.

use alloc::vec::Vec;
use core::ops::Deref;

use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::math::{exp, ln, ln_1p};
use crate::operator::{gram_matrix, HermitianOperator};
use crate::process::{phi, phi_sic, PhiMatrix, ReferenceProcess};
use crate::tol;

/// Entries in nonincreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedVector {
    entries: Vec<f64>,
}

impl SortedVector {
    pub fn new(mut entries: Vec<f64>) -> Self {
        linalg::sort_descending(&mut entries);
        Self { entries }
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }
}

impl Deref for SortedVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.entries
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Relation {
    Majorizes,
    WeaklyMajorizes,
    LogMajorizes,
    WeaklyLogMajorizes,
    None,
}

/// Partial-sum (or partial log-product) comparison of two sorted vectors.
///
/// `worst_margin` is the smallest of `sum_{i<=k} x_i - sum_{i<=k} y_i` over
/// `k` (in log space for the log variants), reached first at the 0-based
/// `worst_index`; `max_abs_margin` is the largest absolute margin, so both
/// vectors agree in every partial sum when it is within tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorizationVerdict {
    pub relation: Relation,
    pub worst_margin: f64,
    pub worst_index: usize,
    pub max_abs_margin: f64,
}

impl MajorizationVerdict {
    pub fn holds(&self) -> bool {
        self.relation != Relation::None
    }

    pub fn is_equality(&self, tol: f64) -> bool {
        self.holds() && self.max_abs_margin <= tol
    }
}

fn verdict_from_margins(
    margins: &[f64],
    slack: f64,
    full: Relation,
    weak: Relation,
) -> MajorizationVerdict {
    let (worst_index, worst_margin) =
        margins
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, m)| if m < acc.1 { (i, m) } else { acc },
            );
    let max_abs_margin = margins.iter().fold(0.0, |a: f64, m| a.max(m.abs()));
    let relation = if margins.is_empty() {
        full
    } else if worst_margin < -slack {
        Relation::None
    } else if margins[margins.len() - 1].abs() <= slack {
        full
    } else {
        weak
    };
    let worst_margin = if margins.is_empty() {
        0.0
    } else {
        worst_margin
    };
    MajorizationVerdict {
        relation,
        worst_margin,
        worst_index,
        max_abs_margin,
    }
}

fn check_lengths(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

/// `x` weakly majorizes `y` from below when every partial sum of `x` sorted
/// nonincreasingly is at least that of `y` (within `tol`); it majorizes when
/// the totals also agree.
pub fn weak_majorizes(x: &[f64], y: &[f64], tol: f64) -> Result<MajorizationVerdict> {
    check_lengths(x, y)?;
    let (xs, ys) = (SortedVector::new(x.to_vec()), SortedVector::new(y.to_vec()));
    let mut margins = Vec::with_capacity(x.len());
    let (mut sx, mut sy) = (0.0, 0.0);
    for (a, b) in xs.iter().zip(ys.iter()) {
        sx += a;
        sy += b;
        margins.push(sx - sy);
    }
    Ok(verdict_from_margins(
        &margins,
        tol,
        Relation::Majorizes,
        Relation::WeaklyMajorizes,
    ))
}

const ZERO_FLOOR: f64 = 1e-14;

/// Multiplicative analogue of [`weak_majorizes`]: partial products of `x`
/// must dominate those of `y` up to a factor `1 - tol`. Comparison is done
/// on sums of logarithms. Entries at or below `1e-14` are errors unless both
/// vectors contain the same number of them, in which case they are removed
/// from both.
pub fn weak_log_majorizes(x: &[f64], y: &[f64], tol: f64) -> Result<MajorizationVerdict> {
    check_lengths(x, y)?;
    for v in [x, y] {
        if let Some((index, &value)) = v.iter().enumerate().find(|(_, &e)| e < 0.0 || e.is_nan()) {
            return Err(Error::NonPositiveEntry { index, value });
        }
    }
    let zeros = |v: &[f64]| v.iter().filter(|&&e| e <= ZERO_FLOOR).count();
    let (zx, zy) = (zeros(x), zeros(y));
    if zx != zy {
        let v = if zx > zy { x } else { y };
        let (index, &value) = v
            .iter()
            .enumerate()
            .find(|(_, &e)| e <= ZERO_FLOOR)
            .expect("has zero");
        return Err(Error::NonPositiveEntry { index, value });
    }
    let keep = x.len() - zx;
    let (xs, ys) = (SortedVector::new(x.to_vec()), SortedVector::new(y.to_vec()));
    let mut margins = Vec::with_capacity(keep);
    let mut acc = 0.0;
    for (a, b) in xs[..keep].iter().zip(&ys[..keep]) {
        acc += ln(*a) - ln(*b);
        margins.push(acc);
    }
    let slack = -ln_1p(-tol);
    Ok(verdict_from_margins(
        &margins,
        slack,
        Relation::LogMajorizes,
        Relation::WeaklyLogMajorizes,
    ))
}

/// Arithmetic, geometric and harmonic means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Means {
    pub arithmetic: f64,
    pub geometric: f64,
    pub harmonic: f64,
}

pub fn mean_chain(x: &[f64]) -> Result<Means> {
    if x.is_empty() {
        return Err(Error::LengthMismatch { left: 0, right: 1 });
    }
    if let Some((index, &value)) = x.iter().enumerate().find(|(_, &e)| e <= 0.0 || e.is_nan()) {
        return Err(Error::NonPositiveEntry { index, value });
    }
    let n = x.len() as f64;
    Ok(Means {
        arithmetic: x.iter().sum::<f64>() / n,
        geometric: exp(x.iter().map(|&e| ln(e)).sum::<f64>() / n),
        harmonic: n / x.iter().map(|e| 1.0 / e).sum::<f64>(),
    })
}

/// Singular values of a real or complex matrix, nonincreasing.
pub fn singular_values<T>(m: &DMatrix<T>) -> SortedVector
where
    T: ComplexField<RealField = f64>,
{
    SortedVector {
        entries: linalg::singular_values_of(m),
    }
}

/// Compares `s(Phi)` against `s(Phi_SIC)` under weak log majorization.
pub fn lemma2_check(proc: &ReferenceProcess) -> Result<MajorizationVerdict> {
    lemma2_verdict(&phi(proc)?)
}

/// [`lemma2_check`] on an already inverted `Phi`.
pub fn lemma2_verdict(phi: &PhiMatrix) -> Result<MajorizationVerdict> {
    let s = singular_values(phi.matrix());
    let s_sic = singular_values(phi_sic(phi.dim()).matrix());
    weak_log_majorizes(&s, &s_sic, tol::MAJORIZATION)
}

/// `(d, d/(d+1), ..., d/(d+1))`, the Gram spectrum of SIC projectors.
pub fn sic_gram_spectrum(d: usize) -> Vec<f64> {
    let df = d as f64;
    let mut v = alloc::vec![df / (df + 1.0); d * d];
    v[0] = df;
    v
}

fn check_normalized_basis(projectors: &[HermitianOperator]) -> Result<usize> {
    let d = projectors
        .first()
        .map(HermitianOperator::dim)
        .ok_or(Error::EmptyPovm)?;
    if projectors.len() != d * d {
        return Err(Error::WrongEffectCount {
            expected: d * d,
            found: projectors.len(),
        });
    }
    for (index, p) in projectors.iter().enumerate() {
        if p.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.dim(),
            });
        }
        let purity = p.purity();
        if (purity - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { index, purity });
        }
    }
    Ok(d)
}

/// Gram spectrum of `d^2` operators with `tr P^2 = 1` against the SIC spectrum.
pub fn zhu_check(projectors: &[HermitianOperator]) -> Result<MajorizationVerdict> {
    let d = check_normalized_basis(projectors)?;
    let spectrum = gram_matrix(projectors)?.eigenvalues();
    weak_majorizes(&spectrum, &sic_gram_spectrum(d), tol::MAJORIZATION)
}

/// Spectrum of the frame superoperator `sum_j |P_j>><<P_j|` acting on `C^{d^2}`.
pub fn frame_operator_spectrum(projectors: &[HermitianOperator]) -> Result<SortedVector> {
    let d = check_normalized_basis(projectors)?;
    let n = d * d;
    let mut frame = CMatrix::zeros(n, n);
    for p in projectors {
        let v = p.vectorize();
        frame += &v * v.adjoint();
    }
    Ok(SortedVector::new(linalg::hermitian_eigenvalues(&frame)))
}
