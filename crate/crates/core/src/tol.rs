//! Default numerical tolerances.

/// Maximum entrywise deviation from Hermiticity absorbed by symmetrization.
pub const HERMITIAN: f64 = 1e-10;
/// Allowed deviation of a state trace from 1 and of MIC weights from `d`.
pub const TRACE: f64 = 1e-10;
/// Maximum entrywise residual of `sum(effects) - I`.
pub const RESOLVE: f64 = 1e-10;
/// Most negative eigenvalue still accepted as positive semidefinite.
pub const PSD: f64 = 1e-9;
/// Smallest Gram eigenvalue accepted as full rank.
pub const RANK: f64 = 1e-8;
/// SIC certification tolerance on Gram entries.
pub const SIC: f64 = 1e-9;
/// Absolute tolerance on majorization partial sums.
pub const MAJORIZATION: f64 = 1e-9;
/// Largest accepted condition number when inverting `[tr H_i sigma_j]`.
pub const COND_MAX: f64 = 1e10;
/// Probability vector entries above this (negated) count as nonnegative.
pub const PROB_NEGATIVE: f64 = 1e-12;
/// Sum residual of probability and quasiprobability vectors.
pub const PROB_SUM: f64 = 1e-10;
/// Sum drift accepted, then renormalized, in vectors produced through `Phi`,
/// which carries the inversion error of `[tr H_i sigma_j]`.
pub const PHI_DRIFT: f64 = 1e-8;
