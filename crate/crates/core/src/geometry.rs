//! Determinant bounds and the closed-form volumes of the SIC probability
//! region, the probability simplex, and Hilbert-Schmidt state space.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::ComplexField;

use crate::error::Result;
use crate::linalg::{self, RMatrix};
use crate::math::{exp, ln, ln_gamma, powf};
use crate::operator::Mic;
use crate::process::{phi, proportional_process};

/// `ln(Gamma(1) Gamma(2) ... Gamma(d))`
fn ln_superfactorial(d: usize) -> f64 {
    (1..=d).map(|k| ln_gamma(k as f64)).sum()
}

fn d2(d: usize) -> f64 {
    (d * d) as f64
}

/// `ln(d / Gamma(d^2))`
pub fn ln_vol_simplex(d: usize) -> f64 {
    ln(d as f64) - ln_gamma(d2(d))
}

/// Euclidean volume `d / Gamma(d^2)` of the `(d^2 - 1)`-simplex.
pub fn vol_simplex(d: usize) -> f64 {
    exp(ln_vol_simplex(d))
}

pub fn ln_vol_p_sic(d: usize) -> f64 {
    let df = d as f64;
    0.5 * (df * (df - 1.0) * ln(2.0 * PI) - (d2(d) - 2.0) * ln(df) - (d2(d) - 1.0) * ln(df + 1.0))
        + ln_superfactorial(d)
        - ln_gamma(d2(d))
}

/// Euclidean volume of the image of state space under a SIC's Born map.
pub fn vol_p_sic(d: usize) -> f64 {
    exp(ln_vol_p_sic(d))
}

pub fn ln_hs_volume_qd(d: usize) -> f64 {
    let df = d as f64;
    0.5 * ln(df) + 0.5 * df * (df - 1.0) * ln(2.0 * PI) + ln_superfactorial(d) - ln_gamma(d2(d))
}

/// Hilbert-Schmidt volume `sqrt(d) (2 pi)^{d(d-1)/2} Gamma(1)...Gamma(d) / Gamma(d^2)`.
pub fn hs_volume_qd(d: usize) -> f64 {
    exp(ln_hs_volume_qd(d))
}

/// Metric `d(d+1)(I + J)` induced on the simplex coordinates `p^1..p^{d^2-1}`
/// by the Hilbert-Schmidt metric in the SIC basis.
pub fn induced_metric_sic(d: usize) -> RMatrix {
    let n = d * d - 1;
    let scale = (d * (d + 1)) as f64;
    RMatrix::from_fn(n, n, |i, j| if i == j { 2.0 * scale } else { scale })
}

/// Closed-form volumes for one dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VolumeReport {
    pub d: usize,
    pub vol_p_sic: f64,
    pub vol_simplex: f64,
    pub ratio: f64,
    pub vol_hs_qd: f64,
}

pub fn volume_report(d: usize) -> VolumeReport {
    let ln_p = ln_vol_p_sic(d);
    let ln_s = ln_vol_simplex(d);
    let ln_hs = ln_hs_volume_qd(d);
    let report = VolumeReport {
        d,
        vol_p_sic: exp(ln_p),
        vol_simplex: exp(ln_s),
        ratio: exp(ln_p - ln_s),
        vol_hs_qd: exp(ln_hs),
    };
    debug_assert!((ln_hs - ln_p - 0.5 * (d2(d) - 1.0) * ln(d2(d) + d as f64)).abs() < 1e-9);
    report
}

/// `det Phi_SIC = (d+1)^{d^2 - 1}`.
pub fn phi_sic_determinant(d: usize) -> f64 {
    powf(d as f64 + 1.0, d2(d) - 1.0)
}

/// `det Phi_p - (d+1)^{d^2-1}` for the proportional process of `mic`.
pub fn lemma1_margin(mic: &Mic) -> Result<f64> {
    let det = phi(&proportional_process(mic)?)?.determinant();
    Ok(det - phi_sic_determinant(mic.dim()))
}

/// [`lemma1_margin`] divided by `(d+1)^{d^2-1}`.
pub fn lemma1_relative_margin(mic: &Mic) -> Result<f64> {
    Ok(lemma1_margin(mic)? / phi_sic_determinant(mic.dim()))
}

/// Gram matrix `(d delta_ij + 1) / (d^2 (d+1))` of any SIC.
pub fn sic_gram(d: usize) -> RMatrix {
    let df = d as f64;
    let n = d * d;
    RMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        (df * delta + 1.0) / (df * df * (df + 1.0))
    })
}

/// `det G_SIC - det G`.
pub fn gram_det_margin(mic: &Mic) -> f64 {
    linalg::determinant(&sic_gram(mic.dim())) - mic.gram().determinant()
}

/// Eigenvalues of `Phi_p` (real and positive) in ascending order.
///
/// `Phi_p^{-1} = G A^{-1}` with `A = diag(h)` is similar to the symmetric
/// `A^{-1/2} G A^{-1/2}`, whose eigenvalues are diagonalized instead.
pub fn proportional_spectrum(mic: &Mic) -> Vec<f64> {
    let inverse_eigs = proportional_inverse_spectrum(mic);
    let mut ev: Vec<f64> = inverse_eigs.iter().map(|mu| 1.0 / mu).collect();
    linalg::sort_ascending(&mut ev);
    ev
}

fn proportional_inverse_spectrum(mic: &Mic) -> Vec<f64> {
    let h = mic.weights();
    let g = mic.gram().matrix();
    let n = h.len();
    let sym = RMatrix::from_fn(n, n, |i, j| g[(i, j)] / ComplexField::sqrt(h[i] * h[j]));
    linalg::symmetric_eigenvalues(&sym)
}

/// `(d - 1) - sum 1/lambda_i(Phi_p)` over all but the unit eigenvalue.
pub fn reciprocal_bound_margin(mic: &Mic) -> f64 {
    let mu = proportional_inverse_spectrum(mic);
    // largest eigenvalue of the column-stochastic inverse is the unit one
    let total: f64 = mu[..mu.len() - 1].iter().sum();
    (mic.dim() as f64 - 1.0) - total
}
