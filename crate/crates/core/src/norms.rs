//! Schatten and Ky Fan norms and distances of `Phi` from the identity.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::majorization::{singular_values, SortedVector};
use crate::math::powf;
use crate::process::{phi, phi_sic, PhiMatrix, ReferenceProcess};

/// A unitarily invariant norm. `Schatten(f64::INFINITY)` is the operator norm
/// and is treated as `KyFan(1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "String", into = "String"))]
pub enum NormSpec {
    Schatten(f64),
    KyFan(usize),
}

impl NormSpec {
    pub fn schatten(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidSpec(format!(
                "Schatten exponent {p} is below 1"
            )));
        }
        Ok(if p == f64::INFINITY {
            Self::KyFan(1)
        } else {
            Self::Schatten(p)
        })
    }

    pub fn ky_fan(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSpec(
                "Ky Fan index must be positive".to_string(),
            ));
        }
        Ok(Self::KyFan(k))
    }

    /// Checks the spec against a matrix of order `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            Self::Schatten(p) if p.is_nan() || p < 1.0 => Err(Error::InvalidSpec(format!(
                "Schatten exponent {p} is below 1"
            ))),
            Self::KyFan(k) if k == 0 || k > n => Err(Error::InvalidSpec(format!(
                "Ky Fan index {k} outside 1..={n}"
            ))),
            _ => Ok(()),
        }
    }

    /// The default sweep: Schatten 1 and 2 plus Ky Fan `1..=n`. Ky Fan 1 is
    /// the Schatten infinity norm.
    pub fn standard_suite(n: usize) -> Vec<Self> {
        let mut v = alloc::vec![Self::Schatten(1.0), Self::Schatten(2.0)];
        v.extend((1..=n).map(Self::KyFan));
        v
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Schatten(p) if *p == f64::INFINITY => write!(f, "schatten:inf"),
            Self::Schatten(p) => write!(f, "schatten:{p}"),
            Self::KyFan(k) => write!(f, "kyfan:{k}"),
        }
    }
}

impl FromStr for NormSpec {
    type Err = Error;

    /// Parses `schatten:P` (P a real >= 1 or `inf`) and `kyfan:K`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(s.to_string());
        let (kind, arg) = s.trim().split_once(':').ok_or_else(bad)?;
        match kind {
            "schatten" => {
                let p = match arg {
                    "inf" | "infinity" => f64::INFINITY,
                    _ => arg.parse::<f64>().map_err(|_| bad())?,
                };
                Self::schatten(p)
            }
            "kyfan" => Self::ky_fan(arg.parse::<usize>().map_err(|_| bad())?),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for NormSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<NormSpec> for String {
    fn from(spec: NormSpec) -> String {
        spec.to_string()
    }
}

/// Singular values of one matrix, reused across norm evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum(SortedVector);

impl SingularSpectrum {
    pub fn of<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Self {
        Self(singular_values(m))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self, spec: NormSpec) -> Result<f64> {
        let s = self.values();
        spec.validate(s.len())?;
        Ok(match spec {
            NormSpec::KyFan(k) => s[..k].iter().sum(),
            NormSpec::Schatten(p) if p == f64::INFINITY => s.first().copied().unwrap_or(0.0),
            NormSpec::Schatten(p) => {
                let top = s.first().copied().unwrap_or(0.0);
                if top == 0.0 {
                    0.0
                } else {
                    top * powf(s.iter().map(|x| powf(x / top, p)).sum::<f64>(), 1.0 / p)
                }
            }
        })
    }
}

pub fn ui_norm<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, spec: NormSpec) -> Result<f64> {
    SingularSpectrum::of(m).norm(spec)
}

fn identity_gap(phi: &PhiMatrix) -> SingularSpectrum {
    let n = phi.order();
    SingularSpectrum::of(&(RMatrix::identity(n, n) - phi.matrix()))
}

/// `||I - Phi||`.
pub fn distance_from_identity(phi: &PhiMatrix, spec: NormSpec) -> Result<f64> {
    identity_gap(phi).norm(spec)
}

/// `||I - Phi|| - ||I - Phi_SIC||` for the process's `Phi`.
pub fn theorem1_margin(proc: &ReferenceProcess, spec: NormSpec) -> Result<f64> {
    Ok(theorem1_margins(proc, &[spec])?[0])
}

/// [`theorem1_margin`] for several specs with one SVD per matrix.
pub fn theorem1_margins(proc: &ReferenceProcess, specs: &[NormSpec]) -> Result<Vec<f64>> {
    theorem1_margins_for(&phi(proc)?, specs)
}

/// [`theorem1_margins`] on an already inverted `Phi`.
pub fn theorem1_margins_for(phi: &PhiMatrix, specs: &[NormSpec]) -> Result<Vec<f64>> {
    let gap = identity_gap(phi);
    let sic_gap = identity_gap(&phi_sic(phi.dim()));
    specs
        .iter()
        .map(|&s| Ok(gap.norm(s)? - sic_gap.norm(s)?))
        .collect()
}
