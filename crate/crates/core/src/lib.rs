//! Numerical core for minimal informationally complete measurements (MICs),
//! SICs, and the quasistochastic form of the Born Rule.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the CLI and
//! parallel ensemble execution live in the `micbench` crate.
//!
//! - [`operator`]: Hermitian operators, states, POVMs, MICs, Gram matrices.
//! - [`sic`]: Weyl-Heisenberg SICs and fiducial search.
//! - [`process`]: reference processes and `Phi`.
//! - [`born`]: operator, quasistochastic and classical probability rules.
//! - [`majorization`], [`norms`], [`geometry`]: the bounds and volumes.
//! - [`sampling`]: seeded corpora and per-sample ensemble evaluation.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod born;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod majorization;
mod math;
pub mod norms;
pub mod operator;
pub mod process;
pub mod sampling;
pub mod sic;
pub mod tol;

pub use error::{Error, Result};
pub use operator::{DensityOperator, GramMatrix, HermitianOperator, Mic, Povm};
pub use process::{PhiMatrix, ReferenceProcess};
