//! Seeded generators for states, MICs, POVMs and reference processes, and
//! the per-sample evaluation used by ensemble runs.
//!
//! Every generator is a pure function of its seed. Ensemble sample `i` draws
//! from `child_seed(master_seed, i)`, so samples can be evaluated in any order
//! or in parallel without changing results.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::born::{born_probabilities, conditional_matrix, negativity, q_via_phi, quasi_image};
use crate::error::{Error, Result};
use crate::geometry::{gram_det_margin, lemma1_relative_margin, reciprocal_bound_margin};
use crate::linalg::{self, CMatrix};
use crate::majorization::{lemma2_verdict, zhu_check, Relation};
use crate::math::sqrt;
use crate::norms::{theorem1_margins_for, NormSpec};
use crate::operator::{DensityOperator, HermitianOperator, Mic, Povm};
use crate::process::{phi_with_cond_max, proportional_process, ReferenceProcess};
use crate::sic::{known_fiducial, sic_from_fiducial};
use crate::tol;

const MAX_ATTEMPTS: usize = 32;

/// SplitMix64 finalizer applied to `(master, index)`.
pub fn child_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// `rows x cols` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<Complex64> {
    let v = DVector::from_fn(d, |_, _| complex_gaussian(rng));
    let norm = sqrt(v.iter().map(|z| z.norm_sqr()).sum());
    v / Complex64::from(norm)
}

pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityOperator {
    DensityOperator::pure(&random_unit_vector(d, rng))
}

/// `G G^dagger / tr(G G^dagger)` for a `d x rank` Ginibre factor `G`.
pub fn random_density_with<R: Rng + ?Sized>(
    d: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityOperator> {
    if rank == 0 || rank > d {
        return Err(Error::InvalidRank { rank, d });
    }
    let g = ginibre(d, rank, rng);
    let w = &g * g.adjoint();
    let tr: f64 = w.diagonal().iter().map(|z| z.re).sum();
    DensityOperator::new(HermitianOperator::new(w / Complex64::from(tr))?)
}

pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    random_density_with(d, rank, &mut rng_from_seed(seed))
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix with
/// the phases of `R`'s diagonal divided out.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let (q, r) = ginibre(d, d, rng).qr().unpack();
    let mut u = q;
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::from(1.0)
        };
        for i in 0..d {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Replaces `ops` by `S^{-1/2} P S^{-1/2}` with `S = sum(ops)`, which
/// resolves the identity exactly.
fn resolve_identity(ops: &[HermitianOperator]) -> Option<Vec<HermitianOperator>> {
    let d = ops[0].dim();
    let mut total = CMatrix::zeros(d, d);
    for p in ops {
        total += p.matrix();
    }
    let root = linalg::inverse_sqrt(&total, 1e-12)?;
    Some(ops.iter().map(|p| p.congruence(&root)).collect())
}

/// `n` random rank-1 effects rescaled to a POVM.
pub fn random_rank1_povm<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Povm> {
    for _ in 0..MAX_ATTEMPTS {
        let projectors: Vec<_> = (0..n)
            .map(|_| HermitianOperator::projector(&random_unit_vector(d, rng)))
            .collect();
        if let Some(effects) = resolve_identity(&projectors) {
            if let Ok(povm) = Povm::new(effects) {
                return Ok(povm);
            }
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
    })
}

/// Corpus generators for MICs.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MicKind {
    /// `d^2` Haar-random pure projectors rescaled to resolve the identity.
    RandomRank1,
    /// The generalized Gell-Mann basis conjugated by a random unitary, shifted
    /// to positivity and rescaled.
    ConjugatedBasis,
    /// `(1 - eps) SIC + eps RandomRank1`.
    PerturbedSic(f64),
}

/// Corpus generators for post-measurement states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PostKind {
    Proportional,
    RandomPure,
    RandomMixed,
}

/// Generalized Gell-Mann matrices plus the identity.
fn gell_mann_basis(d: usize) -> Vec<HermitianOperator> {
    let mut out = vec![HermitianOperator::identity(d)];
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(j, k)] = Complex64::from(1.0);
            sym[(k, j)] = Complex64::from(1.0);
            out.push(HermitianOperator::from_hermitian_unchecked(sym));
            let mut anti = CMatrix::zeros(d, d);
            anti[(j, k)] = Complex64::new(0.0, -1.0);
            anti[(k, j)] = Complex64::new(0.0, 1.0);
            out.push(HermitianOperator::from_hermitian_unchecked(anti));
        }
    }
    for l in 1..d {
        let lf = l as f64;
        let scale = sqrt(2.0 / (lf * (lf + 1.0)));
        let diag: Vec<f64> = (0..d)
            .map(|j| {
                if j < l {
                    scale
                } else if j == l {
                    -lf * scale
                } else {
                    0.0
                }
            })
            .collect();
        out.push(HermitianOperator::from_real_diagonal(&diag));
    }
    out
}

fn random_rank1_mic<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Mic> {
    for _ in 0..MAX_ATTEMPTS {
        let povm = random_rank1_povm(d, d * d, rng)?;
        if let Ok(mic) = Mic::new(povm) {
            return Ok(mic);
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
    })
}

fn conjugated_basis_mic<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Mic> {
    let basis = gell_mann_basis(d);
    for _ in 0..MAX_ATTEMPTS {
        let u = random_unitary(d, rng);
        let shifted: Vec<_> = basis
            .iter()
            .map(|b| {
                let c = b.conjugate(&u);
                let lo = c.eigenvalues()[0];
                if lo < 0.0 {
                    &c - &(&HermitianOperator::identity(d) * lo)
                } else {
                    c
                }
            })
            .collect();
        if let Some(effects) = resolve_identity(&shifted) {
            if let Ok(mic) = Mic::from_effects(effects) {
                return Ok(mic);
            }
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
    })
}

fn perturbed_sic_mic<R: Rng + ?Sized>(d: usize, eps: f64, rng: &mut R) -> Result<Mic> {
    let (_, sic) = sic_from_fiducial(&known_fiducial(d)?)?;
    for _ in 0..MAX_ATTEMPTS {
        let other = random_rank1_mic(d, rng)?;
        let effects: Vec<_> = sic
            .effects()
            .iter()
            .zip(other.effects())
            .map(|(a, b)| &(a * (1.0 - eps)) + &(b * eps))
            .collect();
        if let Ok(mic) = Mic::from_effects(effects) {
            return Ok(mic);
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
    })
}

pub fn random_mic_with<R: Rng + ?Sized>(d: usize, kind: MicKind, rng: &mut R) -> Result<Mic> {
    match kind {
        MicKind::RandomRank1 => random_rank1_mic(d, rng),
        MicKind::ConjugatedBasis => conjugated_basis_mic(d, rng),
        MicKind::PerturbedSic(eps) => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "perturbed_sic weight {eps} outside (0, 1)"
                )));
            }
            perturbed_sic_mic(d, eps, rng)
        }
    }
}

/// Seeded MIC from one of the corpus generators; every output passes `check_mic`.
pub fn random_mic(d: usize, kind: MicKind, seed: u64) -> Result<Mic> {
    random_mic_with(d, kind, &mut rng_from_seed(seed))
}

pub fn random_process_with<R: Rng + ?Sized>(
    mic: Mic,
    kind: PostKind,
    rng: &mut R,
) -> Result<ReferenceProcess> {
    let d = mic.dim();
    if kind == PostKind::Proportional {
        return proportional_process(&mic);
    }
    for _ in 0..MAX_ATTEMPTS {
        let states = (0..d * d)
            .map(|_| match kind {
                PostKind::RandomPure => Ok(random_pure_state(d, rng)),
                _ => random_density_with(d, d, rng),
            })
            .collect::<Result<Vec<_>>>()?;
        match ReferenceProcess::new(mic.clone(), states) {
            Ok(p) => return Ok(p),
            Err(Error::DependentPostStates { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
    })
}

/// MIC and post-measurement states drawn from one seed.
pub fn random_process(
    d: usize,
    mic_kind: MicKind,
    post_kind: PostKind,
    seed: u64,
) -> Result<ReferenceProcess> {
    let mut rng = rng_from_seed(seed);
    let mic = random_mic_with(d, mic_kind, &mut rng)?;
    random_process_with(mic, post_kind, &mut rng)
}

/// A verification suite run on each ensemble sample.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Check {
    /// Determinant bound for the proportional process, with the reciprocal
    /// eigenvalue bound and the Gram determinant bound.
    Lemma1,
    /// Weak log majorization of singular values.
    Lemma2,
    /// Distance-to-identity margins; an empty list means the standard suite.
    Theorem1(Vec<NormSpec>),
    /// Gram spectrum of a random normalized rank-1 basis against the SIC spectrum.
    Zhu,
    /// Quasistochastic Born Rule against the operator Born Rule.
    BornEquiv,
    /// Largest negativity of the quasi-image over random pure states.
    Negativity,
}

impl Check {
    pub fn all() -> Vec<Check> {
        vec![
            Check::Lemma1,
            Check::Lemma2,
            Check::Theorem1(Vec::new()),
            Check::Zhu,
            Check::BornEquiv,
            Check::Negativity,
        ]
    }
}

#[cfg(feature = "serde")]
mod defaults {
    pub fn mic_kind() -> super::MicKind {
        super::MicKind::RandomRank1
    }
    pub fn post_kind() -> super::PostKind {
        super::PostKind::Proportional
    }
    pub fn checks() -> alloc::vec::Vec<super::Check> {
        super::Check::all()
    }
    pub fn cond_max() -> f64 {
        super::tol::COND_MAX
    }
}

/// Definition of an ensemble corpus and the checks run on it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct EnsembleConfig {
    pub d: usize,
    pub n_samples: u64,
    pub master_seed: u64,
    #[cfg_attr(feature = "serde", serde(default = "defaults::mic_kind"))]
    pub mic_kind: MicKind,
    #[cfg_attr(feature = "serde", serde(default = "defaults::post_kind"))]
    pub post_kind: PostKind,
    #[cfg_attr(feature = "serde", serde(default = "defaults::checks"))]
    pub checks: Vec<Check>,
    #[cfg_attr(feature = "serde", serde(default = "defaults::cond_max"))]
    pub cond_max: f64,
}

impl EnsembleConfig {
    pub fn new(d: usize, n_samples: u64, master_seed: u64) -> Self {
        Self {
            d,
            n_samples,
            master_seed,
            mic_kind: MicKind::RandomRank1,
            post_kind: PostKind::Proportional,
            checks: Check::all(),
            cond_max: tol::COND_MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidConfig(format!(
                "dimension {} must be at least 2",
                self.d
            )));
        }
        if self.n_samples == 0 {
            return Err(Error::InvalidConfig(
                "n_samples must be at least 1".to_string(),
            ));
        }
        if let MicKind::PerturbedSic(eps) = self.mic_kind {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "perturbed_sic weight {eps} outside (0, 1)"
                )));
            }
        }
        if self.cond_max <= 1.0 || self.cond_max.is_nan() {
            return Err(Error::InvalidConfig(format!(
                "cond_max {} must exceed 1",
                self.cond_max
            )));
        }
        for c in &self.checks {
            if let Check::Theorem1(specs) = c {
                for s in specs {
                    s.validate(self.d * self.d)?;
                }
            }
        }
        Ok(())
    }

    fn theorem1_specs(&self, specs: &[NormSpec]) -> Vec<NormSpec> {
        if specs.is_empty() {
            NormSpec::standard_suite(self.d * self.d)
        } else {
            specs.to_vec()
        }
    }
}

/// One check result for one sample. `margin` is positive when the checked
/// property holds with room to spare.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckRecord {
    pub check: String,
    pub margin: Option<f64>,
    pub violation: bool,
    pub error: Option<String>,
}

impl CheckRecord {
    fn ok(check: impl Into<String>, margin: f64, violation: bool) -> Self {
        Self {
            check: check.into(),
            margin: Some(margin),
            violation,
            error: None,
        }
    }

    fn failed(check: impl Into<String>, err: &Error) -> Self {
        Self {
            check: check.into(),
            margin: None,
            violation: false,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleOutcome {
    pub index: u64,
    pub seed: u64,
    pub records: Vec<CheckRecord>,
}

/// Violation thresholds used by [`evaluate_sample`].
pub mod thresholds {
    /// Relative slack on `det Phi_p >= (d+1)^{d^2-1}`.
    pub const LEMMA1_RELATIVE: f64 = 1e-8;
    /// Slack on the reciprocal eigenvalue bound.
    pub const RECIPROCAL: f64 = 1e-8;
    /// Absolute slack on `det G <= det G_SIC`.
    pub const GRAM_DET: f64 = 1e-12;
    /// Slack on distance-to-identity margins.
    pub const THEOREM1: f64 = 1e-8;
    /// Largest accepted `|Q_phi - Q_operator|` entry.
    pub const BORN_EQUIV: f64 = 1e-9;
    /// Negativity at or below this counts as none.
    pub const NEGATIVITY_FLOOR: f64 = 1e-12;
    /// Pure states sampled per process by the negativity check.
    pub const NEGATIVITY_STATES: usize = 32;
}

fn labels_for(config: &EnsembleConfig, check: &Check) -> Vec<String> {
    match check {
        Check::Lemma1 => vec![
            "lemma1".into(),
            "lemma1_reciprocal".into(),
            "gram_det".into(),
        ],
        Check::Lemma2 => vec!["lemma2".into()],
        Check::Theorem1(specs) => config
            .theorem1_specs(specs)
            .iter()
            .map(|s| format!("theorem1[{s}]"))
            .collect(),
        Check::Zhu => vec!["zhu".into()],
        Check::BornEquiv => vec!["born_equiv".into()],
        Check::Negativity => vec!["negativity".into()],
    }
}

/// Runs every enabled check on sample `index` of the corpus.
///
/// Failures (for example an ill-conditioned `Phi`) are recorded per check
/// rather than aborting the sample.
pub fn evaluate_sample(config: &EnsembleConfig, index: u64) -> SampleOutcome {
    let seed = child_seed(config.master_seed, index);
    let mut records = Vec::new();
    let d = config.d;

    let fail_all = |records: &mut Vec<CheckRecord>, err: &Error| {
        for c in &config.checks {
            records.extend(
                labels_for(config, c)
                    .into_iter()
                    .map(|l| CheckRecord::failed(l, err)),
            );
        }
    };
    let mic = match random_mic(d, config.mic_kind, child_seed(seed, 0)) {
        Ok(m) => m,
        Err(e) => {
            fail_all(&mut records, &e);
            return SampleOutcome {
                index,
                seed,
                records,
            };
        }
    };
    let process = random_process_with(
        mic.clone(),
        config.post_kind,
        &mut rng_from_seed(child_seed(seed, 1)),
    );
    let phi = process
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|p| phi_with_cond_max(p, config.cond_max));
    let rank_one = mic.is_rank_one(1e-10)
        && matches!(
            config.post_kind,
            PostKind::Proportional | PostKind::RandomPure
        );

    for check in &config.checks {
        match check {
            Check::Lemma1 => {
                match proportional_process(&mic)
                    .and_then(|p| phi_with_cond_max(&p, config.cond_max))
                {
                    Ok(_) => match lemma1_relative_margin(&mic) {
                        Ok(m) => records.push(CheckRecord::ok(
                            "lemma1",
                            m,
                            m < -thresholds::LEMMA1_RELATIVE,
                        )),
                        Err(e) => records.push(CheckRecord::failed("lemma1", &e)),
                    },
                    Err(e) => records.push(CheckRecord::failed("lemma1", &e)),
                }
                let r = reciprocal_bound_margin(&mic);
                records.push(CheckRecord::ok(
                    "lemma1_reciprocal",
                    r,
                    r < -thresholds::RECIPROCAL,
                ));
                let g = gram_det_margin(&mic);
                records.push(CheckRecord::ok("gram_det", g, g < -thresholds::GRAM_DET));
            }
            Check::Lemma2 => match phi.as_ref().map_err(Clone::clone).and_then(lemma2_verdict) {
                Ok(v) => records.push(CheckRecord::ok(
                    "lemma2",
                    v.worst_margin,
                    v.relation == Relation::None,
                )),
                Err(e) => records.push(CheckRecord::failed("lemma2", &e)),
            },
            Check::Theorem1(specs) => {
                let specs = config.theorem1_specs(specs);
                match phi
                    .as_ref()
                    .map_err(Clone::clone)
                    .and_then(|p| theorem1_margins_for(p, &specs))
                {
                    Ok(margins) => {
                        for (s, m) in specs.iter().zip(margins) {
                            records.push(CheckRecord::ok(
                                format!("theorem1[{s}]"),
                                m,
                                m < -thresholds::THEOREM1,
                            ));
                        }
                    }
                    Err(e) => {
                        for s in &specs {
                            records.push(CheckRecord::failed(format!("theorem1[{s}]"), &e));
                        }
                    }
                }
            }
            Check::Zhu => {
                let mut rng = rng_from_seed(child_seed(seed, 3));
                let basis: Vec<_> = (0..d * d)
                    .map(|_| HermitianOperator::projector(&random_unit_vector(d, &mut rng)))
                    .collect();
                match zhu_check(&basis) {
                    Ok(v) => records.push(CheckRecord::ok(
                        "zhu",
                        v.worst_margin,
                        v.relation != Relation::Majorizes,
                    )),
                    Err(e) => records.push(CheckRecord::failed("zhu", &e)),
                }
            }
            Check::BornEquiv => {
                let result = (|| -> Result<f64> {
                    let proc = process.as_ref().map_err(Clone::clone)?;
                    let phi = phi.as_ref().map_err(Clone::clone)?;
                    let mut rng = rng_from_seed(child_seed(seed, 2));
                    let rank = rng.random_range(1..=d);
                    let rho = random_density_with(d, rank, &mut rng)?;
                    let outcomes = rng.random_range(d..=d * d + d);
                    let povm = random_rank1_povm(d, outcomes, &mut rng)?;
                    let direct = born_probabilities(&rho, &povm)?;
                    let p_ref = born_probabilities(&rho, proc.mic().povm())?;
                    let cond = conditional_matrix(&povm, proc)?;
                    let via = q_via_phi(&p_ref, &cond, phi)?;
                    Ok(direct
                        .iter()
                        .zip(via.iter())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max))
                })();
                match result {
                    Ok(gap) => records.push(CheckRecord::ok(
                        "born_equiv",
                        thresholds::BORN_EQUIV - gap,
                        gap >= thresholds::BORN_EQUIV,
                    )),
                    Err(e) => records.push(CheckRecord::failed("born_equiv", &e)),
                }
            }
            Check::Negativity => {
                let result = (|| -> Result<f64> {
                    let proc = process.as_ref().map_err(Clone::clone)?;
                    let phi = phi.as_ref().map_err(Clone::clone)?;
                    let mut rng = rng_from_seed(child_seed(seed, 4));
                    let mut worst: f64 = 0.0;
                    for _ in 0..thresholds::NEGATIVITY_STATES {
                        let rho = random_pure_state(d, &mut rng);
                        let p_ref = born_probabilities(&rho, proc.mic().povm())?;
                        worst = worst.max(negativity(&quasi_image(&p_ref, phi)?));
                    }
                    Ok(worst)
                })();
                match result {
                    Ok(n) => records.push(CheckRecord::ok(
                        "negativity",
                        n,
                        rank_one && n <= thresholds::NEGATIVITY_FLOOR,
                    )),
                    Err(e) => records.push(CheckRecord::failed("negativity", &e)),
                }
            }
        }
    }
    SampleOutcome {
        index,
        seed,
        records,
    }
}

/// Statistics of one check label over an ensemble.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckSummary {
    pub check: String,
    pub evaluated: u64,
    pub min_margin: Option<f64>,
    pub max_margin: Option<f64>,
    pub mean_margin: Option<f64>,
    pub violations: u64,
    pub errors: u64,
    /// Sample index and seed of the smallest margin.
    pub worst_index: Option<u64>,
    pub worst_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnsembleReport {
    pub config: EnsembleConfig,
    pub summaries: Vec<CheckSummary>,
    pub total_violations: u64,
    pub total_errors: u64,
}

impl EnsembleReport {
    pub fn summary(&self, check: &str) -> Option<&CheckSummary> {
        self.summaries.iter().find(|s| s.check == check)
    }
}

/// Aggregates outcomes; the result depends only on the outcomes' contents
/// and order, which callers must keep sorted by index.
pub fn aggregate(config: &EnsembleConfig, outcomes: &[SampleOutcome]) -> EnsembleReport {
    let mut summaries: Vec<(CheckSummary, f64)> = Vec::new();
    for outcome in outcomes {
        for r in &outcome.records {
            let pos = match summaries.iter().position(|(s, _)| s.check == r.check) {
                Some(p) => p,
                None => {
                    summaries.push((
                        CheckSummary {
                            check: r.check.clone(),
                            evaluated: 0,
                            min_margin: None,
                            max_margin: None,
                            mean_margin: None,
                            violations: 0,
                            errors: 0,
                            worst_index: None,
                            worst_seed: None,
                        },
                        0.0,
                    ));
                    summaries.len() - 1
                }
            };
            let (s, total) = &mut summaries[pos];
            if r.error.is_some() {
                s.errors += 1;
                continue;
            }
            let Some(m) = r.margin else { continue };
            s.evaluated += 1;
            *total += m;
            if r.violation {
                s.violations += 1;
            }
            if s.min_margin.is_none_or(|cur| m < cur) {
                s.min_margin = Some(m);
                s.worst_index = Some(outcome.index);
                s.worst_seed = Some(outcome.seed);
            }
            if s.max_margin.is_none_or(|cur| m > cur) {
                s.max_margin = Some(m);
            }
        }
    }
    let summaries: Vec<CheckSummary> = summaries
        .into_iter()
        .map(|(mut s, total)| {
            if s.evaluated > 0 {
                s.mean_margin = Some(total / s.evaluated as f64);
            }
            s
        })
        .collect();
    EnsembleReport {
        config: config.clone(),
        total_violations: summaries.iter().map(|s| s.violations).sum(),
        total_errors: summaries.iter().map(|s| s.errors).sum(),
        summaries,
    }
}

/// Sequential ensemble run.
pub fn run_ensemble(config: &EnsembleConfig) -> Result<(EnsembleReport, Vec<SampleOutcome>)> {
    config.validate()?;
    let outcomes: Vec<_> = (0..config.n_samples)
        .map(|i| evaluate_sample(config, i))
        .collect();
    Ok((aggregate(config, &outcomes), outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::check_mic;

    #[test]
    fn seeds_are_deterministic_and_distinct() {
        assert_eq!(child_seed(7, 3), child_seed(7, 3));
        assert_ne!(child_seed(7, 3), child_seed(7, 4));
        assert_ne!(child_seed(7, 3), child_seed(8, 3));
    }

    #[test]
    fn density_examples() {
        let pure = random_density(3, 1, 42).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-12);
        assert_eq!(
            random_density(3, 2, 42).unwrap(),
            random_density(3, 2, 42).unwrap()
        );
        assert!(matches!(
            random_density(2, 3, 1),
            Err(Error::InvalidRank { .. })
        ));
        assert!(matches!(
            random_density(2, 0, 1),
            Err(Error::InvalidRank { .. })
        ));
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(4, &mut rng_from_seed(9));
        assert!(linalg::max_abs_diff(&(&u * u.adjoint()), &CMatrix::identity(4, 4)) < 1e-12);
    }

    #[test]
    fn gell_mann_basis_is_orthogonal() {
        let b = gell_mann_basis(3);
        assert_eq!(b.len(), 9);
        let g = crate::operator::gram_matrix(&b).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let expect = if i != j {
                    0.0
                } else if i == 0 {
                    3.0
                } else {
                    2.0
                };
                assert!((g.matrix()[(i, j)] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn every_kind_yields_a_mic() {
        for d in 2..=4 {
            for kind in [
                MicKind::RandomRank1,
                MicKind::ConjugatedBasis,
                MicKind::PerturbedSic(0.1),
            ] {
                for seed in 0..3 {
                    let mic = random_mic(d, kind, seed).unwrap();
                    assert!(check_mic(mic.povm(), tol::RANK).is_mic);
                }
            }
        }
    }

    #[test]
    fn processes_for_every_post_kind() {
        for kind in [
            PostKind::Proportional,
            PostKind::RandomPure,
            PostKind::RandomMixed,
        ] {
            let p = random_process(3, MicKind::RandomRank1, kind, 5).unwrap();
            assert_eq!(p.post_states().len(), 9);
        }
    }

    #[test]
    fn config_validation() {
        let mut c = EnsembleConfig::new(2, 1, 0);
        assert!(c.validate().is_ok());
        c.n_samples = 0;
        assert!(c.validate().is_err());
        let mut c = EnsembleConfig::new(2, 1, 0);
        c.mic_kind = MicKind::PerturbedSic(1.5);
        assert!(c.validate().is_err());
        let mut c = EnsembleConfig::new(2, 1, 0);
        c.checks = vec![Check::Theorem1(vec![NormSpec::KyFan(5)])];
        assert!(c.validate().is_err());
    }

    #[test]
    fn small_ensemble_has_no_violations() {
        let (report, outcomes) = run_ensemble(&EnsembleConfig::new(2, 20, 1)).unwrap();
        assert_eq!(outcomes.len(), 20);
        assert_eq!(report.total_violations, 0, "{report:?}");
        assert_eq!(report.total_errors, 0);
        assert!(report.summary("theorem1[kyfan:4]").is_some());
        let again = run_ensemble(&EnsembleConfig::new(2, 20, 1)).unwrap().0;
        assert_eq!(report, again);
    }
}
