//! Weyl-Heisenberg SICs: construction from fiducials, certification, and
//! numerical fiducial search by frame-potential descent.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix};
use crate::math::{cos, sin, sqrt};
use crate::operator::{gram_matrix, HermitianOperator, Mic};
use crate::sampling::{child_seed, random_unit_vector};
use crate::tol;

/// A unit vector whose Weyl-Heisenberg orbit is a candidate SIC.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiducial {
    amplitudes: DVector<Complex64>,
}

impl Fiducial {
    /// Requires unit norm within `1e-12`.
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = sqrt(amplitudes.iter().map(|z| z.norm_sqr()).sum());
        if amplitudes.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnitNorm { norm });
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = sqrt(amplitudes.iter().map(|z| z.norm_sqr()).sum());
        if amplitudes.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotUnitNorm { norm });
        }
        Ok(Self {
            amplitudes: amplitudes / Complex64::from(norm),
        })
    }

    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::ShapeMismatch {
                expected: re.len(),
                found: im.len(),
            });
        }
        Self::new(DVector::from_iterator(
            re.len(),
            re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)),
        ))
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }
}

/// The `d^2` rank-1 projectors of a SIC.
#[derive(Debug, Clone, PartialEq)]
pub struct SicProjectors {
    projectors: Vec<HermitianOperator>,
}

impl SicProjectors {
    pub fn projectors(&self) -> &[HermitianOperator] {
        &self.projectors
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }
}

fn root_of_unity(d: usize, k: usize) -> Complex64 {
    let angle = 2.0 * PI * (k % d) as f64 / d as f64;
    Complex64::new(cos(angle), sin(angle))
}

/// `X^p Z^q` with `X|k> = |k+1>` and `Z|k> = w^k |k>`, `w = exp(2 pi i / d)`.
pub fn wh_displacement(d: usize, p: usize, q: usize) -> CMatrix {
    let (p, q) = (p % d, q % d);
    let mut m = CMatrix::zeros(d, d);
    for k in 0..d {
        m[((k + p) % d, k)] = root_of_unity(d, q * k);
    }
    m
}

/// Weyl-Heisenberg displacements applied as cheap index shifts.
struct Displacements {
    d: usize,
    roots: Vec<Complex64>,
}

impl Displacements {
    fn new(d: usize) -> Self {
        Self {
            d,
            roots: (0..d).map(|k| root_of_unity(d, k)).collect(),
        }
    }

    /// `out = X^p Z^q psi`
    fn apply(&self, psi: &[Complex64], p: usize, q: usize, out: &mut [Complex64]) {
        let d = self.d;
        for l in 0..d {
            out[(l + p) % d] = self.roots[(q * l) % d] * psi[l];
        }
    }

    /// `out = (X^p Z^q)^dagger psi = Z^{-q} X^{-p} psi`
    fn apply_adjoint(&self, psi: &[Complex64], p: usize, q: usize, out: &mut [Complex64]) {
        let d = self.d;
        for l in 0..d {
            out[l] = self.roots[(q * l) % d].conj() * psi[(l + p) % d];
        }
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// The orbit `{X^p Z^q psi}` ordered by `p * d + q`.
pub fn wh_orbit(psi: &DVector<Complex64>) -> Vec<DVector<Complex64>> {
    let d = psi.len();
    let disp = Displacements::new(d);
    let mut out = Vec::with_capacity(d * d);
    let mut buf = vec![Complex64::from(0.0); d];
    for p in 0..d {
        for q in 0..d {
            disp.apply(psi.as_slice(), p, q, &mut buf);
            out.push(DVector::from_column_slice(&buf));
        }
    }
    out
}

/// Projectors onto the full orbit of any unit vector, paired with the
/// effects `Pi/d`. The orbit of any vector resolves the identity, so the
/// result is a POVM; it is a MIC only when the projectors span.
pub fn orbit_projectors(psi: &DVector<Complex64>) -> Vec<HermitianOperator> {
    wh_orbit(psi)
        .iter()
        .map(HermitianOperator::projector)
        .collect()
}

/// Builds the SIC of a fiducial and its MIC `H_i = Pi_i / d`.
pub fn sic_from_fiducial(psi: &Fiducial) -> Result<(SicProjectors, Mic)> {
    let d = psi.dim();
    let projectors = orbit_projectors(psi.amplitudes());
    let effects = projectors.iter().map(|p| p * (1.0 / d as f64)).collect();
    let mic = match Mic::from_effects(effects) {
        Ok(m) => m,
        Err(Error::GramRankDeficient { .. }) => {
            return Err(Error::NotAFiducial {
                residual: frame_residual(psi.amplitudes()),
            })
        }
        Err(e) => return Err(e),
    };
    let verdict = verify_sic(&mic, tol::SIC);
    if !verdict.is_sic {
        return Err(Error::NotAFiducial {
            residual: verdict.max_residual,
        });
    }
    Ok((SicProjectors { projectors }, mic))
}

/// Outcome of [`verify_sic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SicVerdict {
    pub is_sic: bool,
    pub max_residual: f64,
}

/// Checks `tr H_i H_j = (d delta_ij + 1) / (d^2 (d+1))` and rank one for every effect.
pub fn verify_sic(mic: &Mic, tol: f64) -> SicVerdict {
    let d = mic.dim() as f64;
    let g = mic.gram().matrix();
    let n = mic.len();
    let mut max_residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            let target = (d * delta + 1.0) / (d * d * (d + 1.0));
            max_residual = max_residual.max((g[(i, j)] - target).abs());
        }
    }
    for (e, h) in mic.effects().iter().zip(mic.weights()) {
        max_residual = max_residual.max((h * h - e.purity()).abs());
    }
    SicVerdict {
        is_sic: max_residual <= tol,
        max_residual,
    }
}

/// Largest deviation of `|<psi|D_pq psi>|^2` from `1/(d+1)` over nonzero displacements.
fn frame_residual(psi: &DVector<Complex64>) -> f64 {
    let d = psi.len();
    let disp = Displacements::new(d);
    let target = 1.0 / (d as f64 + 1.0);
    let mut buf = vec![Complex64::from(0.0); d];
    let mut worst: f64 = 0.0;
    for p in 0..d {
        for q in 0..d {
            if p == 0 && q == 0 {
                continue;
            }
            disp.apply(psi.as_slice(), p, q, &mut buf);
            worst = worst.max((inner(psi.as_slice(), &buf).norm_sqr() - target).abs());
        }
    }
    worst
}

// d = 4 and d = 5 entries were found with `find_fiducial` and certified by `verify_sic`.
const FIDUCIAL_D4: [(f64, f64); 4] = [
    (0.1178803156874305, -0.3831235623147493),
    (-0.47514052817140784, -0.10078607744343202),
    (0.3155132523085227, 0.6807192905598941),
    (-0.04174696017545464, 0.19680965080171275),
];
const FIDUCIAL_D5: [(f64, f64); 5] = [
    (0.26016506792574723, -0.4099825685537242),
    (-0.13085815430576203, -0.20318685911269885),
    (0.23331202773577459, 0.34453720370104995),
    (0.010889296905136006, 0.19963960559273564),
    (0.5778909180625539, -0.3984304525774573),
];

/// Registered fiducials for `d = 1..=5`.
pub fn known_fiducial(d: usize) -> Result<Fiducial> {
    let amps: Vec<Complex64> = match d {
        1 => vec![Complex64::new(1.0, 0.0)],
        2 => {
            // Bloch vector (1,1,1)/sqrt(3)
            let theta = libm::acos(1.0 / sqrt(3.0));
            let phi = PI / 4.0;
            vec![
                Complex64::new(cos(theta / 2.0), 0.0),
                Complex64::new(cos(phi), sin(phi)) * sin(theta / 2.0),
            ]
        }
        3 => {
            let s = 1.0 / sqrt(2.0);
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
            ]
        }
        4 => FIDUCIAL_D4
            .iter()
            .map(|&(a, b)| Complex64::new(a, b))
            .collect(),
        5 => FIDUCIAL_D5
            .iter()
            .map(|&(a, b)| Complex64::new(a, b))
            .collect(),
        _ => return Err(Error::UnknownDimension(d)),
    };
    Fiducial::normalized(DVector::from_vec(amps))
}

/// Budget for [`find_fiducial`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchOptions {
    pub max_restarts: usize,
    pub max_iters: usize,
    /// Acceptance scale: descent stops once `f < tol_sic^2 d^4`.
    pub tol_sic: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_restarts: 200,
            max_iters: 20_000,
            tol_sic: 1e-8,
        }
    }
}

const POLISH_ITERS: usize = 50;

/// `f(psi) = sum_{(p,q) != (0,0)} (|<psi|D_pq psi>|^2 - 1/(d+1))^2`, for unit `psi`.
pub fn frame_potential(psi: &DVector<Complex64>) -> f64 {
    FramePotential::new(psi.len()).value(psi.as_slice())
}

struct FramePotential {
    d: usize,
    disp: Displacements,
    target: f64,
}

impl FramePotential {
    fn new(d: usize) -> Self {
        Self {
            d,
            disp: Displacements::new(d),
            target: 1.0 / (d as f64 + 1.0),
        }
    }

    fn value(&self, psi: &[Complex64]) -> f64 {
        let d = self.d;
        let mut buf = vec![Complex64::from(0.0); d];
        let mut f = 0.0;
        for p in 0..d {
            for q in 0..d {
                if p == 0 && q == 0 {
                    continue;
                }
                self.disp.apply(psi, p, q, &mut buf);
                let r = inner(psi, &buf).norm_sqr() - self.target;
                f += r * r;
            }
        }
        f
    }

    /// Value and Riemannian gradient on the unit sphere of `C^d = R^{2d}`.
    fn value_and_gradient(&self, psi: &[Complex64], grad: &mut [Complex64]) -> f64 {
        let d = self.d;
        let mut dpsi = vec![Complex64::from(0.0); d];
        let mut dadj = vec![Complex64::from(0.0); d];
        grad.iter_mut().for_each(|g| *g = Complex64::from(0.0));
        let mut f = 0.0;
        for p in 0..d {
            for q in 0..d {
                if p == 0 && q == 0 {
                    continue;
                }
                self.disp.apply(psi, p, q, &mut dpsi);
                self.disp.apply_adjoint(psi, p, q, &mut dadj);
                let c = inner(psi, &dpsi);
                let r = c.norm_sqr() - self.target;
                f += r * r;
                let w = 4.0 * r;
                for k in 0..d {
                    grad[k] += (c.conj() * dpsi[k] + c * dadj[k]) * w;
                }
            }
        }
        let radial = inner(psi, grad).re;
        for k in 0..d {
            grad[k] -= psi[k] * radial;
        }
        f
    }

    /// Residuals `|<psi|D_pq psi>|^2 - 1/(d+1)` and their tangent-space
    /// Jacobian over the real coordinates `(Re psi, Im psi)`.
    fn residuals_and_jacobian(&self, psi: &[Complex64]) -> (RMatrix, RMatrix) {
        let d = self.d;
        let m = d * d - 1;
        let mut r = RMatrix::zeros(m, 1);
        let mut jac = RMatrix::zeros(m, 2 * d);
        let mut dpsi = vec![Complex64::from(0.0); d];
        let mut dadj = vec![Complex64::from(0.0); d];
        let mut row = vec![Complex64::from(0.0); d];
        let mut i = 0;
        for p in 0..d {
            for q in 0..d {
                if p == 0 && q == 0 {
                    continue;
                }
                self.disp.apply(psi, p, q, &mut dpsi);
                self.disp.apply_adjoint(psi, p, q, &mut dadj);
                let c = inner(psi, &dpsi);
                r[(i, 0)] = c.norm_sqr() - self.target;
                for k in 0..d {
                    row[k] = (c.conj() * dpsi[k] + c * dadj[k]) * 2.0;
                }
                let radial = inner(psi, &row).re;
                for k in 0..d {
                    let g = row[k] - psi[k] * radial;
                    jac[(i, k)] = g.re;
                    jac[(i, d + k)] = g.im;
                }
                i += 1;
            }
        }
        (r, jac)
    }
}

fn normalize(v: &mut [Complex64]) {
    let n = sqrt(v.iter().map(|z| z.norm_sqr()).sum());
    v.iter_mut().for_each(|z| *z /= n);
}

enum Descent {
    Converged,
    Stalled(f64),
}

/// Projected gradient descent with Barzilai-Borwein trial steps and Armijo backtracking.
fn descend(
    fp: &FramePotential,
    psi: &mut Vec<Complex64>,
    max_iters: usize,
    threshold: f64,
) -> Descent {
    let d = fp.d;
    let mut grad = vec![Complex64::from(0.0); d];
    let mut f = fp.value_and_gradient(psi, &mut grad);
    let mut step = 1.0;
    let mut trial = vec![Complex64::from(0.0); d];
    let mut trial_grad = vec![Complex64::from(0.0); d];
    for _ in 0..max_iters {
        if f < threshold {
            return Descent::Converged;
        }
        let gnorm2: f64 = grad.iter().map(|z| z.norm_sqr()).sum();
        if gnorm2 < 1e-30 {
            return Descent::Stalled(f);
        }
        let mut t = step;
        let mut accepted = None;
        for _ in 0..60 {
            for k in 0..d {
                trial[k] = psi[k] - grad[k] * t;
            }
            normalize(&mut trial);
            let ft = fp.value_and_gradient(&trial, &mut trial_grad);
            if ft <= f - 1e-4 * t * gnorm2 {
                accepted = Some(ft);
                break;
            }
            t *= 0.5;
        }
        let Some(ft) = accepted else {
            return Descent::Stalled(f);
        };
        // BB1 step from the accepted move
        let (mut ss, mut sy) = (0.0, 0.0);
        for k in 0..d {
            let s = trial[k] - psi[k];
            let y = trial_grad[k] - grad[k];
            ss += s.norm_sqr();
            sy += (s.conj() * y).re;
        }
        step = if sy > 0.0 {
            (ss / sy).clamp(1e-6, 1e3)
        } else {
            (2.0 * t).min(1e3)
        };
        core::mem::swap(psi, &mut trial);
        core::mem::swap(&mut grad, &mut trial_grad);
        f = ft;
    }
    if f < threshold {
        Descent::Converged
    } else {
        Descent::Stalled(f)
    }
}

/// Levenberg-Marquardt on the residual vector. Near degenerate minima, where
/// gradient descent is sublinear, this keeps a linear rate.
fn polish(fp: &FramePotential, psi: &mut [Complex64], iters: usize) -> f64 {
    let d = fp.d;
    let (mut r, mut jac) = fp.residuals_and_jacobian(psi);
    let mut f = r.norm_squared();
    let mut mu = 1e-3;
    let mut trial = vec![Complex64::from(0.0); d];
    for _ in 0..iters {
        if f == 0.0 {
            break;
        }
        let jt = jac.transpose();
        let normal = &jt * &jac;
        let rhs = -(&jt * &r);
        let scale = normal.diagonal().max().max(f64::MIN_POSITIVE);
        let mut improved = false;
        for _ in 0..30 {
            let mut damped = normal.clone();
            for k in 0..2 * d {
                damped[(k, k)] += mu * scale;
            }
            let Some(step) = damped.cholesky().map(|c| c.solve(&rhs)) else {
                mu *= 10.0;
                continue;
            };
            for k in 0..d {
                trial[k] = psi[k] + Complex64::new(step[(k, 0)], step[(d + k, 0)]);
            }
            normalize(&mut trial);
            let (rt, jt_new) = fp.residuals_and_jacobian(&trial);
            let ft = rt.norm_squared();
            if ft < f {
                psi.copy_from_slice(&trial);
                r = rt;
                jac = jt_new;
                f = ft;
                mu = (mu / 3.0).max(1e-15);
                improved = true;
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    f
}

/// Runs the descent from `start`. A start already below the acceptance
/// threshold is returned unchanged; otherwise a converged iterate is polished
/// with a few Levenberg-Marquardt iterations.
pub fn refine_fiducial(start: &Fiducial, opts: &SearchOptions) -> Result<(Fiducial, f64)> {
    let d = start.dim();
    let fp = FramePotential::new(d);
    let threshold = opts.tol_sic * opts.tol_sic * (d * d * d * d) as f64;
    let f0 = fp.value(start.amplitudes().as_slice());
    if f0 < threshold {
        return Ok((start.clone(), f0));
    }
    let mut psi: Vec<Complex64> = start.amplitudes().iter().copied().collect();
    match descend(&fp, &mut psi, opts.max_iters, threshold) {
        Descent::Converged => {
            let f = polish(&fp, &mut psi, POLISH_ITERS);
            Ok((Fiducial::normalized(DVector::from_vec(psi))?, f))
        }
        Descent::Stalled(f) => Err(Error::SearchFailed {
            restarts: 1,
            best_objective: f,
        }),
    }
}

/// Searches for a fiducial from Haar-random starts, restart `k` seeded by
/// `child_seed(seed, k)`. The first restart whose result certifies under
/// [`verify_sic`] at `1e-9` is returned.
pub fn find_fiducial(d: usize, seed: u64, opts: &SearchOptions) -> Result<Fiducial> {
    if d == 0 {
        return Err(Error::UnknownDimension(0));
    }
    if d == 1 {
        return known_fiducial(1);
    }
    let mut best = f64::INFINITY;
    for k in 0..opts.max_restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(child_seed(seed, k as u64));
        let start = Fiducial::new(random_unit_vector(d, &mut rng))?;
        match refine_fiducial(&start, opts) {
            Ok((psi, f)) => {
                best = best.min(f);
                if sic_from_fiducial(&psi).is_ok() {
                    return Ok(psi);
                }
            }
            Err(Error::SearchFailed { best_objective, .. }) => best = best.min(best_objective),
            Err(e) => return Err(e),
        }
    }
    Err(Error::SearchFailed {
        restarts: opts.max_restarts,
        best_objective: best,
    })
}

/// `|| sum_k Pi_k (x) Pi_k - (2d/(d+1)) P_sym ||_F`, where `P_sym` projects
/// onto the symmetric subspace of two copies.
pub fn two_design_residual(projectors: &[HermitianOperator]) -> f64 {
    let d = projectors[0].dim();
    let n = d * d;
    let mut lhs = CMatrix::zeros(n, n);
    for p in projectors {
        lhs += linalg::kron(p.matrix(), p.matrix());
    }
    let scale = 2.0 * d as f64 / (d as f64 + 1.0);
    for i in 0..d {
        for j in 0..d {
            // P_sym = (I + SWAP) / 2
            lhs[(i * d + j, i * d + j)] -= Complex64::from(0.5 * scale);
            lhs[(j * d + i, i * d + j)] -= Complex64::from(0.5 * scale);
        }
    }
    sqrt(lhs.iter().map(|z| z.norm_sqr()).sum())
}

/// Gram matrix of the SIC projectors, `tr Pi_i Pi_j`.
pub fn projector_gram(sic: &SicProjectors) -> crate::operator::GramMatrix {
    gram_matrix(sic.projectors()).expect("SIC projectors share a dimension")
}
