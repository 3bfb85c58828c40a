//! Probability rules on qubit SIC processes and random processes.

use micbench_core::born::{
    born_probabilities, conditional_matrix, deviation, ltp, negativity, q_via_phi, quasi_image,
    reconstruct_state, ProbVector,
};
use micbench_core::process::{phi, proportional_process, ReferenceProcess};
use micbench_core::sampling::{
    random_density_with, random_process, random_pure_state, random_rank1_povm, rng_from_seed,
    MicKind, PostKind,
};
use micbench_core::sic::{known_fiducial, sic_from_fiducial};
use micbench_core::DensityOperator;
use nalgebra::DVector;
use num_complex::Complex64;

fn qubit_sic_process() -> ReferenceProcess {
    proportional_process(&sic_from_fiducial(&known_fiducial(2).unwrap()).unwrap().1).unwrap()
}

fn bloch_state(theta: f64, phi: f64) -> DensityOperator {
    let psi = DVector::from_vec(vec![
        Complex64::from((theta / 2.0).cos()),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ]);
    DensityOperator::pure(&psi)
}

fn max_negativity(proc: &ReferenceProcess, theta: f64, ph: f64) -> f64 {
    let p = phi(proc).unwrap();
    let pr = born_probabilities(&bloch_state(theta, ph), proc.mic().povm()).unwrap();
    negativity(&quasi_image(&pr, &p).unwrap())
}

#[test]
fn qubit_negativity_peaks_at_one_half() {
    let proc = qubit_sic_process();
    let p = phi(&proc).unwrap();
    let mut rng = rng_from_seed(31);
    let mut best = 0.0;
    for _ in 0..10_000 {
        let rho = random_pure_state(2, &mut rng);
        let pr = born_probabilities(&rho, proc.mic().povm()).unwrap();
        let n = negativity(&quasi_image(&pr, &p).unwrap());
        assert!(n <= 0.5 + 1e-12);
        if n > best {
            best = n;
        }
    }
    assert!((best - 0.5).abs() < 1e-3);

    // deterministic coordinate refinement over the Bloch sphere
    let (mut theta, mut ph) = (0.0, 0.0);
    let mut best = 0.0;
    for i in 0..=64 {
        for j in 0..128 {
            let (t, f) = (
                std::f64::consts::PI * i as f64 / 64.0,
                std::f64::consts::TAU * j as f64 / 128.0,
            );
            let n = max_negativity(&proc, t, f);
            if n > best {
                (best, theta, ph) = (n, t, f);
            }
        }
    }
    let mut step = 0.05;
    while step > 1e-9 {
        let mut moved = false;
        for (dt, df) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let n = max_negativity(&proc, theta + dt, ph + df);
            if n > best {
                (best, theta, ph, moved) = (n, theta + dt, ph + df, true);
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    assert!((best - 0.5).abs() < 1e-6, "{best}");
}

#[test]
fn classical_rule_differs_from_quantum_rule() {
    let proc = qubit_sic_process();
    let p = phi(&proc).unwrap();
    let rho = DensityOperator::new(&proc.post_states()[0].operator().clone() * 1.0).unwrap();
    let pr = born_probabilities(&rho, proc.mic().povm()).unwrap();
    let cond = conditional_matrix(proc.mic().povm(), &proc).unwrap();
    let q = q_via_phi(&pr, &cond, &p).unwrap();
    let classical = ltp(&pr, &cond).unwrap();
    let dev = deviation(&q, &classical).unwrap();
    let expect_q = [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
    let expect_ltp = [1.0 / 3.0, 2.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0];
    for k in 0..4 {
        assert!((q[k] - expect_q[k]).abs() < 1e-12);
        assert!((classical[k] - expect_ltp[k]).abs() < 1e-12);
    }
    assert!((dev.max_gap - 1.0 / 6.0).abs() < 1e-12);
    assert!(dev.max_gap > 0.05);
}

#[test]
fn quasistochastic_rule_reproduces_born_rule() {
    let mut rng = rng_from_seed(8);
    for (k, kind) in [MicKind::RandomRank1, MicKind::ConjugatedBasis]
        .into_iter()
        .enumerate()
    {
        for d in 2..=4 {
            for s in 0..30 {
                let proc =
                    random_process(d, kind, PostKind::RandomMixed, 1000 * k as u64 + s).unwrap();
                let p = phi(&proc).unwrap();
                let rho = random_density_with(d, 1 + s as usize % d, &mut rng).unwrap();
                let povm = random_rank1_povm(d, d + 1, &mut rng).unwrap();
                let direct = born_probabilities(&rho, &povm).unwrap();
                let pr = born_probabilities(&rho, proc.mic().povm()).unwrap();
                let via = q_via_phi(&pr, &conditional_matrix(&povm, &proc).unwrap(), &p).unwrap();
                assert!(deviation(&direct, &via).unwrap().max_gap < 1e-9);

                let back = reconstruct_state(&pr, &proc).unwrap();
                assert!(back.is_state());
                let diff = (back.operator.matrix() - rho.operator().matrix()).camax();
                assert!(diff < 1e-9);
            }
        }
    }
}

#[test]
fn simplex_vertex_is_not_a_state() {
    let proc = qubit_sic_process();
    let r = reconstruct_state(&ProbVector::vertex(4, 0), &proc).unwrap();
    assert!(!r.is_state());
    assert!((r.operator.trace() - 1.0).abs() < 1e-12);
}
