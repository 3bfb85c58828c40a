//! Property-based invariants.

use micbench_core::born::{born_probabilities, quasi_image, reconstruct_state};
use micbench_core::majorization::{mean_chain, weak_log_majorizes, weak_majorizes, Relation};
use micbench_core::norms::{ui_norm, NormSpec};
use micbench_core::operator::{gram_matrix, hs_inner, HermitianOperator};
use micbench_core::process::{classify_columns, phi, phi_inverse, ColumnClass};
use micbench_core::sampling::{
    random_density, random_density_with, random_mic, random_process, random_unit_vector,
    random_unitary, rng_from_seed, MicKind, PostKind,
};
use micbench_core::sic::frame_potential;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn mic_kind() -> impl Strategy<Value = MicKind> {
    prop_oneof![
        Just(MicKind::RandomRank1),
        Just(MicKind::ConjugatedBasis),
        (0.01f64..0.99).prop_map(MicKind::PerturbedSic),
    ]
}

fn post_kind() -> impl Strategy<Value = PostKind> {
    prop_oneof![
        Just(PostKind::Proportional),
        Just(PostKind::RandomPure),
        Just(PostKind::RandomMixed)
    ]
}

fn positive_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..10.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hs_inner_is_symmetric(d in 1usize..5, a in any::<u64>(), b in any::<u64>()) {
        let x = random_density(d, d, a).unwrap();
        let y = random_density(d, 1, b).unwrap();
        let xy = hs_inner(x.operator(), y.operator()).unwrap();
        let yx = hs_inner(y.operator(), x.operator()).unwrap();
        prop_assert!((xy - yx).abs() < 1e-14);
        prop_assert!(xy >= -1e-14);
    }

    #[test]
    fn gram_of_mic_is_positive_definite(d in 2usize..5, kind in mic_kind(), seed in any::<u64>()) {
        let mic = random_mic(d, kind, seed).unwrap();
        prop_assert!(mic.gram().min_eigenvalue() > 0.0);
        let total: f64 = mic.weights().iter().sum();
        prop_assert!((total - d as f64).abs() < 1e-9);
    }

    #[test]
    fn frame_potential_ignores_global_phase(d in 2usize..6, seed in any::<u64>(), theta in 0.0f64..6.3) {
        let psi = random_unit_vector(d, &mut rng_from_seed(seed));
        let rotated = &psi * Complex64::from_polar(1.0, theta);
        prop_assert!((frame_potential(&psi) - frame_potential(&rotated)).abs() < 1e-12);
    }

    #[test]
    fn weak_majorization_is_transitive(x in positive_vec(5), y in positive_vec(5), z in positive_vec(5)) {
        let xy = weak_majorizes(&x, &y, 1e-12).unwrap().holds();
        let yz = weak_majorizes(&y, &z, 1e-12).unwrap().holds();
        if xy && yz {
            prop_assert!(weak_majorizes(&x, &z, 1e-9).unwrap().holds());
        }
    }

    #[test]
    fn log_majorization_implies_weak(x in positive_vec(6), y in positive_vec(6)) {
        if weak_log_majorizes(&x, &y, 1e-12).unwrap().holds() {
            prop_assert!(weak_majorizes(&x, &y, 1e-9).unwrap().holds());
        }
    }

    #[test]
    fn sorted_vector_majorizes_its_average(x in positive_vec(7)) {
        let mean = x.iter().sum::<f64>() / 7.0;
        let v = weak_majorizes(&x, &[mean; 7], 1e-9).unwrap();
        prop_assert_eq!(v.relation, Relation::Majorizes);
    }

    #[test]
    fn mean_chain_is_ordered(x in positive_vec(8)) {
        let m = mean_chain(&x).unwrap();
        prop_assert!(m.arithmetic >= m.geometric * (1.0 - 1e-12));
        prop_assert!(m.geometric >= m.harmonic * (1.0 - 1e-12));
    }

    #[test]
    fn unitarily_invariant_norms(n in 2usize..6, seed in any::<u64>(), p in 1.0f64..6.0) {
        let mut rng = rng_from_seed(seed);
        let m = micbench_core::sampling::ginibre(n, n, &mut rng);
        let u = random_unitary(n, &mut rng);
        let v = random_unitary(n, &mut rng);
        let moved: DMatrix<Complex64> = &u * &m * &v;
        let mut specs = vec![NormSpec::Schatten(p), NormSpec::Schatten(f64::INFINITY)];
        specs.extend((1..=n).map(NormSpec::KyFan));
        for spec in specs {
            let a = ui_norm(&m, spec).unwrap();
            let b = ui_norm(&moved, spec).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
        }
        let fan: Vec<f64> = (1..=n).map(|k| ui_norm(&m, NormSpec::KyFan(k)).unwrap()).collect();
        prop_assert!(fan.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!((fan[n - 1] - ui_norm(&m, NormSpec::Schatten(1.0)).unwrap()).abs() < 1e-10 * fan[n - 1]);
    }

    #[test]
    fn phi_inverse_is_stochastic(d in 2usize..4, mk in mic_kind(), pk in post_kind(), seed in any::<u64>()) {
        let proc = random_process(d, mk, pk, seed).unwrap();
        prop_assert_eq!(classify_columns(&phi_inverse(&proc), 1e-10), ColumnClass::Stochastic);
        let p = phi(&proc).unwrap();
        let product = p.matrix() * phi_inverse(&proc);
        let n = d * d;
        prop_assert!((product - DMatrix::<f64>::identity(n, n)).abs().max() < 1e-8);
    }

    #[test]
    fn reconstruction_round_trips(d in 2usize..4, mk in mic_kind(), pk in post_kind(), seed in any::<u64>()) {
        let proc = random_process(d, mk, pk, seed).unwrap();
        let rho = random_density_with(d, 1 + (seed % d as u64) as usize, &mut rng_from_seed(seed ^ 1)).unwrap();
        let pr = born_probabilities(&rho, proc.mic().povm()).unwrap();
        let back = reconstruct_state(&pr, &proc).unwrap();
        prop_assert!((back.operator.matrix() - rho.operator().matrix()).camax() < 1e-9);
        let q = quasi_image(&pr, &phi(&proc).unwrap()).unwrap();
        prop_assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generators_are_deterministic(d in 2usize..4, mk in mic_kind(), seed in any::<u64>()) {
        prop_assert_eq!(random_mic(d, mk, seed).unwrap(), random_mic(d, mk, seed).unwrap());
        let g = gram_matrix(random_mic(d, mk, seed).unwrap().effects()).unwrap();
        prop_assert!(g.min_eigenvalue() > 0.0);
    }

    #[test]
    fn projectors_have_unit_purity(d in 1usize..6, seed in any::<u64>()) {
        let p = HermitianOperator::projector(&random_unit_vector(d, &mut rng_from_seed(seed)));
        prop_assert!((p.purity() - 1.0).abs() < 1e-12);
        prop_assert!((p.trace() - 1.0).abs() < 1e-12);
    }
}
