//! Fiducial search and SIC certification.

use micbench_core::operator::{HermitianOperator, Mic};
use micbench_core::sampling::{random_unit_vector, rng_from_seed};
use micbench_core::sic::{
    find_fiducial, frame_potential, known_fiducial, orbit_projectors, refine_fiducial,
    sic_from_fiducial, two_design_residual, verify_sic, Fiducial, SearchOptions,
};
use nalgebra::DVector;
use num_complex::Complex64;

#[test]
fn qubit_search_succeeds_for_many_seeds() {
    for seed in 0..20 {
        let psi = find_fiducial(2, seed, &SearchOptions::default()).unwrap();
        let (_, mic) = sic_from_fiducial(&psi).unwrap();
        assert!(verify_sic(&mic, 1e-9).is_sic);
    }
}

#[test]
fn d4_seed_zero_within_default_budget() {
    let psi = find_fiducial(4, 0, &SearchOptions::default()).unwrap();
    assert!(verify_sic(&sic_from_fiducial(&psi).unwrap().1, 1e-9).is_sic);
}

#[test]
fn search_is_deterministic() {
    let opts = SearchOptions::default();
    assert_eq!(
        find_fiducial(5, 11, &opts).unwrap(),
        find_fiducial(5, 11, &opts).unwrap()
    );
}

#[test]
fn registry_entries_are_fixed_points() {
    for d in 2..=5 {
        let psi = known_fiducial(d).unwrap();
        let (out, _) = refine_fiducial(&psi, &SearchOptions::default()).unwrap();
        assert_eq!(out, psi);
    }
}

#[test]
fn exhausted_budget_reports_failure() {
    let opts = SearchOptions {
        max_restarts: 2,
        max_iters: 1,
        tol_sic: 1e-8,
    };
    assert!(find_fiducial(5, 0, &opts).is_err());
}

#[test]
fn perturbed_sic_fails_certification() {
    let (_, mic) = sic_from_fiducial(&known_fiducial(2).unwrap()).unwrap();
    let mut effects = mic.effects().to_vec();
    let bump = &(&effects[1] - &effects[0]) * 1e-3;
    effects[0] = &effects[0] + &bump;
    effects[1] = &effects[1] - &bump;
    let perturbed = Mic::from_effects(effects).unwrap();
    assert!(!verify_sic(&perturbed, 1e-8).is_sic);
}

#[test]
fn two_design_residual_tracks_certification() {
    let mut rng = rng_from_seed(3);
    for d in 2..=4 {
        let (sic, mic) = sic_from_fiducial(&known_fiducial(d).unwrap()).unwrap();
        assert!(verify_sic(&mic, 1e-9).is_sic);
        assert!(two_design_residual(sic.projectors()) < 1e-8);
        for _ in 0..20 {
            let psi = random_unit_vector(d, &mut rng);
            let projectors = orbit_projectors(&psi);
            let certified = Fiducial::new(psi.clone())
                .ok()
                .and_then(|f| sic_from_fiducial(&f).ok())
                .is_some();
            assert!(!certified);
            assert!(two_design_residual(&projectors) > 1e-8);
        }
    }
}

#[test]
fn padded_computational_basis_is_far_from_a_design() {
    for d in 2..=3 {
        let basis: Vec<_> = (0..d * d)
            .map(|k| {
                let mut v = DVector::from_element(d, Complex64::from(0.0));
                v[k % d] = Complex64::from(1.0);
                HermitianOperator::projector(&v)
            })
            .collect();
        assert!(two_design_residual(&basis) > 0.1);
    }
}

#[test]
fn frame_potential_vanishes_on_registry() {
    for d in 2..=5 {
        assert!(frame_potential(known_fiducial(d).unwrap().amplitudes()) < 1e-24);
    }
}
