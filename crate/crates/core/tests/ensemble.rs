//! Corpus generators and ensemble runs.

use micbench_core::geometry::lemma1_relative_margin;
use micbench_core::norms::{theorem1_margin, NormSpec};
use micbench_core::operator::{DensityOperator, HermitianOperator};
use micbench_core::process::ReferenceProcess;
use micbench_core::sampling::{
    evaluate_sample, random_density, random_mic, run_ensemble, Check, EnsembleConfig, MicKind,
    PostKind,
};
use micbench_core::sic::{known_fiducial, sic_from_fiducial};
use rayon::prelude::*;

#[test]
fn full_rank_density_mean_is_maximally_mixed() {
    let d = 3;
    let n = 4000;
    let samples: Vec<_> = (0..n).map(|s| random_density(d, d, s).unwrap()).collect();
    for i in 0..d {
        for j in 0..d {
            let entries: Vec<f64> = samples
                .iter()
                .flat_map(|r| {
                    let z = r.operator().matrix()[(i, j)];
                    [z.re, z.im]
                })
                .collect();
            let (re, im): (Vec<f64>, Vec<f64>) = entries.chunks(2).map(|c| (c[0], c[1])).unzip();
            for (part, target) in [(re, if i == j { 1.0 / d as f64 } else { 0.0 }), (im, 0.0)] {
                let mean = part.iter().sum::<f64>() / n as f64;
                let var = part.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                let sigma = (var / n as f64).sqrt();
                assert!(
                    (mean - target).abs() <= 3.0 * sigma + 1e-15,
                    "({i},{j}) mean {mean}"
                );
            }
        }
    }
}

#[test]
fn density_is_bitwise_deterministic() {
    let a = random_density(4, 2, 99).unwrap();
    let b = random_density(4, 2, 99).unwrap();
    assert_eq!(a.operator().re_parts(), b.operator().re_parts());
    assert_eq!(a.operator().im_parts(), b.operator().im_parts());
}

#[test]
fn random_rank1_mics_satisfy_determinant_bound() {
    let violations = (0..1000u64)
        .into_par_iter()
        .filter(|&s| {
            lemma1_relative_margin(&random_mic(2, MicKind::RandomRank1, s).unwrap()).unwrap()
                < -1e-8
        })
        .count();
    assert_eq!(violations, 0);
}

fn min_theorem1(report: &micbench_core::sampling::EnsembleReport) -> f64 {
    report
        .summaries
        .iter()
        .filter(|s| s.check.starts_with("theorem1"))
        .filter_map(|s| s.min_margin)
        .fold(f64::INFINITY, f64::min)
}

fn theorem1_config(mic_kind: MicKind, n: u64) -> EnsembleConfig {
    let mut c = EnsembleConfig::new(2, n, 17);
    c.mic_kind = mic_kind;
    c.checks = vec![Check::Theorem1(Vec::new())];
    c
}

#[test]
fn perturbed_sic_margin_shrinks_with_weight() {
    let margins: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&eps| {
            let report = run_ensemble(&theorem1_config(MicKind::PerturbedSic(eps), 200))
                .unwrap()
                .0;
            let mean: f64 = report.summaries.iter().filter_map(|s| s.mean_margin).sum();
            mean
        })
        .collect();
    assert!(
        margins[0] > margins[1] && margins[1] > margins[2],
        "{margins:?}"
    );
}

#[test]
fn near_sic_corpus_sits_near_equality() {
    let near = run_ensemble(&theorem1_config(MicKind::PerturbedSic(0.01), 300))
        .unwrap()
        .0;
    let random = run_ensemble(&theorem1_config(MicKind::RandomRank1, 300))
        .unwrap()
        .0;
    let (a, b) = (min_theorem1(&near), min_theorem1(&random));
    assert!(a >= 0.0 && a < b, "near {a} random {b}");
}

#[test]
fn all_checks_have_no_violations() {
    let config = EnsembleConfig::new(2, 1000, 2024);
    let outcomes: Vec<_> = (0..config.n_samples)
        .into_par_iter()
        .map(|i| evaluate_sample(&config, i))
        .collect();
    let report = micbench_core::sampling::aggregate(&config, &outcomes);
    assert_eq!(report.total_violations, 0);
    assert_eq!(report.total_errors, 0);
}

#[test]
fn single_sample_reports_are_reproducible() {
    let mut config = EnsembleConfig::new(3, 1, 5);
    config.post_kind = PostKind::RandomMixed;
    let a = run_ensemble(&config).unwrap();
    let b = run_ensemble(&config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.1[0], evaluate_sample(&config, 0));
}

#[test]
fn depolarized_sic_post_states_leave_equality() {
    let (sic, mic) = sic_from_fiducial(&known_fiducial(2).unwrap()).unwrap();
    let mixed: Vec<_> = sic
        .projectors()
        .iter()
        .map(|p| {
            DensityOperator::new(&(p * 0.99) + &(&HermitianOperator::identity(2) * 0.005)).unwrap()
        })
        .collect();
    let proc = ReferenceProcess::new(mic, mixed).unwrap();
    for spec in NormSpec::standard_suite(4) {
        assert!(theorem1_margin(&proc, spec).unwrap() > 0.0, "{spec}");
    }
}
