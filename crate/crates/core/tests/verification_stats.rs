use privsense::linalg::fidelity_pure;
use privsense::states::{apply_noise, experimental_like, ghz, plus_state, NoiseKind, NoiseModel, EXPERIMENTAL_BIT_FLIP, EXPERIMENTAL_FIDELITY};
use privsense::verification::{
    acceptance_threshold, exact_failure_probability, exact_failure_rate, failure_rate_histogram, failure_vs_fidelity_sweep, fidelity_lower_bound, run_verification,
    stabilizer_set, unit_grid, VerificationParams,
};

#[test]
fn ghz_is_a_common_eigenstate() {
    for n in 2..=6 {
        let g = ghz(n).unwrap().to_density();
        for k in stabilizer_set(n).unwrap() {
            let m = k.matrix().unwrap();
            // K² = I, and the GHZ state never fails
            assert!(m.matmul(&m).unwrap().max_abs_diff(&privsense::linalg::ComplexMatrix::identity(1 << n)).unwrap() < 1e-12);
            assert!(exact_failure_probability(&g, &k).unwrap() < 1e-12);
        }
    }
}

#[test]
fn sampled_failure_rate_matches_exact() {
    let g = ghz(3).unwrap().to_density();
    let states = [
        ("mixture 0.9", apply_noise(&g, &NoiseModel::paper_mixture(0.9).unwrap()).unwrap()),
        ("depolarizing 0.2", apply_noise(&g, &NoiseModel::new(NoiseKind::Depolarizing, 0.2).unwrap()).unwrap()),
        ("dephasing 0.1", apply_noise(&g, &NoiseModel::new(NoiseKind::Dephasing, 0.1).unwrap()).unwrap()),
        ("experimental", experimental_like(3, EXPERIMENTAL_FIDELITY, EXPERIMENTAL_BIT_FLIP).unwrap()),
        ("plus", plus_state(3).unwrap().to_density()),
    ];
    for (name, rho) in &states {
        let exact = exact_failure_rate(rho).unwrap();
        for seed in 0..3 {
            let params = VerificationParams::new(3, 1.0, 0.0, seed).with_shots(2500);
            let r = run_verification(rho, &params).unwrap();
            assert_eq!(r.tested_copies, 10_000);
            let sigma = (exact * (1.0 - exact) / 1e4).sqrt().max(1e-4);
            assert!((r.f - exact).abs() <= 5.0 * sigma, "{name} seed {seed}: {} vs {exact}", r.f);
            for (k, t) in stabilizer_set(3).unwrap().iter().zip(&r.per_stabilizer) {
                let pk = exact_failure_probability(rho, k).unwrap();
                let fk = 1.0 - t.passed as f64 / t.tested as f64;
                let sk = (pk * (1.0 - pk) / t.tested as f64).sqrt().max(1e-3);
                assert!((fk - pk).abs() <= 5.0 * sk, "{name} {}: {fk} vs {pk}", t.stabilizer);
            }
        }
    }
}

#[test]
fn default_allocation_tests_half_the_copies() {
    let rho = ghz(3).unwrap().to_density();
    let r = run_verification(&rho, &VerificationParams::new(3, 1.0, 0.0, 4)).unwrap();
    assert_eq!(r.total_copies, 534);
    assert_eq!(r.tested_copies, 267);
    let counts: Vec<u64> = r.per_stabilizer.iter().map(|t| t.tested).collect();
    assert_eq!(counts, vec![67, 67, 67, 66]);
    assert!(r.target_copy_index < 534);
    assert_eq!(r.f, 0.0);
    assert!(r.accepted);
}

#[test]
fn histogram_tracks_binomial_statistics() {
    let rho = apply_noise(&ghz(3).unwrap().to_density(), &NoiseModel::paper_mixture(0.906).unwrap()).unwrap();
    let p = exact_failure_rate(&rho).unwrap();
    assert!((p - 0.047).abs() < 1e-12);
    let h = failure_rate_histogram(&rho, 3204, 400, 11, 20).unwrap();
    let sigma = (p * (1.0 - p) / 3204.0).sqrt();
    assert!((h.mean - p).abs() < 5.0 * sigma / 20.0, "{}", h.mean);
    assert!((h.std_dev / sigma - 1.0).abs() < 0.2, "{} vs {sigma}", h.std_dev);
    assert_eq!(h.bins.iter().map(|b| b.count).sum::<u64>(), 400);
    assert_eq!(h.threshold, acceptance_threshold(3));
    assert_eq!(h.within_threshold, h.values.iter().filter(|&&v| v <= 1.0 / 18.0).count());
}

#[test]
fn histogram_is_deterministic() {
    let rho = experimental_like(3, EXPERIMENTAL_FIDELITY, EXPERIMENTAL_BIT_FLIP).unwrap();
    let a = failure_rate_histogram(&rho, 500, 50, 3, 10).unwrap();
    let b = failure_rate_histogram(&rho, 500, 50, 3, 10).unwrap();
    assert_eq!(a, b);
    let c = failure_rate_histogram(&rho, 500, 50, 4, 10).unwrap();
    assert_ne!(a.values, c.values);
}

#[test]
fn mixture_sweep_closed_form() {
    let rows = failure_vs_fidelity_sweep(3, NoiseKind::PaperMixture, &unit_grid(21)).unwrap();
    for r in &rows {
        let p = 1.0 - r.strength;
        assert!((r.f_exact - (1.0 - p) / 2.0).abs() < 1e-12);
        assert!((r.fidelity - (1.0 + p) / 2.0).abs() < 1e-12);
        assert!(r.fidelity_lower_bound <= r.fidelity + 1e-12);
    }
}

#[test]
fn bound_is_sound_on_every_sweep() {
    for kind in [NoiseKind::PaperMixture, NoiseKind::Depolarizing, NoiseKind::Dephasing] {
        for n in 2..=4 {
            for r in failure_vs_fidelity_sweep(n, kind, &unit_grid(26)).unwrap() {
                assert!(r.fidelity_lower_bound <= r.fidelity + 1e-12, "{kind:?} n {n} s {}", r.strength);
            }
        }
    }
}

#[test]
fn bound_gap_near_threshold() {
    let f = 0.0525;
    let lb = fidelity_lower_bound(f, 3, 0.0);
    assert!((lb - 0.685).abs() < 1e-12);

    // global depolarizing has f = q/2
    let q = 2.0 * f;
    let g = ghz(3).unwrap();
    let rho = apply_noise(&g.to_density(), &NoiseModel::new(NoiseKind::Depolarizing, q).unwrap()).unwrap();
    assert!((exact_failure_rate(&rho).unwrap() - f).abs() < 1e-12);
    let gap = fidelity_pure(&rho, &g).unwrap() - lb;
    assert!((gap - 0.22).abs() < 0.01, "{gap}");

    let rho = apply_noise(&g.to_density(), &NoiseModel::paper_mixture(1.0 - 2.0 * f).unwrap()).unwrap();
    let gap = fidelity_pure(&rho, &g).unwrap() - lb;
    assert!((gap - 0.2625).abs() < 1e-9, "{gap}");
}
