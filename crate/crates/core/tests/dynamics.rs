use std::sync::Arc;

use antipt_core::chain::{build_hamiltonian, ChainParams, SiteState};
use antipt_core::dynamics::{
    expansion_coefficients, fidelity, make_initial_state, propagate, run_convergence_experiment,
    run_probability_experiment, InitialProfile, IntegratorConfig, Method, ObservableSeries,
    StablePair, TargetSource,
};
use antipt_core::spectral::{numeric_spectrum, Branch, LadderLabel, DEFAULT_SOLVER_TOL};
use antipt_core::Complex64;
use proptest::prelude::*;

fn weak() -> ChainParams {
    ChainParams::new(1.0, 2e-4, 100).unwrap()
}

fn small_chain() -> ChainParams {
    ChainParams::new(1.0, 0.02, 10).unwrap()
}

fn offset_gaussian(params: &ChainParams) -> SiteState {
    make_initial_state(&InitialProfile::Gaussian { center: 2, width: 2.0 }, 0, params).unwrap()
}

fn max_diff(a: &SiteState, b: &SiteState) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn rk4_matches_eigen_expansion() {
    let p = small_chain();
    let h = build_hamiltonian(&p);
    let spec = Arc::new(numeric_spectrum(&h, p.dim(), DEFAULT_SOLVER_TOL).unwrap());
    let psi0 = offset_gaussian(&p);
    let oracle_cfg = IntegratorConfig::rk4(0.005).with_method(Method::EigenExpansion(spec));
    let oracle = propagate(&h, &psi0, (0.0, 100.0), &oracle_cfg, None).unwrap();
    let rk4 = propagate(&h, &psi0, (0.0, 100.0), &IntegratorConfig::rk4(0.005), None).unwrap();
    let err = max_diff(&oracle, &rk4);
    assert!(err < 1e-8, "max amplitude error {err:e}");
}

#[test]
fn rk4_is_fourth_order() {
    let p = small_chain();
    let h = build_hamiltonian(&p);
    let spec = Arc::new(numeric_spectrum(&h, p.dim(), DEFAULT_SOLVER_TOL).unwrap());
    let psi0 = offset_gaussian(&p);
    let cfg = IntegratorConfig::rk4(0.05).with_method(Method::EigenExpansion(spec));
    let exact = propagate(&h, &psi0, (0.0, 100.0), &cfg, None).unwrap();
    let coarse = propagate(&h, &psi0, (0.0, 100.0), &IntegratorConfig::rk4(0.05), None).unwrap();
    let fine = propagate(&h, &psi0, (0.0, 100.0), &IntegratorConfig::rk4(0.025), None).unwrap();
    let ratio = max_diff(&exact, &coarse) / max_diff(&exact, &fine);
    assert!((ratio - 16.0).abs() <= 3.0, "ratio {ratio}");
}

#[test]
fn ground_state_norm_follows_its_eigenvalue() {
    let p = weak();
    let pair = StablePair::new(&p, TargetSource::Numeric, DEFAULT_SOLVER_TOL).unwrap();
    let h = build_hamiltonian(&p);
    let t = 100.0;
    let out = propagate(&h, &pair.ground, (0.0, t), &IntegratorConfig::rk4(0.005), None).unwrap();
    let expected = (2.0 * pair.ground_energy.im * t).exp();
    assert!((out.norm_sqr() - expected).abs() < 1e-8);
    // the state itself is only rephased: exp(-i E t) |g>
    let phase = (Complex64::new(0.0, -t) * pair.ground_energy).exp();
    assert!(max_diff(&out, &pair.ground.scaled(phase)) < 1e-6);
}

#[test]
fn first_excited_mode_decays_at_twice_omega() {
    let p = weak();
    let h = build_hamiltonian(&p);
    let s = numeric_spectrum(&h, 4, DEFAULT_SOLVER_TOL).unwrap();
    let mode = s.find(1, Branch::Plus).unwrap();
    let t = 1.0 / (2.0 * p.omega());
    let out = propagate(&h, &mode.right, (0.0, t), &IntegratorConfig::for_params(&p), None).unwrap();
    let target = (-2.0f64).exp();
    assert!(((out.norm_sqr() - target) / target).abs() < 0.01, "{}", out.norm_sqr());
}

#[test]
fn expansion_of_eigenvectors_is_a_unit_vector() {
    let p = weak();
    let s = numeric_spectrum(&build_hamiltonian(&p), 8, DEFAULT_SOLVER_TOL).unwrap();
    for (k, mode) in s.modes.iter().enumerate() {
        let c = expansion_coefficients(&mode.right, &s).unwrap();
        for (j, v) in c.values.iter().enumerate() {
            if j == k {
                assert!((v - 1.0).norm() < 1e-8);
            } else {
                assert!(v.norm() < 1e-8);
            }
        }
    }
}

#[test]
fn point_and_gaussian_overlaps() {
    let p = weak();
    let s = numeric_spectrum(&build_hamiltonian(&p), 2, DEFAULT_SOLVER_TOL).unwrap();
    let plus = LadderLabel { m: 0, branch: Branch::Plus };
    let minus = LadderLabel { m: 0, branch: Branch::Minus };

    let point = make_initial_state(&InitialProfile::Point { center: 0 }, 0, &p).unwrap();
    let c = expansion_coefficients(&point, &s).unwrap();
    assert!((c.get(plus).unwrap().norm() - c.get(minus).unwrap().norm()).abs() < 1e-6);

    for width in [10.0, 15.0] {
        let g = make_initial_state(&InitialProfile::Gaussian { center: 0, width }, 0, &p).unwrap();
        let c = expansion_coefficients(&g, &s).unwrap();
        assert!(c.get(minus).unwrap().norm() / c.get(plus).unwrap().norm() < 1e-3);
    }
}

#[test]
fn reconstruction_in_complete_basis() {
    let p = small_chain();
    let s = numeric_spectrum(&build_hamiltonian(&p), p.dim(), DEFAULT_SOLVER_TOL).unwrap();
    let psi = make_initial_state(&InitialProfile::Random, 3, &p).unwrap();
    let back = expansion_coefficients(&psi, &s).unwrap().reconstruct(&s).unwrap();
    assert!(max_diff(&psi, &back) < 1e-10);
}

#[test]
fn weight_outside_stable_span_decays() {
    let p = weak();
    let h = build_hamiltonian(&p);
    let s = numeric_spectrum(&h, 2, DEFAULT_SOLVER_TOL).unwrap();
    let (g, e) = s.stable_pair().unwrap();
    let outside = |psi: &SiteState| {
        let c = expansion_coefficients(psi, &s).unwrap();
        let inside = g
            .right
            .combine(c.values[0], &e.right, c.values[1])
            .unwrap();
        psi.combine(Complex64::new(1.0, 0.0), &inside, Complex64::new(-1.0, 0.0))
            .unwrap()
            .norm_sqr()
    };
    let psi0 = make_initial_state(&InitialProfile::Gaussian { center: 5, width: 6.0 }, 0, &p).unwrap();
    let cfg = IntegratorConfig::for_params(&p);
    let mut weights = vec![outside(&psi0)];
    let mut psi = psi0;
    let times = [0.0, 50.0, 150.0, 300.0];
    for w in times.windows(2) {
        psi = propagate(&h, &psi, (w[0], w[1]), &cfg, None).unwrap();
        weights.push(outside(&psi));
    }
    assert!(weights.windows(2).all(|w| w[1] < w[0]), "{weights:?}");
    // once the transient has passed the lowest decaying rung dominates
    let rate = -(weights[3] / weights[2]).ln() / (times[3] - times[2]);
    let expected = 2.0 * p.omega() * 2.0;
    assert!((rate - expected).abs() <= 0.05 * expected, "rate {rate}");
}

#[test]
fn convergence_onto_the_ground_state() {
    let p = weak();
    let pair = StablePair::new(&p, TargetSource::Numeric, DEFAULT_SOLVER_TOL).unwrap();
    let cfg = IntegratorConfig::for_params(&p).with_sample_interval(10.0);
    let profiles = [
        InitialProfile::Gaussian { center: 0, width: 10.0 },
        InitialProfile::Point { center: 0 },
    ];
    let runs = run_convergence_experiment(&profiles, 42, &p, 600.0, &cfg, &pair).unwrap();
    let f_gauss = runs[0].series.final_fidelity("g").unwrap();
    let f_point = runs[1].series.final_fidelity("g").unwrap();
    assert!(f_gauss > 0.99, "{f_gauss}");
    assert!((f_point - 0.5).abs() <= 0.02, "{f_point}");
    for run in &runs {
        for row in &run.series.fidelities {
            assert!(row.iter().all(|f| (0.0..=1.0).contains(f)));
        }
        assert!(run.series.times.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*run.series.times.last().unwrap(), 600.0);
    }
}

#[test]
fn analytic_targets_give_the_same_picture() {
    let p = weak();
    let pair = StablePair::new(&p, TargetSource::Analytic, DEFAULT_SOLVER_TOL).unwrap();
    let cfg = IntegratorConfig::for_params(&p).with_sample_interval(50.0);
    let runs = run_convergence_experiment(
        &[InitialProfile::Tophat { center: 0, width: 10.0 }],
        0,
        &p,
        600.0,
        &cfg,
        &pair,
    )
    .unwrap();
    assert!(runs[0].series.final_fidelity("g").unwrap() > 0.99);
}

#[test]
fn probability_deviation_grows_with_ratio() {
    let mut deviations = Vec::new();
    for (ratio, m) in [(0.01, 100), (0.1, 50), (0.4, 30)] {
        let p = ChainParams::from_omega_ratio(1.0, ratio, m).unwrap();
        let pair = StablePair::new(&p, TargetSource::Numeric, DEFAULT_SOLVER_TOL).unwrap();
        let cfg = IntegratorConfig::for_params(&p).with_sample_interval(1.0);
        let series = run_probability_experiment(&p, 200.0, &cfg, &pair).unwrap();
        deviations.push(series.max_probability_deviation());
    }
    assert!(deviations[0] < deviations[1] && deviations[1] < deviations[2], "{deviations:?}");
}

#[test]
fn stable_subspace_norm_tracks_the_real_pair() {
    // span{|g>, |e>} evolves with the common growth rate Im E_0 and no other
    // drift: norm^2(t) = exp(2 Im E_0 t) up to the tiny <e|g> cross term.
    let p = weak();
    let pair = StablePair::new(&p, TargetSource::Numeric, DEFAULT_SOLVER_TOL).unwrap();
    let psi0 = pair
        .ground
        .combine(Complex64::new(0.6, 0.0), &pair.excited, Complex64::new(0.0, 0.8))
        .unwrap();
    let h = build_hamiltonian(&p);
    let cfg = IntegratorConfig::rk4(0.005).with_sample_interval(25.0);
    let mut series = ObservableSeries::new(vec![]).unwrap();
    propagate(&h, &psi0, (0.0, 400.0), &cfg, Some(&mut series)).unwrap();
    for (&t, &n2) in series.times.iter().zip(&series.norm2) {
        let expected = psi0.norm_sqr() * (2.0 * pair.ground_energy.im * t).exp();
        assert!((n2 - expected).abs() < 1e-6, "t = {t}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fidelity_is_bounded(
        re in proptest::collection::vec(-1.0f64..1.0, 11),
        im in proptest::collection::vec(-1.0f64..1.0, 11),
        seed in 0u64..1000,
    ) {
        let p = ChainParams::new(1.0, 0.01, 5).unwrap();
        let target = make_initial_state(&InitialProfile::Random, seed, &p).unwrap();
        let amps: Vec<Complex64> = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let evolved = SiteState::new(5, amps, "x").unwrap();
        prop_assume!(evolved.norm_sqr() > 1e-12);
        let f = fidelity(&target, &evolved).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
    }
}
