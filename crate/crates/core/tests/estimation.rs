use sisrec::harness::{generate_random_sis, random_signal, run_detection, run_monte_carlo, BenchConfig, EstimatorMode, RootMode};
use sisrec::{
    add_noise, detect, estimate_core, estimate_onesided, estimate_onesided_detailed, Complex64, ObservationWindow, SisSpec, SolverConfig,
    TwoSidedSequence,
};

fn config(mode: EstimatorMode, sigma: f64, trials: usize) -> BenchConfig {
    BenchConfig {
        trials,
        n_list: vec![729],
        s_list: vec![2],
        sigma,
        delta: 0.1,
        root_mode: RootMode::UnitCircle,
        seed: 31,
        estimator_mode: mode,
        out_path: None,
        normalize: true,
        fixed_spec: false,
        c1: 1.0,
        solver: SolverConfig::default(),
    }
}

fn windowed_mse(xhat: &TwoSidedSequence, x: &TwoSidedSequence, lo: i64, hi: i64) -> f64 {
    (lo..=hi).map(|t| (xhat.get(t) - x.get(t)).norm_sqr()).sum::<f64>() / (hi - lo + 1) as f64
}

#[test]
fn estimators_beat_raw_observations() {
    // The raw observations have per-sample MSE σ² = 1e-2. A fit of half-width
    // n with 2n+1 ≤ 18·C★·s can keep the identity filter, so the sizes are
    // picked to put the core fit beyond that point.
    for (mode, n, s) in [(EstimatorMode::Core, 729, 2), (EstimatorMode::Full, 2187, 1)] {
        let mut cfg = config(mode, 0.1, 6);
        cfg.n_list = vec![n];
        cfg.s_list = vec![s];
        let report = run_monte_carlo(&cfg).unwrap();
        let r = &report.reports[0];
        assert_eq!(r.failures, 0);
        let median = r.median_mse().unwrap();
        assert!(median < 0.9e-2, "{mode:?}: median MSE {median}");
    }
}

#[test]
fn causal_estimator_on_a_damped_signal() {
    let spec = SisSpec::simple(&[Complex64::from_polar(0.999, 0.4), Complex64::from_polar(1.0, -1.1)]).unwrap();
    let sigma = 0.1;
    let mut total = 0.0;
    for seed in 0..4 {
        let x = random_signal(&spec, 1458, seed).unwrap();
        let x = x.scaled(Complex64::new(1.0 / x.seminorm(1458, 2.0), 0.0));
        let y = add_noise(&x, 1458, sigma, 100 + seed).unwrap();
        let xhat = estimate_onesided(&y, 2, 1.0, 0, &SolverConfig::default()).unwrap();
        assert_eq!((xhat.lo(), xhat.hi()), (0, 1458));
        total += windowed_mse(&xhat, &x, 0, 1458);
    }
    assert!(total / 4.0 < 0.9 * sigma * sigma, "mean MSE {}", total / 4.0);
}

#[test]
fn prediction_lead_uses_only_past_samples() {
    let spec = SisSpec::simple(&[Complex64::from_polar(1.0, 0.7)]).unwrap();
    let x = random_signal(&spec, 60, 3).unwrap();
    let y = add_noise(&x, 60, 0.0, 0).unwrap();
    let xhat = estimate_onesided(&y, 1, 1.0, 4, &SolverConfig::default()).unwrap();
    // with lead 4 the window is n = 28 and the estimate lives on [0, 56]
    assert_eq!((xhat.lo(), xhat.hi()), (0, 56));
    assert!(windowed_mse(&xhat, &x, 0, 56) < 1e-12);

    // each output reads observations no later than t − 4
    let est = estimate_onesided_detailed(&y, 1, 1.0, 4, &SolverConfig::default()).unwrap();
    assert!(est.fits[0].filter.supported_within(4, 4 + 56));
}

#[test]
fn core_estimate_rejects_short_windows() {
    let y = ObservationWindow::new(TwoSidedSequence::zeros(-4, 4), 4, 0.1).unwrap();
    assert!(estimate_core(&y, 5, &SolverConfig::default()).is_err());
    assert!(estimate_core(&y, 0, &SolverConfig::default()).is_err());
}

#[test]
fn detection_type_one_error_at_two_sizes() {
    for (s, n) in [(1usize, 27usize), (2, 54)] {
        let mut cfg = config(EstimatorMode::Full, 1.0, 40);
        cfg.s_list = vec![s];
        let r = run_detection(&cfg, n, s, None).unwrap();
        assert_eq!(r.failures, 0);
        assert!(r.type1_errors.unwrap() as f64 / 40.0 <= 0.1 + 2.0 * (0.1f64 / 40.0).sqrt());
        assert!(r.type2_errors.unwrap() as f64 / 40.0 <= 0.1 + 2.0 * (0.1f64 / 40.0).sqrt());
    }
}

#[test]
fn rejection_rate_grows_with_signal_norm() {
    let (s, n, sigma) = (1usize, 27usize, 1.0);
    let spec = generate_random_sis(s, RootMode::UnitCircle, 0, 8).unwrap();
    let setup = sisrec::DetectionSetup::new(n, s, sigma, 0.1).unwrap();
    let r0 = sisrec::detection_threshold(&setup).sqrt();
    let mut rates = Vec::new();
    for scale in [0.0, 0.5, 0.9, 1.2] {
        let mut rejects = 0;
        for trial in 0..10 {
            let x = random_signal(&spec, 2 * n, trial).unwrap();
            let x = x.scaled(Complex64::new(scale * r0 / x.seminorm(2 * n, 2.0), 0.0));
            let y = add_noise(&x, 2 * n, sigma, 500 + trial).unwrap();
            rejects += usize::from(detect(&y, s, sigma, 0.1, &SolverConfig::default()).unwrap().reject);
        }
        rates.push(rejects);
    }
    assert!(rates.windows(2).all(|w| w[0] <= w[1]), "{rates:?}");
    assert_eq!(rates[0], 0);
    assert_eq!(rates[3], 10);
}

#[test]
fn doubling_sigma_doubles_the_noise() {
    let x = TwoSidedSequence::zeros(-10, 10);
    let a = add_noise(&x, 10, 0.5, 77).unwrap();
    let b = add_noise(&x, 10, 1.0, 77).unwrap();
    for (u, v) in a.y.values().iter().zip(b.y.values()) {
        assert_eq!(u * 2.0, *v);
    }
}
