use nlh_core::analytic::Benchmark;
use nlh_core::assembly::{NlhSystem, NormRegion, Penalty};
use nlh_core::metrics::error_against_exact;
use nlh_core::nonlinear::{
    bistability_sweep, relative_error, solve_linear, solve_nlh, IterationOptions, NonlinearError, Scheme, SweepOptions,
    Termination,
};
use nlh_core::presets;
use nlh_core::scalar::Complex;

type C = Complex<f64>;

fn benchmark(level: usize, epsilon: Option<f64>) -> NlhSystem<f64> {
    let mesh = presets::benchmark_mesh(level, 1.0).unwrap();
    let mut problem = presets::benchmark_problem(mesh, 10.0, 4.0, Penalty::Dispersion).unwrap();
    if let Some(eps) = epsilon {
        problem.kerr_epsilon = eps;
    }
    NlhSystem::new(problem).unwrap()
}

fn zeros(n: usize) -> Vec<C> {
    vec![C::new(0.0, 0.0); n]
}

#[test]
fn linear_problem_takes_one_effective_step() {
    let sys = benchmark(1, Some(0.0));
    let linear = solve_linear(&sys).unwrap();
    for scheme in Scheme::ALL {
        let (u, trace) =
            solve_nlh(&sys, scheme, &zeros(sys.num_dofs()), &IterationOptions::for_scheme(scheme)).unwrap();
        assert!(trace.converged(), "{scheme}");
        assert_eq!(trace.num_steps(), 2, "{scheme}");
        assert_eq!(trace.steps[0].relative_update, 1.0);
        assert_eq!(trace.steps[1].relative_update, 0.0);
        assert_eq!(u, linear, "{scheme}");
    }
}

#[test]
fn schemes_agree_on_benchmark() {
    let sys = benchmark(2, None);
    let zero = zeros(sys.num_dofs());
    let solutions: Vec<_> = Scheme::ALL
        .iter()
        .map(|&s| {
            let (u, trace) = solve_nlh(&sys, s, &zero, &IterationOptions::for_scheme(s).with_tol(1e-12)).unwrap();
            assert!(trace.converged(), "{s}: {:?}", trace.termination);
            u
        })
        .collect();
    for i in 0..3 {
        for j in i + 1..3 {
            let d = relative_error(&sys, &solutions[i], &solutions[j], NormRegion::Domain);
            assert!(d <= 1e-8, "{:?} vs {:?}: {d}", Scheme::ALL[i], Scheme::ALL[j]);
        }
    }
    let bench = Benchmark::with_default_epsilon(10.0);
    let r = error_against_exact(&sys, &solutions[0], |x| bench.scattered(x), |x| bench.gradient(x), NormRegion::Omega)
        .unwrap();
    assert!(r.rel_h1 < 0.3, "{}", r.rel_h1);
}

#[test]
fn converged_solutions_have_small_residuals() {
    let sys = benchmark(1, None);
    for scheme in Scheme::ALL {
        let (_, trace) =
            solve_nlh(&sys, scheme, &zeros(sys.num_dofs()), &IterationOptions::for_scheme(scheme)).unwrap();
        assert!(trace.converged());
        assert!(trace.last_update() < 1e-6);
        assert!(trace.final_residual() <= 1e-4, "{scheme}: {}", trace.final_residual());
        assert!(trace.steps.iter().all(|s| s.linear.success));
    }
}

#[test]
fn iteration_cap_is_not_an_error() {
    let sys = benchmark(0, None);
    let opts = IterationOptions::for_scheme(Scheme::Frozen).with_max_iter(1);
    let (_, trace) = solve_nlh(&sys, Scheme::Frozen, &zeros(sys.num_dofs()), &opts).unwrap();
    assert_eq!(trace.termination, Termination::MaxIterations);
    assert_eq!(trace.num_steps(), 1);
}

#[test]
fn invalid_inputs_are_rejected() {
    let mut sys = benchmark(0, None);
    let opts = IterationOptions::for_scheme(Scheme::Newton);
    assert!(matches!(solve_nlh(&sys, Scheme::Newton, &zeros(3), &opts), Err(NonlinearError::DimensionMismatch { .. })));
    let bad = opts.with_max_iter(0);
    assert!(matches!(
        solve_nlh(&sys, Scheme::Newton, &zeros(sys.num_dofs()), &bad),
        Err(NonlinearError::InvalidOptions(_))
    ));
    let sweep = SweepOptions::new(Scheme::Newton);
    assert!(matches!(bistability_sweep(&mut sys, &[2.0, 1.0], &sweep), Err(NonlinearError::InvalidAmplitudes)));
    assert!(matches!(bistability_sweep(&mut sys, &[], &sweep), Err(NonlinearError::InvalidAmplitudes)));
}

#[test]
fn warm_and_cold_starts_agree_on_lower_branch() {
    let mesh = presets::bistability_mesh(0.04).unwrap();
    let mut sys =
        NlhSystem::new(presets::bistability_problem(mesh, 2.0e5, 1e-12, Penalty::Dispersion).unwrap()).unwrap();
    let opts = IterationOptions::for_scheme(Scheme::Newton).with_tol(1e-12);
    let zero = zeros(sys.num_dofs());
    let (warm_start, _) = solve_nlh(&sys, Scheme::Newton, &zero, &opts).unwrap();
    let incident = sys.problem().incident.with_amplitude(2.2e5);
    sys.set_incident(incident);
    let (cold, t1) = solve_nlh(&sys, Scheme::Newton, &zero, &opts).unwrap();
    let (warm, t2) = solve_nlh(&sys, Scheme::Newton, &warm_start, &opts).unwrap();
    assert!(t1.converged() && t2.converged());
    assert!(relative_error(&sys, &warm, &cold, NormRegion::Domain) <= 1e-8);
}

#[test]
fn linear_sweep_has_no_hysteresis() {
    let mesh = presets::bistability_mesh(0.05).unwrap();
    let mut sys = NlhSystem::new(presets::bistability_problem(mesh, 1.0, 0.0, Penalty::Dispersion).unwrap()).unwrap();
    let amplitudes = [1.0e3, 2.0e4, 1.0e5, 2.0e5, 3.1e5];
    let result = bistability_sweep(&mut sys, &amplitudes, &SweepOptions::new(Scheme::Newton)).unwrap();
    assert_eq!(result.up_threshold, None);
    assert_eq!(result.down_threshold, None);
    assert!(!result.hysteresis());
    let e0 = result.up[0].energy / amplitudes[0];
    for (up, down) in result.up.iter().zip(result.down.iter().rev()) {
        assert!(up.converged && down.converged);
        assert!((up.energy - down.energy).abs() <= 1e-10 * up.energy);
        assert!((up.energy / up.amplitude - e0).abs() <= 1e-10 * e0);
    }
    assert_eq!(sys.problem().incident.with_amplitude(1.0), sys.problem().incident);
}
