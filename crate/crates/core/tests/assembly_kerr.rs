use nlh_core::analytic::IncidentWave;
use nlh_core::assembly::{assemble_stiffness_mass, Load, NlhProblem, NlhSystem, Penalty, Wavenumber};
use nlh_core::geometry::{build_disk_mesh, DiskRadii, Region};
use nlh_core::pml::PmlProfile;
use nlh_core::presets;
use nlh_core::scalar::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

type C = Complex<f64>;

fn system(epsilon: f64, incident: IncidentWave<f64>, load: Load<f64>) -> NlhSystem<f64> {
    let mesh = build_disk_mesh(DiskRadii::new(0.5, 1.0, 2.0).unwrap(), 0.2).unwrap();
    NlhSystem::new(
        NlhProblem::new(
            mesh,
            PmlProfile::new(4.0, 1.0, 2.0).unwrap(),
            Wavenumber::constant(10.0),
            epsilon,
            incident,
            load,
            Penalty::Dispersion,
        )
        .unwrap(),
    )
    .unwrap()
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<C> {
    (0..n).map(|_| C::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))).collect()
}

fn norm(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[test]
fn vanishing_nonlinearity_gives_zeros() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let sys = system(0.0, IncidentWave::Bessel { k: 10.0 }, Load::Zero);
    let u = random_vector(&mut rng, sys.num_dofs(), 1.0);
    for lin in [sys.kerr_frozen(&u), sys.kerr_modified_newton(&u), sys.kerr_newton(&u)] {
        assert_eq!(lin.matrix.nnz(), 0);
        assert!(lin.antilinear.as_ref().is_none_or(|q| q.nnz() == 0));
        assert!(lin.rhs.iter().all(|v| *v == C::new(0.0, 0.0)));
    }

    let sys = system(0.01, IncidentWave::Zero, Load::Zero);
    let zero = vec![C::new(0.0, 0.0); sys.num_dofs()];
    let lin = sys.kerr_newton(&zero);
    assert!(lin.matrix.values().iter().chain(lin.antilinear.unwrap().values()).all(|v| v.norm() == 0.0));
    assert!(lin.rhs.iter().all(|v| v.norm() == 0.0));
    assert!(sys.nonlinear_residual(&zero).iter().all(|v| v.norm() == 0.0));
}

#[test]
fn constant_incident_wave_reduces_to_kerr_mass() {
    let (eps, c) = (0.01, 2.0);
    let sys = system(eps, IncidentWave::Plane { amplitude: c, k0: 0.0 }, Load::Zero);
    let (_, mass) = assemble_stiffness_mass(&sys.problem().mesh, sys.dofs(), |r| r == Region::Kerr);
    let zero = vec![C::new(0.0, 0.0); sys.num_dofs()];
    let coef = 100.0 * eps;

    let frozen = sys.kerr_frozen(&zero);
    for (i, j, v) in frozen.matrix.triplets() {
        assert!((v - C::new(-coef * c * c * mass.get(i, j), 0.0)).norm() <= 1e-15);
    }
    let modified = sys.kerr_modified_newton(&zero);
    for i in 0..sys.num_dofs() {
        let row_mass: f64 = mass.row(i).map(|(_, m)| m).sum();
        assert!((frozen.rhs[i] - C::new(coef * c * c * c * row_mass, 0.0)).norm() <= 1e-14);
        assert!((modified.rhs[i] - C::new(coef * c * c * c * row_mass, 0.0)).norm() <= 1e-14);
    }

    let newton = sys.kerr_newton(&zero);
    let anti = newton.antilinear.unwrap();
    for (i, j, v) in newton.matrix.triplets() {
        assert!((anti.get(i, j) * 2.0 - v).norm() <= 1e-15 * v.norm().max(1e-300));
    }
}

#[test]
fn modified_matrix_doubles_frozen_and_all_are_symmetric() {
    let sys = system(0.01, IncidentWave::Bessel { k: 10.0 }, Load::Zero);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let u = random_vector(&mut rng, sys.num_dofs(), 1.0);
    let frozen = sys.kerr_frozen(&u);
    let modified = sys.kerr_modified_newton(&u);
    assert_eq!(frozen.matrix.map(|v| v * 2.0), modified.matrix);
    let newton = sys.kerr_newton(&u);
    assert_eq!(newton.matrix, modified.matrix);
    let anti = newton.antilinear.unwrap();
    for m in [&frozen.matrix, &anti] {
        assert!(m.max_asymmetry() <= 1e-15 * m.max_abs());
    }
}

/// Least-squares slope of `log y` against `log x`.
fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

fn frechet_system() -> &'static NlhSystem<f64> {
    static SYS: OnceLock<NlhSystem<f64>> = OnceLock::new();
    SYS.get_or_init(|| {
        let mesh = presets::benchmark_mesh(2, 1.0).unwrap();
        NlhSystem::new(presets::benchmark_problem(mesh, 10.0, 4.0, Penalty::Dispersion).unwrap()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]
    #[test]
    fn newton_linearization_is_the_frechet_derivative(seed in any::<u64>(), scale in 0.5..1.5f64) {
        let sys = frechet_system();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ts = [1e-2, 1e-3, 1e-4, 1e-5];
        let u = random_vector(&mut rng, sys.num_dofs(), scale);
        let delta = random_vector(&mut rng, sys.num_dofs(), 1.0);
        let r0 = sys.nonlinear_residual(&u);
        let lin = sys.kerr_newton(&u);
        let jac = sys.system_matrix().add(&lin.matrix);
        let jd = jac.apply(&delta);
        let qd = lin.antilinear.unwrap().apply_conj(&delta);
        let defects: Vec<f64> = ts
            .iter()
            .map(|&t| {
                let shifted: Vec<C> = u.iter().zip(&delta).map(|(a, d)| a + d * t).collect();
                let r1 = sys.nonlinear_residual(&shifted);
                let d: Vec<C> = (0..r0.len()).map(|i| r1[i] - r0[i] - (jd[i] + qd[i]) * t).collect();
                norm(&d)
            })
            .collect();
        let slope = loglog_slope(&ts, &defects);
        prop_assert!(slope >= 1.9, "slope {}, defects {:?}", slope, defects);
    }
}
