use nlh_core::analytic::IncidentWave;
use nlh_core::assembly::{
    assemble_cip, assemble_linear, assemble_load, assemble_stiffness_mass, element_matrix, CsrMatrix, DofMap, Load,
    NlhProblem, NlhSystem, NormRegion, Penalty, Wavenumber,
};
use nlh_core::geometry::{build_disk_mesh, refine, DiskRadii, Mesh, Region};
use nlh_core::pml::PmlProfile;
use nlh_core::scalar::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

type C = Complex<f64>;

fn reference_mesh() -> Mesh<f64> {
    build_disk_mesh(DiskRadii::new(0.5, 1.0, 2.0).unwrap(), 0.2).unwrap()
}

fn problem(mesh: Mesh<f64>, k: f64, penalty: Penalty<f64>, load: Load<f64>) -> NlhProblem<f64> {
    NlhProblem::new(
        mesh,
        PmlProfile::new(4.0, 1.0, 2.0).unwrap(),
        Wavenumber::constant(k),
        0.0,
        IncidentWave::Zero,
        load,
        penalty,
    )
    .unwrap()
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C> {
    (0..n).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// Gradient of the P1 function with nodal values `u` on triangle `t`,
/// from the 2x2 system of edge differences.
fn fe_gradient(mesh: &Mesh<f64>, nodal: &[C], t: usize) -> [C; 2] {
    let [a, b, c] = mesh.triangles()[t];
    let (pa, pb, pc) = (mesh.vertices()[a], mesh.vertices()[b], mesh.vertices()[c]);
    let (e1, e2) = ([pb[0] - pa[0], pb[1] - pa[1]], [pc[0] - pa[0], pc[1] - pa[1]]);
    let (d1, d2) = (nodal[b] - nodal[a], nodal[c] - nodal[a]);
    let det = e1[0] * e2[1] - e1[1] * e2[0];
    [(d1 * e2[1] - d2 * e1[1]) / det, (d2 * e1[0] - d1 * e2[0]) / det]
}

fn quadratic_form(m: &nlh_core::assembly::ComplexSparseMatrix<f64>, v: &[C]) -> C {
    let mv = m.mul_vec(v);
    v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
}

#[test]
fn reference_triangle_element_matrix() {
    let radii = DiskRadii::new(0.5, 1.0, 2.0).unwrap();
    let mesh = Mesh::from_parts(
        radii,
        vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        vec![None; 3],
        vec![[0, 1, 2]],
        vec![Region::Annulus],
        0,
    )
    .unwrap();
    let m = element_matrix(&problem(mesh, 1.0, Penalty::None, Load::Zero), 0);
    let stiff = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
    for i in 0..3 {
        for j in 0..3 {
            let mass = if i == j { 1.0 / 12.0 } else { 1.0 / 24.0 };
            assert!((m[i][j] - C::new(stiff[i][j] - mass, 0.0)).norm() < 1e-15, "({i}, {j})");
        }
    }
}

#[test]
fn physical_region_reduces_to_helmholtz_stiffness() {
    let base = reference_mesh();
    let mesh = Mesh::from_parts(
        base.radii(),
        base.vertices().to_vec(),
        base.vertex_circles().to_vec(),
        base.triangles().to_vec(),
        vec![Region::Annulus; base.num_triangles()],
        0,
    )
    .unwrap();
    let dofs = DofMap::new(&mesh);
    let (stiff, mass) = assemble_stiffness_mass(&mesh, &dofs, |_| true);
    let p = problem(mesh, 1.0, Penalty::None, Load::Zero);
    let a = assemble_linear(&p, &dofs);
    assert_eq!(a.col_idx(), stiff.col_idx());
    for (i, j, v) in a.triplets() {
        let expected = stiff.get(i, j) - mass.get(i, j);
        assert!((v - C::new(expected, 0.0)).norm() < 1e-14);
    }
}

#[test]
fn linear_form_is_complex_symmetric() {
    let p = problem(reference_mesh(), 10.0, Penalty::None, Load::Zero);
    let a = assemble_linear(&p, &DofMap::new(&p.mesh));
    assert!(a.max_asymmetry() <= 1e-13 * a.max_abs());
    // not Hermitian: the layer makes the matrix genuinely complex
    assert!(a.values().iter().any(|v| v.im.abs() > 1e-3));
}

#[test]
fn zero_penalty_gives_empty_matrix_and_identical_system() {
    let fem = NlhSystem::new(problem(reference_mesh(), 10.0, Penalty::None, Load::Zero)).unwrap();
    let zero =
        NlhSystem::new(problem(reference_mesh(), 10.0, Penalty::Constant(C::new(0.0, 0.0)), Load::Zero)).unwrap();
    assert_eq!(zero.penalty_matrix().nnz(), 0);
    assert_eq!(fem.system_matrix(), zero.system_matrix());
}

#[test]
fn penalty_matches_edge_jump_oracle() {
    let mesh = reference_mesh();
    let p = problem(mesh.clone(), 10.0, Penalty::Dispersion, Load::Zero);
    let dofs = DofMap::new(&mesh);
    let j = assemble_cip(&p, &dofs);
    assert!(j.max_asymmetry() <= 1e-14 * j.max_abs());
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let v = random_vector(&mut rng, dofs.len());
        let nodal = dofs.expand(&v);
        let mut expected = C::new(0.0, 0.0);
        for e in mesh.interior_edges().iter().filter(|e| e.in_omega) {
            let (pa, pb) = (mesh.vertices()[e.vertices[0]], mesh.vertices()[e.vertices[1]]);
            let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
            let n = [(pb[1] - pa[1]) / len, (pa[0] - pb[0]) / len];
            let (gl, gr) = (fe_gradient(&mesh, &nodal, e.left), fe_gradient(&mesh, &nodal, e.right));
            let jump = (gl[0] - gr[0]) * n[0] + (gl[1] - gr[1]) * n[1];
            let gamma = nlh_core::assembly::penalty_gamma(10.0, len);
            expected += gamma * len * len * jump.norm_sqr();
        }
        let got = quadratic_form(&j, &v);
        assert!((got - expected).norm() <= 1e-12 * expected.norm());
        assert!(got.re <= 0.0 && got.im.abs() <= 1e-12 * got.re.abs());
    }
}

#[test]
fn penalty_touches_only_physical_domain() {
    let mesh = reference_mesh();
    let p = problem(mesh.clone(), 10.0, Penalty::Dispersion, Load::Zero);
    let dofs = DofMap::new(&mesh);
    let j = assemble_cip(&p, &dofs);
    for (i, _, _) in j.triplets() {
        let x = mesh.vertices()[dofs.vertex(i)];
        // vertices of edges adjacent to Omega elements lie within one layer of R
        assert!(x[0].hypot(x[1]) <= 1.0 + 0.3);
    }
    let deep = (0..dofs.len()).find(|&d| {
        let x = mesh.vertices()[dofs.vertex(d)];
        x[0].hypot(x[1]) > 1.5
    });
    assert!(j.row(deep.unwrap()).next().is_none());
}

#[test]
fn load_vectors() {
    let mesh = reference_mesh();
    let dofs = DofMap::new(&mesh);
    let zero = assemble_load(&problem(mesh.clone(), 10.0, Penalty::None, Load::Zero), &dofs);
    assert!(zero.iter().all(|v| *v == C::new(0.0, 0.0)));

    let one = Load::Constant(C::new(1.0, 0.0));
    let deficit = |m: &Mesh<f64>| {
        let d = DofMap::new(m);
        let f = assemble_load(&problem(m.clone(), 10.0, Penalty::None, one), &d);
        std::f64::consts::PI - f.iter().map(|v| v.re).sum::<f64>()
    };
    let fine = refine(&mesh);
    let (d0, d1) = (deficit(&mesh), deficit(&fine));
    assert!(d0 > 0.0 && d0 < 0.05, "{d0}");
    assert!((3.5..=4.5).contains(&(d0 / d1)), "{d0} / {d1}");
}

#[test]
fn transmission_load_is_supported_on_kerr_disk() {
    let mesh = reference_mesh();
    let dofs = DofMap::new(&mesh);
    let p = NlhProblem::new(
        mesh.clone(),
        PmlProfile::new(4.0, 1.0, 2.0).unwrap(),
        Wavenumber { background: 5.4, kerr: 18.9 },
        1e-12,
        IncidentWave::Plane { amplitude: 1.0, k0: 5.4 },
        Load::Transmission,
        Penalty::None,
    )
    .unwrap();
    let f = assemble_load(&p, &dofs);
    for (d, v) in f.iter().enumerate() {
        let x = mesh.vertices()[dofs.vertex(d)];
        if x[0].hypot(x[1]) > 0.5 + 1e-12 {
            assert_eq!(*v, C::new(0.0, 0.0));
        }
    }
    assert!(f.iter().any(|v| v.norm() > 0.0));
}

fn sandwich_setup() -> &'static (NlhSystem<f64>, [CsrMatrix<f64>; 4]) {
    static SETUP: OnceLock<(NlhSystem<f64>, [CsrMatrix<f64>; 4])> = OnceLock::new();
    SETUP.get_or_init(|| {
        let mesh = reference_mesh();
        let sys = NlhSystem::new(problem(mesh.clone(), 10.0, Penalty::None, Load::Zero)).unwrap();
        let (stiff_d, mass_d) = assemble_stiffness_mass(&mesh, sys.dofs(), |_| true);
        let (stiff_o, mass_o) = assemble_stiffness_mass(&mesh, sys.dofs(), Region::in_omega);
        (sys, [stiff_d, mass_d, stiff_o, mass_o])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn energy_norm_sandwich_and_physical_identity(seed in any::<u64>(), scale in 1e-3..1e3f64) {
        let (k, sigma0) = (10.0, 4.0_f64);
        let (sys, [stiff_d, mass_d, stiff_o, mass_o]) = sandwich_setup();
        let c = 1.0 + sigma0 * sigma0;
        let v: Vec<C> = random_vector(&mut ChaCha8Rng::seed_from_u64(seed), sys.num_dofs())
            .into_iter()
            .map(|z| z * scale)
            .collect();
        let (h1, l2) = (stiff_d.hermitian_form(&v), mass_d.hermitian_form(&v));
        let e = sys.energy_norm(&v, NormRegion::Domain).powi(2);
        prop_assert!(h1 / c + k * k * l2 <= e && e <= c * (h1 + k * k * l2));

        let eo = sys.energy_norm(&v, NormRegion::Omega).powi(2);
        let expected = stiff_o.hermitian_form(&v) + k * k * mass_o.hermitian_form(&v);
        prop_assert!((eo - expected).abs() <= 1e-12 * expected);
    }
}

#[test]
fn energy_norm_of_zero_is_zero() {
    let (sys, _) = sandwich_setup();
    assert_eq!(sys.energy_norm(&vec![C::new(0.0, 0.0); sys.num_dofs()], NormRegion::Domain), 0.0);
}
