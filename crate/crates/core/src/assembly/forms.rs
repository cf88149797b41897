//! Element and edge loops for the linear forms.

use crate::geometry::{Mesh, Region};
use crate::quadrature::QuadratureRule;
use crate::scalar::{Complex, Real};

use super::problem::NlhProblem;
use super::sparse::{ComplexSparseMatrix, CsrMatrix, DofMap};

/// Geometry of a P1 element with quadrature data in physical coordinates.
pub(crate) struct Element<T> {
    pub vertices: [usize; 3],
    pub grads: [[T; 2]; 3],
    pub points: Vec<[T; 2]>,
    /// Quadrature weights scaled to the element area.
    pub weights: Vec<T>,
    /// Barycentric coordinates of the quadrature points.
    pub basis: Vec<[T; 3]>,
}

impl<T: Real> Element<T> {
    pub fn new(mesh: &Mesh<T>, t: usize, rule: &QuadratureRule<T>) -> Self {
        let p = mesh.triangle_vertices(t);
        let area = mesh.triangle_area(t);
        let two_area = area + area;
        let grads = [
            [(p[1][1] - p[2][1]) / two_area, (p[2][0] - p[1][0]) / two_area],
            [(p[2][1] - p[0][1]) / two_area, (p[0][0] - p[2][0]) / two_area],
            [(p[0][1] - p[1][1]) / two_area, (p[1][0] - p[0][0]) / two_area],
        ];
        Self {
            vertices: mesh.triangles()[t],
            grads,
            points: rule.map_points(&p),
            weights: rule.weights.iter().map(|&w| w * two_area).collect(),
            basis: rule.points.clone(),
        }
    }
}

fn scatter<V: Copy>(dofs: &DofMap, vertices: &[usize; 3], local: &[[V; 3]; 3], out: &mut Vec<(usize, usize, V)>) {
    for a in 0..3 {
        let Some(i) = dofs.dof(vertices[a]) else { continue };
        for b in 0..3 {
            if let Some(j) = dofs.dof(vertices[b]) {
                out.push((i, j, local[a][b]));
            }
        }
    }
}

/// Element matrix of `a(phi_b, phi_a)`; symmetric by construction.
fn linear_element<T: Real>(problem: &NlhProblem<T>, region: Region, el: &Element<T>) -> [[Complex<T>; 3]; 3] {
    let k = problem.wavenumber.at(region);
    let k2 = k * k;
    let zero = Complex::new(T::zero(), T::zero());
    let mut m = [[zero; 3]; 3];
    for q in 0..el.points.len() {
        let c = problem.pml.coefficients_in(region, el.points[q]);
        let w = el.weights[q];
        let lam = el.basis[q];
        for a in 0..3 {
            let ga = el.grads[a];
            for b in a..3 {
                let gb = el.grads[b];
                let stiff = c.a[0][0] * (ga[0] * gb[0])
                    + c.a[0][1] * (ga[0] * gb[1] + ga[1] * gb[0])
                    + c.a[1][1] * (ga[1] * gb[1]);
                m[a][b] = m[a][b] + (stiff - c.b * (k2 * lam[a] * lam[b])) * w;
            }
        }
    }
    for a in 0..3 {
        for b in 0..a {
            m[a][b] = m[b][a];
        }
    }
    m
}

fn mass_element<T: Real>(el: &Element<T>) -> [[T; 3]; 3] {
    let mut m = [[T::zero(); 3]; 3];
    for q in 0..el.points.len() {
        for a in 0..3 {
            for b in 0..3 {
                m[a][b] = m[a][b] + el.weights[q] * el.basis[q][a] * el.basis[q][b];
            }
        }
    }
    m
}

fn laplace_element<T: Real>(mesh: &Mesh<T>, t: usize, el: &Element<T>) -> [[T; 3]; 3] {
    let area = mesh.triangle_area(t);
    let mut m = [[T::zero(); 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            m[a][b] = area * (el.grads[a][0] * el.grads[b][0] + el.grads[a][1] * el.grads[b][1]);
        }
    }
    m
}

/// Element matrix of `a(phi_b, phi_a)` on triangle `t`, all three vertices
/// included.
pub fn element_matrix<T: Real>(problem: &NlhProblem<T>, t: usize) -> [[Complex<T>; 3]; 3] {
    let el = Element::new(&problem.mesh, t, &QuadratureRule::degree4());
    linear_element(problem, problem.mesh.regions()[t], &el)
}

/// Matrix of `a(phi_j, phi_i) = (A grad phi_j, grad phi_i) - k^2 (B phi_j, phi_i)`
/// over the unknowns.
pub fn assemble_linear<T: Real>(problem: &NlhProblem<T>, dofs: &DofMap) -> ComplexSparseMatrix<T> {
    let mesh = &problem.mesh;
    let rule = QuadratureRule::degree4();
    let mut triplets = Vec::with_capacity(9 * mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let el = Element::new(mesh, t, &rule);
        let local = linear_element(problem, mesh.regions()[t], &el);
        scatter(dofs, &el.vertices, &local, &mut triplets);
    }
    CsrMatrix::from_triplets(dofs.len(), triplets)
}

/// Real matrix of `Re a(phi_j, phi_i) + 2 k^2 (phi_j, phi_i)` over the
/// elements whose region passes `include`.
pub fn assemble_energy<T: Real>(
    problem: &NlhProblem<T>,
    dofs: &DofMap,
    include: impl Fn(Region) -> bool,
) -> CsrMatrix<T> {
    let mesh = &problem.mesh;
    let rule = QuadratureRule::degree4();
    let mut triplets = Vec::with_capacity(9 * mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let region = mesh.regions()[t];
        if !include(region) {
            continue;
        }
        let el = Element::new(mesh, t, &rule);
        let a = linear_element(problem, region, &el);
        let m = mass_element(&el);
        let k = problem.wavenumber.at(region);
        let two_k2 = k * k + k * k;
        let mut local = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                local[i][j] = a[i][j].re + two_k2 * m[i][j];
            }
        }
        scatter(dofs, &el.vertices, &local, &mut triplets);
    }
    CsrMatrix::from_triplets(dofs.len(), triplets)
}

/// Laplacian stiffness and mass matrices over the elements whose region
/// passes `include`.
pub fn assemble_stiffness_mass<T: Real>(
    mesh: &Mesh<T>,
    dofs: &DofMap,
    include: impl Fn(Region) -> bool,
) -> (CsrMatrix<T>, CsrMatrix<T>) {
    let rule = QuadratureRule::degree4();
    let mut stiff = Vec::with_capacity(9 * mesh.num_triangles());
    let mut mass = Vec::with_capacity(9 * mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        if !include(mesh.regions()[t]) {
            continue;
        }
        let el = Element::new(mesh, t, &rule);
        scatter(dofs, &el.vertices, &laplace_element(mesh, t, &el), &mut stiff);
        scatter(dofs, &el.vertices, &mass_element(&el), &mut mass);
    }
    (CsrMatrix::from_triplets(dofs.len(), stiff), CsrMatrix::from_triplets(dofs.len(), mass))
}

/// Normal-derivative jump coefficients of the hat functions across an
/// interior edge, with the edge length. Vertices are listed in the order
/// left triangle, then the apex of the right triangle.
pub(crate) fn edge_jumps<T: Real>(mesh: &Mesh<T>, edge: usize) -> ([usize; 4], [T; 4], T) {
    let e = mesh.interior_edges()[edge];
    let [a, b] = e.vertices;
    let pa = mesh.vertices()[a];
    let pb = mesh.vertices()[b];
    let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
    let normal = [(pb[1] - pa[1]) / len, (pa[0] - pb[0]) / len];

    let rule = QuadratureRule::degree4();
    let left = Element::new(mesh, e.left, &rule);
    let right = Element::new(mesh, e.right, &rule);
    let mut verts = [0usize; 4];
    let mut coef = [T::zero(); 4];
    verts[..3].copy_from_slice(&left.vertices);
    for s in 0..3 {
        coef[s] = left.grads[s][0] * normal[0] + left.grads[s][1] * normal[1];
    }
    for s in 0..3 {
        let v = right.vertices[s];
        let dn = right.grads[s][0] * normal[0] + right.grads[s][1] * normal[1];
        match verts[..3].iter().position(|&w| w == v) {
            Some(slot) => coef[slot] = coef[slot] - dn,
            None => {
                verts[3] = v;
                coef[3] = -dn;
            }
        }
    }
    (verts, coef, len)
}

/// Matrix of `J(phi_j, phi_i) = sum_e gamma_e h_e <[d_n phi_j], [d_n phi_i]>`
/// over interior edges of the physical domain. Edges with `gamma_e = 0`
/// contribute nothing, so a zero penalty yields an empty matrix.
pub fn assemble_cip<T: Real>(problem: &NlhProblem<T>, dofs: &DofMap) -> ComplexSparseMatrix<T> {
    let mesh = &problem.mesh;
    let mut triplets = Vec::new();
    for (idx, e) in mesh.interior_edges().iter().enumerate() {
        if !e.in_omega {
            continue;
        }
        let (verts, coef, h_e) = edge_jumps(mesh, idx);
        let k = problem.wavenumber.at(mesh.regions()[e.left]).max(problem.wavenumber.at(mesh.regions()[e.right]));
        let gamma = problem.penalty.gamma(k, h_e);
        if gamma == Complex::new(T::zero(), T::zero()) {
            continue;
        }
        // edge integral of the constant jump product: h_e * |e| * c_i c_j
        let scale = gamma * (h_e * h_e);
        for a in 0..4 {
            let Some(i) = dofs.dof(verts[a]) else { continue };
            for b in 0..4 {
                if let Some(j) = dofs.dof(verts[b]) {
                    triplets.push((i, j, scale * (coef[a] * coef[b])));
                }
            }
        }
    }
    CsrMatrix::from_triplets(dofs.len(), triplets)
}

/// Load vector `(f, phi_i)` over the unknowns.
pub fn assemble_load<T: Real>(problem: &NlhProblem<T>, dofs: &DofMap) -> Vec<Complex<T>> {
    let mesh = &problem.mesh;
    let rule = QuadratureRule::degree4();
    let mut out = vec![Complex::new(T::zero(), T::zero()); dofs.len()];
    if matches!(problem.load, super::problem::Load::Zero) {
        return out;
    }
    for t in 0..mesh.num_triangles() {
        let region = mesh.regions()[t];
        let el = Element::new(mesh, t, &rule);
        for q in 0..el.points.len() {
            let f = problem.load_value(region, el.points[q]);
            if f == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            for a in 0..3 {
                if let Some(i) = dofs.dof(el.vertices[a]) {
                    out[i] = out[i] + f * (el.weights[q] * el.basis[q][a]);
                }
            }
        }
    }
    out
}
