//! Kerr term `k^2 eps |W|^2 W` on the Kerr disk, `W = u + u_inc`, and its
//! linearizations for the three iteration schemes.

use crate::analytic::IncidentWave;
use crate::geometry::Region;
use crate::quadrature::QuadratureRule;
use crate::scalar::{Complex, Real};

use super::forms::Element;
use super::problem::NlhProblem;
use super::sparse::{ComplexSparseMatrix, CsrMatrix, DofMap};

struct KerrElement<T> {
    dofs: [Option<usize>; 3],
    weights: Vec<T>,
    basis: Vec<[T; 3]>,
    points: Vec<[T; 2]>,
    incident: Vec<Complex<T>>,
}

/// Quadrature data of the Kerr elements, with the incident wave sampled
/// analytically at the quadrature points.
pub struct KerrData<T> {
    n: usize,
    coefficient: T,
    elements: Vec<KerrElement<T>>,
}

/// Matrix and right-hand-side contributions of one linearization.
#[derive(Debug, Clone, PartialEq)]
pub struct KerrLinearization<T> {
    /// C-linear part, acting on the unknown.
    pub matrix: ComplexSparseMatrix<T>,
    /// Antilinear part, acting on the conjugate of the unknown (Newton only).
    pub antilinear: Option<ComplexSparseMatrix<T>>,
    /// Correction added to the load vector.
    pub rhs: Vec<Complex<T>>,
}

impl<T: Real> KerrData<T> {
    pub fn new(problem: &NlhProblem<T>, dofs: &DofMap) -> Self {
        let mesh = &problem.mesh;
        let rule = QuadratureRule::degree4();
        let elements = (0..mesh.num_triangles())
            .filter(|&t| mesh.regions()[t] == Region::Kerr)
            .map(|t| {
                let el = Element::new(mesh, t, &rule);
                KerrElement {
                    dofs: el.vertices.map(|v| dofs.dof(v)),
                    incident: el.points.iter().map(|&x| problem.incident.value(x)).collect(),
                    weights: el.weights,
                    basis: el.basis,
                    points: el.points,
                }
            })
            .collect();
        Self { n: dofs.len(), coefficient: problem.kerr_coefficient(), elements }
    }

    /// Resamples the incident wave.
    pub fn set_incident(&mut self, incident: &IncidentWave<T>) {
        for el in &mut self.elements {
            for (v, &x) in el.incident.iter_mut().zip(&el.points) {
                *v = incident.value(x);
            }
        }
    }

    pub fn coefficient(&self) -> T {
        self.coefficient
    }

    fn is_inactive(&self) -> bool {
        self.coefficient == T::zero() || self.elements.is_empty()
    }

    fn interpolate(el: &KerrElement<T>, q: usize, u: &[Complex<T>]) -> Complex<T> {
        let mut s = Complex::new(T::zero(), T::zero());
        for a in 0..3 {
            if let Some(d) = el.dofs[a] {
                s = s + u[d] * el.basis[q][a];
            }
        }
        s
    }

    /// Assembles `-c * int g phi_j phi_i` and `c * int r phi_i`, where
    /// `(g, r) = pointwise(u_h, u_inc)` at each quadrature point.
    fn assemble(
        &self,
        u: &[Complex<T>],
        pointwise: impl Fn(Complex<T>, Complex<T>) -> (Complex<T>, Complex<T>),
    ) -> (ComplexSparseMatrix<T>, Vec<Complex<T>>) {
        let zero = Complex::new(T::zero(), T::zero());
        let mut rhs = vec![zero; self.n];
        if self.is_inactive() {
            return (CsrMatrix::zeros(self.n), rhs);
        }
        let c = self.coefficient;
        let mut triplets = Vec::with_capacity(9 * self.elements.len());
        for el in &self.elements {
            let mut local = [[zero; 3]; 3];
            for q in 0..el.weights.len() {
                let (g, r) = pointwise(Self::interpolate(el, q, u), el.incident[q]);
                let w = el.weights[q] * c;
                let lam = el.basis[q];
                for a in 0..3 {
                    for b in a..3 {
                        local[a][b] = local[a][b] - g * (w * lam[a] * lam[b]);
                    }
                    if let Some(i) = el.dofs[a] {
                        rhs[i] = rhs[i] + r * (w * lam[a]);
                    }
                }
            }
            for a in 0..3 {
                let Some(i) = el.dofs[a] else { continue };
                for b in 0..3 {
                    if let Some(j) = el.dofs[b] {
                        triplets.push((i, j, if a <= b { local[a][b] } else { local[b][a] }));
                    }
                }
            }
        }
        (CsrMatrix::from_triplets(self.n, triplets), rhs)
    }

    /// Frozen nonlinearity: matrix `-c |W|^2`, rhs `+c |W|^2 u_inc`.
    pub fn frozen(&self, u: &[Complex<T>]) -> KerrLinearization<T> {
        let (matrix, rhs) = self.assemble(u, |uh, inc| {
            let m = (uh + inc).norm_sqr();
            (Complex::new(m, T::zero()), inc * m)
        });
        KerrLinearization { matrix, antilinear: None, rhs }
    }

    /// Modified Newton: matrix `-2c |W|^2`, rhs `-c |W|^2 (u - u_inc)`.
    pub fn modified_newton(&self, u: &[Complex<T>]) -> KerrLinearization<T> {
        let (matrix, rhs) = self.assemble(u, |uh, inc| {
            let m = (uh + inc).norm_sqr();
            (Complex::new(m + m, T::zero()), -(uh - inc) * m)
        });
        KerrLinearization { matrix, antilinear: None, rhs }
    }

    /// Newton: matrix `-2c |W|^2`, antilinear matrix `-c W^2`,
    /// rhs `-c (2 |W|^2 u - W^2 conj(u_inc))`.
    pub fn newton(&self, u: &[Complex<T>]) -> KerrLinearization<T> {
        let (matrix, rhs) = self.assemble(u, |uh, inc| {
            let w = uh + inc;
            let m = w.norm_sqr();
            (Complex::new(m + m, T::zero()), w * w * inc.conj() - uh * (m + m))
        });
        let (antilinear, _) = self.assemble(u, |uh, inc| {
            let w = uh + inc;
            (w * w, Complex::new(T::zero(), T::zero()))
        });
        KerrLinearization { matrix, antilinear: Some(antilinear), rhs }
    }

    /// `(c |W|^2 W, phi_i)` on the Kerr disk.
    pub fn nonlinear_term(&self, u: &[Complex<T>]) -> Vec<Complex<T>> {
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = vec![zero; self.n];
        if self.is_inactive() {
            return out;
        }
        for el in &self.elements {
            for q in 0..el.weights.len() {
                let w = Self::interpolate(el, q, u) + el.incident[q];
                let val = w * (w.norm_sqr() * el.weights[q] * self.coefficient);
                for a in 0..3 {
                    if let Some(i) = el.dofs[a] {
                        out[i] = out[i] + val * el.basis[q][a];
                    }
                }
            }
        }
        out
    }
}
