//! P1 assembly of the PML form, the edge penalty, loads and Kerr terms.

mod forms;
mod kerr;
mod problem;
mod sparse;

use thiserror::Error;

use crate::analytic::IncidentWave;
use crate::geometry::{MeshError, Region};
use crate::scalar::{Complex, Real};

pub(crate) use forms::Element;
pub use forms::{
    assemble_cip, assemble_energy, assemble_linear, assemble_load, assemble_stiffness_mass, element_matrix,
};
pub use kerr::{KerrData, KerrLinearization};
pub use problem::{penalty_gamma, KerrScaling, Load, NlhProblem, Penalty, Wavenumber};
pub use sparse::{ComplexSparseMatrix, CsrMatrix, DofMap};

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("mesh and problem do not match: {0}")]
    Mismatch(String),
    #[error("invalid problem parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Region over which norms are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormRegion {
    /// Physical domain `|x| < R` (Kerr disk and annulus).
    Omega,
    /// Whole computational disk including the layer.
    Domain,
    /// Absorbing layer only.
    Layer,
}

impl NormRegion {
    pub fn contains(self, region: Region) -> bool {
        match self {
            NormRegion::Omega => region.in_omega(),
            NormRegion::Domain => true,
            NormRegion::Layer => !region.in_omega(),
        }
    }
}

/// A problem together with all matrices that do not depend on the iterate.
pub struct NlhSystem<T> {
    problem: NlhProblem<T>,
    dofs: DofMap,
    linear: ComplexSparseMatrix<T>,
    penalty: ComplexSparseMatrix<T>,
    system: ComplexSparseMatrix<T>,
    load: Vec<Complex<T>>,
    energy_domain: CsrMatrix<T>,
    energy_omega: CsrMatrix<T>,
    energy_layer: CsrMatrix<T>,
    kerr: KerrData<T>,
}

impl<T: Real> NlhSystem<T> {
    pub fn new(problem: NlhProblem<T>) -> Result<Self, AssemblyError> {
        problem.validate()?;
        let dofs = DofMap::new(&problem.mesh);
        let linear = assemble_linear(&problem, &dofs);
        let penalty = assemble_cip(&problem, &dofs);
        let system = linear.add(&penalty);
        let load = assemble_load(&problem, &dofs);
        let energy_domain = assemble_energy(&problem, &dofs, |_| true);
        let energy_omega = assemble_energy(&problem, &dofs, Region::in_omega);
        let energy_layer = assemble_energy(&problem, &dofs, |r| !r.in_omega());
        let kerr = KerrData::new(&problem, &dofs);
        Ok(Self { problem, dofs, linear, penalty, system, load, energy_domain, energy_omega, energy_layer, kerr })
    }

    pub fn problem(&self) -> &NlhProblem<T> {
        &self.problem
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    pub fn num_dofs(&self) -> usize {
        self.dofs.len()
    }

    /// Matrix of `a(., .)`.
    pub fn linear_matrix(&self) -> &ComplexSparseMatrix<T> {
        &self.linear
    }

    /// Matrix of `J(., .)`.
    pub fn penalty_matrix(&self) -> &ComplexSparseMatrix<T> {
        &self.penalty
    }

    /// Matrix of `a_h = a + J`.
    pub fn system_matrix(&self) -> &ComplexSparseMatrix<T> {
        &self.system
    }

    /// Load vector `(f, phi_i)`.
    pub fn load(&self) -> &[Complex<T>] {
        &self.load
    }

    /// Real symmetric matrix `E` with `|||v|||^2 = v^H E v` over `region`.
    pub fn energy_matrix(&self, region: NormRegion) -> &CsrMatrix<T> {
        match region {
            NormRegion::Omega => &self.energy_omega,
            NormRegion::Domain => &self.energy_domain,
            NormRegion::Layer => &self.energy_layer,
        }
    }

    pub fn energy_norm(&self, v: &[Complex<T>], region: NormRegion) -> T {
        self.energy_matrix(region).hermitian_form(v).max(T::zero()).sqrt()
    }

    pub fn kerr(&self) -> &KerrData<T> {
        &self.kerr
    }

    /// Replaces the incident wave, updating every quantity that depends on it.
    pub fn set_incident(&mut self, incident: IncidentWave<T>) {
        self.problem.incident = incident;
        self.kerr.set_incident(&incident);
        if matches!(self.problem.load, Load::Transmission | Load::Benchmark) {
            self.load = assemble_load(&self.problem, &self.dofs);
        }
    }

    pub fn kerr_frozen(&self, u: &[Complex<T>]) -> KerrLinearization<T> {
        self.kerr.frozen(u)
    }

    pub fn kerr_modified_newton(&self, u: &[Complex<T>]) -> KerrLinearization<T> {
        self.kerr.modified_newton(u)
    }

    pub fn kerr_newton(&self, u: &[Complex<T>]) -> KerrLinearization<T> {
        self.kerr.newton(u)
    }

    /// `a_h(u, phi_i) - (k^2 eps |u + u_inc|^2 (u + u_inc), phi_i)_{Omega_0} - (f, phi_i)`.
    pub fn nonlinear_residual(&self, u: &[Complex<T>]) -> Vec<Complex<T>> {
        let au = self.system.mul_vec(u);
        let nl = self.kerr.nonlinear_term(u);
        au.iter().zip(&nl).zip(&self.load).map(|((a, n), f)| *a - *n - *f).collect()
    }
}
