//! Problem description: mesh, medium, nonlinearity, data and penalty rule.

use crate::analytic::{Benchmark, IncidentWave};
use crate::geometry::{Mesh, Region};
use crate::pml::PmlProfile;
use crate::scalar::{lit, to_f64, Complex, Real};

use super::AssemblyError;

/// Piecewise-constant wave number: `kerr` on the Kerr disk, `background` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber<T> {
    pub background: T,
    pub kerr: T,
}

impl<T: Real> Wavenumber<T> {
    pub fn constant(k: T) -> Self {
        Self { background: k, kerr: k }
    }

    pub fn at(&self, region: Region) -> T {
        match region {
            Region::Kerr => self.kerr,
            _ => self.background,
        }
    }
}

/// Wave number multiplying `eps` in the Kerr coefficient `k^2 eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KerrScaling {
    /// Background wave number `k_0`.
    #[default]
    Background,
    /// Wave number of the Kerr medium.
    Local,
}

/// Right-hand side `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Load<T> {
    Zero,
    /// Load of the closed-form benchmark at the background wave number and the
    /// problem's Kerr constant.
    Benchmark,
    /// `(k1^2 - k0^2) u_inc` on the Kerr disk.
    Transmission,
    /// Constant value on the physical domain.
    Constant(Complex<T>),
}

/// Edge penalty parameter rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty<T> {
    /// Plain FEM.
    None,
    /// Dispersion-optimised rule for equilateral meshes.
    Dispersion,
    Constant(Complex<T>),
}

impl<T: Real> Penalty<T> {
    pub fn gamma(&self, k: T, h_e: T) -> Complex<T> {
        match *self {
            Penalty::None => Complex::new(T::zero(), T::zero()),
            Penalty::Dispersion => penalty_gamma(k, h_e),
            Penalty::Constant(g) => g,
        }
    }
}

/// `gamma_e = -sqrt(3)/24 - sqrt(3)/1728 (k h_e)^2`.
pub fn penalty_gamma<T: Real>(k: T, h_e: T) -> Complex<T> {
    let sqrt3 = lit::<T>(3.0).sqrt();
    let kh = k * h_e;
    Complex::new(-sqrt3 / lit(24.0) - sqrt3 / lit(1728.0) * kh * kh, T::zero())
}

/// Complete description of one discrete nonlinear Helmholtz problem.
#[derive(Debug, Clone)]
pub struct NlhProblem<T> {
    pub mesh: Mesh<T>,
    pub pml: PmlProfile<T>,
    pub wavenumber: Wavenumber<T>,
    pub kerr_epsilon: T,
    pub incident: IncidentWave<T>,
    pub load: Load<T>,
    pub penalty: Penalty<T>,
    pub kerr_scaling: KerrScaling,
}

impl<T: Real> NlhProblem<T> {
    pub fn new(
        mesh: Mesh<T>,
        pml: PmlProfile<T>,
        wavenumber: Wavenumber<T>,
        kerr_epsilon: T,
        incident: IncidentWave<T>,
        load: Load<T>,
        penalty: Penalty<T>,
    ) -> Result<Self, AssemblyError> {
        let problem =
            Self { mesh, pml, wavenumber, kerr_epsilon, incident, load, penalty, kerr_scaling: KerrScaling::default() };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<(), AssemblyError> {
        let radii = self.mesh.radii();
        let tol = lit::<T>(1e-12);
        let same = |a: T, b: T| (a - b).abs() <= tol * b.abs().max(T::one());
        if !same(radii.interface, self.pml.inner_radius()) || !same(radii.outer, self.pml.outer_radius()) {
            return Err(AssemblyError::Mismatch(format!(
                "mesh radii (R = {}, R_hat = {}) differ from the PML profile (R = {}, R_hat = {})",
                radii.interface,
                radii.outer,
                self.pml.inner_radius(),
                self.pml.outer_radius()
            )));
        }
        let k = self.wavenumber;
        if !(k.background > T::zero() && k.kerr > T::zero() && k.background.is_finite() && k.kerr.is_finite()) {
            return Err(AssemblyError::InvalidParameter("wave numbers must be positive and finite".into()));
        }
        if !(self.kerr_epsilon >= T::zero() && self.kerr_epsilon.is_finite()) {
            return Err(AssemblyError::InvalidParameter(format!(
                "Kerr constant must be nonnegative, got {}",
                to_f64(self.kerr_epsilon)
            )));
        }
        if let Penalty::Constant(g) = self.penalty {
            if g.im > T::zero() {
                return Err(AssemblyError::InvalidParameter(
                    "penalty parameter must have nonpositive imaginary part".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn with_kerr_scaling(mut self, scaling: KerrScaling) -> Self {
        self.kerr_scaling = scaling;
        self
    }

    /// Coefficient `k^2 eps` of the Kerr term.
    pub fn kerr_coefficient(&self) -> T {
        let k = match self.kerr_scaling {
            KerrScaling::Background => self.wavenumber.background,
            KerrScaling::Local => self.wavenumber.kerr,
        };
        k * k * self.kerr_epsilon
    }

    /// `f` at a quadrature point of an element tagged `region`.
    pub fn load_value(&self, region: Region, x: [T; 2]) -> Complex<T> {
        let zero = Complex::new(T::zero(), T::zero());
        match self.load {
            Load::Zero => zero,
            Load::Benchmark => Benchmark::new(self.wavenumber.background, self.kerr_epsilon).load_in(region, x),
            Load::Transmission => match region {
                Region::Kerr => {
                    let k = self.wavenumber;
                    self.incident.value(x) * (k.kerr * k.kerr - k.background * k.background)
                }
                _ => zero,
            },
            Load::Constant(c) => {
                if region.in_omega() {
                    c
                } else {
                    zero
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn penalty_values() {
        let g0 = penalty_gamma(1.0_f64, 0.0);
        assert!((g0.re + 0.072_168_783_648_703_22).abs() < 1e-16);
        let g = penalty_gamma(1.0, std::f64::consts::PI / 5.0);
        assert!((g.re + 0.072_564_493_284_659_05).abs() < 1e-15);
        assert_eq!(g.im, 0.0);
        assert!(penalty_gamma(10.0, 0.01).re > penalty_gamma(10.0, 0.02).re);
        assert_eq!(Penalty::<f64>::None.gamma(10.0, 0.1), Complex::new(0.0, 0.0));
    }
}
