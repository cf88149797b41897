//! Circular PML medium and the Cartesian coefficients `A(x)`, `B(x)`.
//!
//! With `alpha = 1 + i sigma`, `beta = 1 + i delta` the PML operator is
//! `div(A grad u) + k^2 B u` where `A = H diag(beta/alpha, alpha/beta) H^T`,
//! `H` is the rotation by the polar angle and `B = alpha beta`.

use thiserror::Error;

use crate::geometry::Region;
use crate::scalar::{to_f64, Complex, Real};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PmlError {
    #[error("PML requires sigma0 > 0 and 0 < R < R_hat, got sigma0 = {0}, R = {1}, R_hat = {2}")]
    InvalidProfile(f64, f64, f64),
}

/// Constant-strength medium profile on the annulus `R < r < R_hat`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmlProfile<T> {
    sigma0: T,
    inner_radius: T,
    outer_radius: T,
}

/// Coefficients of the PML operator at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmlCoefficients<T> {
    pub a: [[Complex<T>; 2]; 2],
    pub b: Complex<T>,
}

impl<T: Real> PmlCoefficients<T> {
    pub fn identity() -> Self {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        Self { a: [[one, zero], [zero, one]], b: one }
    }
}

impl<T: Real> PmlProfile<T> {
    pub fn new(sigma0: T, inner_radius: T, outer_radius: T) -> Result<Self, PmlError> {
        if sigma0 > T::zero() && inner_radius > T::zero() && inner_radius < outer_radius && outer_radius.is_finite() {
            Ok(Self { sigma0, inner_radius, outer_radius })
        } else {
            Err(PmlError::InvalidProfile(to_f64(sigma0), to_f64(inner_radius), to_f64(outer_radius)))
        }
    }

    /// Profile from the strength, interface radius and layer thickness.
    pub fn with_thickness(sigma0: T, inner_radius: T, thickness: T) -> Result<Self, PmlError> {
        Self::new(sigma0, inner_radius, inner_radius + thickness)
    }

    pub fn sigma0(&self) -> T {
        self.sigma0
    }

    pub fn inner_radius(&self) -> T {
        self.inner_radius
    }

    pub fn outer_radius(&self) -> T {
        self.outer_radius
    }

    pub fn thickness(&self) -> T {
        self.outer_radius - self.inner_radius
    }

    /// `(sigma(r), delta(r))`.
    pub fn sigma_delta(&self, r: T) -> (T, T) {
        if r <= self.inner_radius {
            (T::zero(), T::zero())
        } else {
            (self.sigma0, self.sigma0 * (r - self.inner_radius) / r)
        }
    }

    /// Pointwise coefficients at `x`.
    pub fn coefficients_at(&self, x: [T; 2]) -> PmlCoefficients<T> {
        let r = x[0].hypot(x[1]);
        let (sigma, delta) = self.sigma_delta(r);
        coefficients(x, r, sigma, delta)
    }

    /// Coefficients for a quadrature point of an element tagged `region`.
    ///
    /// Elements are straight-edged, so layer elements next to the interface
    /// contain points slightly inside `r = R`. The layer strength is applied
    /// on every point of a layer element and never inside the physical domain.
    pub fn coefficients_in(&self, region: Region, x: [T; 2]) -> PmlCoefficients<T> {
        if region.in_omega() {
            return PmlCoefficients::identity();
        }
        let r = x[0].hypot(x[1]);
        let delta = (self.sigma0 * (r - self.inner_radius) / r).max(T::zero());
        coefficients(x, r, self.sigma0, delta)
    }
}

fn coefficients<T: Real>(x: [T; 2], r: T, sigma: T, delta: T) -> PmlCoefficients<T> {
    if sigma == T::zero() && delta == T::zero() {
        return PmlCoefficients::identity();
    }
    let alpha = Complex::new(T::one(), sigma);
    let beta = Complex::new(T::one(), delta);
    let d1 = beta / alpha;
    let d2 = alpha / beta;
    let (c, s) = if r > T::zero() { (x[0] / r, x[1] / r) } else { (T::one(), T::zero()) };
    let a11 = d1 * (c * c) + d2 * (s * s);
    let a22 = d1 * (s * s) + d2 * (c * c);
    let a12 = (d1 - d2) * (c * s);
    PmlCoefficients { a: [[a11, a12], [a12, a22]], b: alpha * beta }
}

/// One sub-condition of the parameter-regime check.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl ConditionCheck {
    fn new(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Self { name, lhs, rhs, holds: lhs >= rhs }
    }

    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<ConditionCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, c) in self.checks.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let verdict = if c.holds { "ok" } else { "FAIL" };
            write!(f, "{}: {:.4} >= {:.4} ({verdict}, margin {:.4})", c.name, c.lhs, c.rhs, c.margin())?;
        }
        Ok(())
    }
}

/// Checks `kR >= 1` and `k sigma0 L >= max(2kR + sqrt(3) kL, 10)`.
pub fn validate_params<T: Real>(k: T, profile: &PmlProfile<T>) -> ValidationReport {
    let k = to_f64(k);
    let r = to_f64(profile.inner_radius);
    let l = to_f64(profile.thickness());
    let s = to_f64(profile.sigma0);
    let ksl = k * s * l;
    ValidationReport {
        checks: vec![
            ConditionCheck::new("kR >= 1", k * r, 1.0),
            ConditionCheck::new("k*sigma0*L >= 2kR + sqrt(3)kL", ksl, 2.0 * k * r + 3f64.sqrt() * k * l),
            ConditionCheck::new("k*sigma0*L >= 10", ksl, 10.0),
        ],
    }
}
