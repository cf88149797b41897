//! Incident waves and the closed-form scattering benchmark on the unit disk.
//!
//! The benchmark scattered field is
//! `u = (i pi / 2k) H1(k) J0(kr) - 1/k^2` for `r <= 1` and
//! `u = (i pi / 2k) J1(k) H0(kr)` outside, driven by `u_inc = J0(kr) / k^1.5`.
//! Both pieces and their radial derivatives match at `r = 1` by the Wronskian
//! `J1 Y0 - J0 Y1 = 2 / (pi x)`. The load is `f = 1` on the unit disk minus the
//! Kerr term on the Kerr disk `r <= 1/2`, and zero outside.

use crate::geometry::Region;
use crate::scalar::{lit, Complex, Real};
use crate::specfun::{bessel_j01, bessel_jy01};

/// Radius of the benchmark's physical domain.
pub const BENCHMARK_DOMAIN_RADIUS: f64 = 1.0;
/// Radius of the benchmark's Kerr medium.
pub const BENCHMARK_KERR_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IncidentWave<T> {
    Zero,
    /// `J0(k r) / k^1.5`.
    Bessel {
        k: T,
    },
    /// `amplitude * exp(i k0 x)`.
    Plane {
        amplitude: T,
        k0: T,
    },
}

impl<T: Real> IncidentWave<T> {
    pub fn value(&self, x: [T; 2]) -> Complex<T> {
        match *self {
            IncidentWave::Zero => Complex::new(T::zero(), T::zero()),
            IncidentWave::Bessel { k } => {
                let r = x[0].hypot(x[1]);
                let (j0, _) = bessel_j01(k * r);
                Complex::new(j0 / k.powf(lit(1.5)), T::zero())
            }
            IncidentWave::Plane { amplitude, k0 } => Complex::from_polar(amplitude, k0 * x[0]),
        }
    }

    pub fn gradient(&self, x: [T; 2]) -> [Complex<T>; 2] {
        let zero = Complex::new(T::zero(), T::zero());
        match *self {
            IncidentWave::Zero => [zero, zero],
            IncidentWave::Bessel { k } => {
                let r = x[0].hypot(x[1]);
                if r == T::zero() {
                    return [zero, zero];
                }
                let (_, j1) = bessel_j01(k * r);
                let dr = -k * j1 / k.powf(lit(1.5));
                [Complex::new(dr * x[0] / r, T::zero()), Complex::new(dr * x[1] / r, T::zero())]
            }
            IncidentWave::Plane { k0, .. } => [self.value(x) * Complex::new(T::zero(), k0), zero],
        }
    }

    /// Same wave with the amplitude replaced (plane waves only).
    pub fn with_amplitude(&self, amplitude: T) -> Self {
        match *self {
            IncidentWave::Plane { k0, .. } => IncidentWave::Plane { amplitude, k0 },
            other => other,
        }
    }
}

/// Closed-form scattered field of the benchmark, with cached Bessel constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Benchmark<T> {
    k: T,
    epsilon: T,
    inner_coef: Complex<T>,
    outer_coef: Complex<T>,
}

impl<T: Real> Benchmark<T> {
    /// Benchmark at wave number `k` with Kerr constant `epsilon`.
    pub fn new(k: T, epsilon: T) -> Self {
        let v = bessel_jy01(k);
        let c = Complex::new(T::zero(), T::PI() / (k + k));
        Self { k, epsilon, inner_coef: c * v.h1(), outer_coef: c * v.j1 }
    }

    /// The benchmark choice `epsilon = k^-2`.
    pub fn with_default_epsilon(k: T) -> Self {
        Self::new(k, (k * k).recip())
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn incident(&self) -> IncidentWave<T> {
        IncidentWave::Bessel { k: self.k }
    }

    pub fn scattered(&self, x: [T; 2]) -> Complex<T> {
        let r = x[0].hypot(x[1]);
        let kr = self.k * r;
        if r <= lit(BENCHMARK_DOMAIN_RADIUS) {
            let (j0, _) = bessel_j01(kr);
            self.inner_coef * j0 - (self.k * self.k).recip()
        } else {
            self.outer_coef * bessel_jy01(kr).h0()
        }
    }

    pub fn gradient(&self, x: [T; 2]) -> [Complex<T>; 2] {
        let r = x[0].hypot(x[1]);
        let zero = Complex::new(T::zero(), T::zero());
        if r == T::zero() {
            return [zero, zero];
        }
        let kr = self.k * r;
        let dr = if r <= lit(BENCHMARK_DOMAIN_RADIUS) {
            let (_, j1) = bessel_j01(kr);
            self.inner_coef * (-self.k * j1)
        } else {
            self.outer_coef * bessel_jy01(kr).h1() * (-self.k)
        };
        [dr * (x[0] / r), dr * (x[1] / r)]
    }

    /// Load `f` at a point, regions decided by radius.
    pub fn load(&self, x: [T; 2]) -> Complex<T> {
        let r = x[0].hypot(x[1]);
        let region = if r <= lit(BENCHMARK_KERR_RADIUS) {
            Region::Kerr
        } else if r <= lit(BENCHMARK_DOMAIN_RADIUS) {
            Region::Annulus
        } else {
            Region::Pml
        };
        self.load_in(region, x)
    }

    /// Load `f` at a point attributed to `region`.
    pub fn load_in(&self, region: Region, x: [T; 2]) -> Complex<T> {
        let one = Complex::new(T::one(), T::zero());
        match region {
            Region::Pml => Complex::new(T::zero(), T::zero()),
            Region::Annulus => one,
            Region::Kerr => {
                let w = self.scattered(x) + self.incident().value(x);
                one - w * (w.norm_sqr() * self.k * self.k * self.epsilon)
            }
        }
    }
}

/// Scattered benchmark field at `x`.
pub fn exact_scattered<T: Real>(k: T, x: [T; 2]) -> Complex<T> {
    Benchmark::with_default_epsilon(k).scattered(x)
}

/// Gradient of the scattered benchmark field at `x`.
pub fn exact_gradient<T: Real>(k: T, x: [T; 2]) -> [Complex<T>; 2] {
    Benchmark::with_default_epsilon(k).gradient(x)
}

/// Benchmark load at `x` for the Kerr constant `epsilon`.
pub fn manufactured_load<T: Real>(k: T, epsilon: T, x: [T; 2]) -> Complex<T> {
    Benchmark::new(k, epsilon).load(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::hankel1;

    #[test]
    fn value_at_origin() {
        let k = 10.0;
        let expected = Complex::new(0.0, std::f64::consts::PI / 20.0) * hankel1(1, 10.0).unwrap() - 0.01;
        assert!((exact_scattered(k, [0.0, 0.0]) - expected).norm() < 1e-15);
        assert_eq!(exact_gradient(k, [0.0, 0.0]), [Complex::new(0.0, 0.0); 2]);
    }

    #[test]
    fn incident_values() {
        let plane = IncidentWave::Plane { amplitude: 1.0, k0: 5.4 };
        assert_eq!(plane.value([0.0, 0.37]), Complex::new(1.0, 0.0));
        let bessel = IncidentWave::Bessel { k: 10.0 };
        assert!((bessel.value([0.0, 0.0]).re - 10f64.powf(-1.5)).abs() < 1e-16);
        let g = plane.gradient([0.3, 0.1]);
        assert!((g[0] - plane.value([0.3, 0.1]) * Complex::new(0.0, 5.4)).norm() < 1e-15);
        assert_eq!(g[1], Complex::new(0.0, 0.0));
        assert_eq!(IncidentWave::<f64>::Zero.value([1.0, 1.0]), Complex::new(0.0, 0.0));
    }

    #[test]
    fn load_regions() {
        let b = Benchmark::with_default_epsilon(10.0);
        assert_eq!(b.load([0.75, 0.0]), Complex::new(1.0, 0.0));
        assert_eq!(b.load([0.0, 1.5]), Complex::new(0.0, 0.0));
        let x = [0.25, 0.0];
        let w = b.scattered(x) + b.incident().value(x);
        let expected = Complex::new(1.0, 0.0) - w * w.norm_sqr();
        assert!((b.load(x) - expected).norm() < 1e-15);
    }

    #[test]
    fn amplitude_replacement() {
        let p = IncidentWave::Plane { amplitude: 2.0, k0: 5.4 };
        assert_eq!(p.with_amplitude(3.0), IncidentWave::Plane { amplitude: 3.0, k0: 5.4 });
        let b = IncidentWave::Bessel { k: 1.0 };
        assert_eq!(b.with_amplitude(3.0), b);
    }
}
