//! Bessel functions `J_0`, `J_1`, `Y_0`, `Y_1` and the Hankel function
//! `H^(1)_n = J_n + i Y_n` for real arguments.
//!
//! For `x <= 20` the functions of the first kind come from Miller's backward
//! recurrence normalised by `J_0 + 2 sum J_2k = 1`; `Y_0` and `Y_1` follow from
//! the Neumann series over the same `J_n` values. Beyond that the Hankel
//! asymptotic expansion is summed to its smallest term, which at `x = 20` is
//! already below double precision.

use thiserror::Error;

use crate::scalar::{lit, to_f64, Complex, Real};

/// Arguments above this use the Hankel asymptotic expansion.
pub const ASYMPTOTIC_THRESHOLD: f64 = 20.0;

/// Smallest argument accepted by the second-kind functions.
pub const Y_MIN_ARGUMENT: f64 = 1e-8;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecFunError {
    #[error("argument {0} is outside the domain of the function")]
    Domain(f64),
    #[error("unsupported Bessel order {0} (only 0 and 1 are available)")]
    UnsupportedOrder(u32),
}

/// `J_0, J_1, Y_0, Y_1` evaluated at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselValues<T> {
    pub j0: T,
    pub j1: T,
    pub y0: T,
    pub y1: T,
}

impl<T: Real> BesselValues<T> {
    pub fn h0(&self) -> Complex<T> {
        Complex::new(self.j0, self.y0)
    }

    pub fn h1(&self) -> Complex<T> {
        Complex::new(self.j1, self.y1)
    }
}

fn check_order(order: u32) -> Result<(), SpecFunError> {
    if order > 1 {
        Err(SpecFunError::UnsupportedOrder(order))
    } else {
        Ok(())
    }
}

/// Bessel function of the first kind `J_order(x)`, `x >= 0`.
pub fn bessel_j<T: Real>(order: u32, x: T) -> Result<T, SpecFunError> {
    check_order(order)?;
    if !x.is_finite() || x < T::zero() {
        return Err(SpecFunError::Domain(to_f64(x)));
    }
    let (j0, j1) = bessel_j01(x);
    Ok(if order == 0 { j0 } else { j1 })
}

/// Bessel function of the second kind `Y_order(x)`, `x >= 1e-8`.
pub fn bessel_y<T: Real>(order: u32, x: T) -> Result<T, SpecFunError> {
    check_order(order)?;
    let v = bessel_jy01_checked(x)?;
    Ok(if order == 0 { v.y0 } else { v.y1 })
}

/// Hankel function of the first kind `H^(1)_order(x) = J + iY`.
pub fn hankel1<T: Real>(order: u32, x: T) -> Result<Complex<T>, SpecFunError> {
    check_order(order)?;
    let v = bessel_jy01_checked(x)?;
    Ok(if order == 0 { v.h0() } else { v.h1() })
}

/// All four functions at once, with the second-kind domain check.
pub fn bessel_jy01_checked<T: Real>(x: T) -> Result<BesselValues<T>, SpecFunError> {
    if !x.is_finite() || x < lit(Y_MIN_ARGUMENT) {
        return Err(SpecFunError::Domain(to_f64(x)));
    }
    Ok(bessel_jy01(x))
}

/// `(J_0(x), J_1(x))` for finite `x >= 0`. Negative arguments use parity.
pub fn bessel_j01<T: Real>(x: T) -> (T, T) {
    let ax = x.abs();
    if ax == T::zero() {
        return (T::one(), T::zero());
    }
    let (j0, j1) = if to_f64(ax) > ASYMPTOTIC_THRESHOLD {
        let (j0, _) = hankel_asymptotic(0, ax);
        let (j1, _) = hankel_asymptotic(1, ax);
        (j0, j1)
    } else {
        let v = miller(ax, false);
        (v.j0, v.j1)
    };
    if x < T::zero() {
        (j0, -j1)
    } else {
        (j0, j1)
    }
}

/// All four functions for `x > 0` without domain checking.
pub fn bessel_jy01<T: Real>(x: T) -> BesselValues<T> {
    if to_f64(x) > ASYMPTOTIC_THRESHOLD {
        let (j0, y0) = hankel_asymptotic(0, x);
        let (j1, y1) = hankel_asymptotic(1, x);
        BesselValues { j0, j1, y0, y1 }
    } else {
        miller(x, true)
    }
}

fn miller<T: Real>(x: T, with_y: bool) -> BesselValues<T> {
    let xf = to_f64(x);
    let start = 2 * ((xf + 10.0 * xf.cbrt() + 30.0) / 2.0).ceil() as usize;
    let big: T = lit(1e10);
    let two_over_x = lit::<T>(2.0) / x;

    // j[n] for n = 0..=start+1, unnormalised
    let mut j = vec![T::zero(); start + 2];
    j[start] = T::one();
    for n in (1..=start).rev() {
        j[n - 1] = T::from_usize(n).unwrap() * two_over_x * j[n] - j[n + 1];
        if j[n - 1].abs() > big {
            let s = big.recip();
            for v in &mut j[n - 1..] {
                *v = *v * s;
            }
        }
    }

    let mut norm = j[0];
    let mut k = 2;
    while k <= start {
        norm = norm + lit::<T>(2.0) * j[k];
        k += 2;
    }
    let scale = norm.recip();
    for v in &mut j {
        *v = *v * scale;
    }

    let (j0, j1) = (j[0], j[1]);
    if !with_y {
        return BesselValues { j0, j1, y0: T::nan(), y1: T::nan() };
    }

    let two_over_pi = T::FRAC_2_PI();
    let log_term = (x / lit(2.0)).ln() + lit(EULER_GAMMA);
    let mut s0 = T::zero();
    let mut s1 = T::zero();
    let mut k = 1;
    while 2 * k < start {
        let kk = T::from_usize(k).unwrap();
        let sign = if k % 2 == 1 { -T::one() } else { T::one() };
        s0 = s0 + sign * j[2 * k] / kk;
        s1 = s1 + sign * (j[2 * k - 1] - j[2 * k + 1]) / kk;
        k += 1;
    }
    let y0 = two_over_pi * (log_term * j0) - lit::<T>(2.0) * two_over_pi * s0;
    let y1 = two_over_pi * (log_term * j1 - j0 / x) + two_over_pi * s1;
    BesselValues { j0, j1, y0, y1 }
}

/// `(J_nu(x), Y_nu(x))` from the Hankel expansion, `nu` in {0, 1}.
fn hankel_asymptotic<T: Real>(nu: u32, x: T) -> (T, T) {
    let mu = lit::<T>(4.0 * f64::from(nu * nu));
    let eight_x = lit::<T>(8.0) * x;
    let tiny = T::epsilon() * lit(1e-2);

    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let mut last = T::infinity();
    for k in 1..200usize {
        let odd = T::from_usize(2 * k - 1).unwrap();
        term = term * (mu - odd * odd) / (T::from_usize(k).unwrap() * eight_x);
        let mag = term.abs();
        if mag > last {
            break;
        }
        let sign = if (k / 2) % 2 == 0 { T::one() } else { -T::one() };
        if k % 2 == 1 {
            q = q + sign * term;
        } else {
            p = p + sign * term;
        }
        if mag < tiny {
            break;
        }
        last = mag;
    }

    let phase = T::PI() * lit(0.5 * f64::from(nu) + 0.25);
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    let amp = (T::FRAC_2_PI() / x).sqrt();
    (amp * (p * cos_chi - q * sin_chi), amp * (p * sin_chi + q * cos_chi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(bessel_j(0, 0.0_f64).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0_f64).unwrap(), 0.0);
    }

    #[test]
    fn reference_values_at_one() {
        assert!(rel(bessel_j(0, 1.0_f64).unwrap(), 0.765_197_686_557_966_6) < 1e-14);
        assert!(rel(bessel_j(1, 1.0_f64).unwrap(), 0.440_050_585_744_933_5) < 1e-14);
        assert!(rel(bessel_y(0, 1.0_f64).unwrap(), 0.088_256_964_215_677) < 1e-13);
        assert!(rel(bessel_y(1, 1.0_f64).unwrap(), -0.781_212_821_300_288_7) < 1e-14);
        let h0 = hankel1(0, 1.0_f64).unwrap();
        assert!(rel(h0.re, 0.765_197_686_557_966_6) < 1e-14);
        assert!(rel(h0.im, 0.088_256_964_215_677) < 1e-13);
        let h1 = hankel1(1, 1.0_f64).unwrap();
        assert!(rel(h1.im, -0.781_212_821_300_288_7) < 1e-14);
    }

    #[test]
    fn errors() {
        assert_eq!(bessel_j(2, 1.0_f64), Err(SpecFunError::UnsupportedOrder(2)));
        assert!(matches!(bessel_j(0, -1.0_f64), Err(SpecFunError::Domain(_))));
        assert!(matches!(bessel_j(0, f64::NAN), Err(SpecFunError::Domain(_))));
        assert!(matches!(bessel_y(0, 0.0_f64), Err(SpecFunError::Domain(_))));
        assert!(matches!(bessel_y(0, 1e-12_f64), Err(SpecFunError::Domain(_))));
        assert!(matches!(hankel1(1, -2.0_f64), Err(SpecFunError::Domain(_))));
    }

    #[test]
    fn wronskian_at_one() {
        let v = bessel_jy01(1.0_f64);
        let w = v.j1 * v.y0 - v.j0 * v.y1;
        assert!((w - std::f64::consts::FRAC_2_PI).abs() < 1e-15);
    }

    #[test]
    fn crossover_is_continuous() {
        let lo = miller(ASYMPTOTIC_THRESHOLD, true);
        let (j0, y0) = hankel_asymptotic(0, ASYMPTOTIC_THRESHOLD);
        let (j1, y1) = hankel_asymptotic(1, ASYMPTOTIC_THRESHOLD);
        assert!((lo.j0 - j0).abs() < 1e-15);
        assert!((lo.j1 - j1).abs() < 1e-15);
        assert!((lo.y0 - y0).abs() < 1e-15);
        assert!((lo.y1 - y1).abs() < 1e-15);
    }

    #[test]
    fn single_precision_is_usable() {
        let v = bessel_jy01(1.0_f32);
        assert!((v.j0 - 0.765_197_7).abs() < 1e-6);
        assert!((v.y1 + 0.781_212_8).abs() < 1e-6);
        let (j0, _) = bessel_j01(30.0_f32);
        assert!((j0 - (-0.086_368_f32)).abs() < 2e-6);
    }
}
