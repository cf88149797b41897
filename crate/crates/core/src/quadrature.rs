//! Symmetric quadrature on triangles.

use crate::scalar::{lit, Real};

/// Points in barycentric coordinates with weights summing to the
/// reference-triangle area 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    pub points: Vec<[T; 3]>,
    pub weights: Vec<T>,
    pub degree: u32,
}

impl<T: Real> QuadratureRule<T> {
    /// Six-point rule exact for polynomials of degree 4.
    #[allow(clippy::excessive_precision)]
    pub fn degree4() -> Self {
        let groups =
            [(0.445_948_490_915_964_9, 0.223_381_589_678_011_47), (0.091_576_213_509_770_74, 0.109_951_743_655_321_87)];
        let mut points = Vec::with_capacity(6);
        let mut weights = Vec::with_capacity(6);
        for (a, w) in groups {
            let b = 1.0 - 2.0 * a;
            for p in [[b, a, a], [a, b, a], [a, a, b]] {
                points.push(p.map(lit::<T>));
                weights.push(lit::<T>(0.5 * w));
            }
        }
        Self { points, weights, degree: 4 }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Physical quadrature points of a triangle.
    pub fn map_points(&self, tri: &[[T; 2]; 3]) -> Vec<[T; 2]> {
        self.points
            .iter()
            .map(|l| {
                [
                    l[0] * tri[0][0] + l[1] * tri[1][0] + l[2] * tri[2][0],
                    l[0] * tri[0][1] + l[1] * tri[1][1] + l[2] * tri[2][1],
                ]
            })
            .collect()
    }
}
