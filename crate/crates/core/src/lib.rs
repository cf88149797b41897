//! Finite element and continuous interior penalty solvers for the
//! Kerr-nonlinear Helmholtz equation on a disk truncated by a circular PML.
//!
//! Everything numerical is generic over the real scalar `T: Real` (`f32` or
//! `f64`); the aliases below fix `f64`, which is what the experiments use.

// Element kernels index several parallel arrays by local node; NaN-rejecting
// `!(x > 0)` checks are intentional.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod assembly;
pub mod geometry;
pub mod linsolve;
pub mod metrics;
pub mod nonlinear;
pub mod pml;
pub mod presets;
pub mod quadrature;
pub mod scalar;
pub mod specfun;

pub type Complex64 = scalar::Complex<f64>;
pub type Mesh64 = geometry::Mesh<f64>;
pub type DiskRadii64 = geometry::DiskRadii<f64>;
pub type PmlProfile64 = pml::PmlProfile<f64>;
pub type NlhProblem64 = assembly::NlhProblem<f64>;
pub type NlhSystem64 = assembly::NlhSystem<f64>;
pub type Benchmark64 = analytic::Benchmark<f64>;

pub type Complex32 = scalar::Complex<f32>;
pub type Mesh32 = geometry::Mesh<f32>;
pub type NlhProblem32 = assembly::NlhProblem<f32>;
pub type NlhSystem32 = assembly::NlhSystem<f32>;
