//! The two numerical configurations studied: the closed-form benchmark on the
//! unit disk and the bistable transmission problem.

use crate::analytic::{Benchmark, IncidentWave};
use crate::assembly::{AssemblyError, Load, NlhProblem, Penalty, Wavenumber};
use crate::geometry::{build_disk_mesh, build_refined, DiskRadii, Mesh, MeshError};
use crate::pml::PmlProfile;
use crate::scalar::{lit, Real};

/// Radius of the Kerr disk in both configurations.
pub const KERR_RADIUS: f64 = 0.5;
/// Radius of the physical domain in both configurations.
pub const DOMAIN_RADIUS: f64 = 1.0;

pub const BENCHMARK_SIGMA0: f64 = 4.0;
pub const BENCHMARK_THICKNESS: f64 = 1.0;
/// Mesh size of refinement level 0 for the benchmark.
pub const BENCHMARK_BASE_H: f64 = 0.2;

pub const BISTABILITY_K0: f64 = 5.4;
pub const BISTABILITY_K1_RATIO: f64 = 3.5;
pub const BISTABILITY_EPSILON: f64 = 1e-12;
pub const BISTABILITY_SIGMA0: f64 = 10.0;
pub const BISTABILITY_THICKNESS: f64 = 0.25;

fn radii<T: Real>(thickness: T) -> Result<DiskRadii<T>, MeshError> {
    DiskRadii::new(lit(KERR_RADIUS), lit(DOMAIN_RADIUS), lit::<T>(DOMAIN_RADIUS) + thickness)
}

/// Benchmark mesh at refinement `level` of the base mesh.
pub fn benchmark_mesh<T: Real>(level: usize, thickness: T) -> Result<Mesh<T>, MeshError> {
    build_refined(radii(thickness)?, lit(BENCHMARK_BASE_H), level)
}

/// Benchmark mesh built directly at mesh size `h`.
pub fn benchmark_mesh_h<T: Real>(h: T, thickness: T) -> Result<Mesh<T>, MeshError> {
    build_disk_mesh(radii(thickness)?, h)
}

/// Closed-form benchmark at wave number `k` with `eps = k^-2`; the layer
/// thickness is taken from the mesh.
pub fn benchmark_problem<T: Real>(
    mesh: Mesh<T>,
    k: T,
    sigma0: T,
    penalty: Penalty<T>,
) -> Result<NlhProblem<T>, AssemblyError> {
    let bench = Benchmark::with_default_epsilon(k);
    let r = mesh.radii();
    let pml =
        PmlProfile::new(sigma0, r.interface, r.outer).map_err(|e| AssemblyError::InvalidParameter(e.to_string()))?;
    NlhProblem::new(mesh, pml, Wavenumber::constant(k), bench.epsilon(), bench.incident(), Load::Benchmark, penalty)
}

/// Mesh for the bistable configuration at mesh size `h`.
pub fn bistability_mesh<T: Real>(h: T) -> Result<Mesh<T>, MeshError> {
    build_disk_mesh(radii(lit(BISTABILITY_THICKNESS))?, h)
}

/// Plane wave of amplitude `amplitude` hitting the high-index Kerr disk.
pub fn bistability_problem<T: Real>(
    mesh: Mesh<T>,
    amplitude: T,
    epsilon: T,
    penalty: Penalty<T>,
) -> Result<NlhProblem<T>, AssemblyError> {
    let k0: T = lit(BISTABILITY_K0);
    let r = mesh.radii();
    let pml = PmlProfile::new(lit(BISTABILITY_SIGMA0), r.interface, r.outer)
        .map_err(|e| AssemblyError::InvalidParameter(e.to_string()))?;
    NlhProblem::new(
        mesh,
        pml,
        Wavenumber { background: k0, kerr: k0 * lit(BISTABILITY_K1_RATIO) },
        epsilon,
        IncidentWave::Plane { amplitude, k0 },
        Load::Transmission,
        penalty,
    )
}
