//! Error norms against closed-form solutions, the energy norm, the data
//! functional `M(f)` and convergence orders.

use thiserror::Error;

use crate::assembly::{Element, NlhSystem, NormRegion};
use crate::geometry::Region;
use crate::quadrature::QuadratureRule;
use crate::scalar::{to_f64, Complex, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("region {0:?} contains no elements")]
    EmptyRegion(NormRegion),
    #[error("order fit needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("order fit requires positive errors, got {0} at position {1}")]
    NonPositive(f64, usize),
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Errors of a discrete solution against a reference function over one region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub region: NormRegion,
    pub rel_l2: f64,
    pub rel_h1: f64,
    pub rel_energy: f64,
    /// Absolute error norms.
    pub err_l2: f64,
    pub err_h1: f64,
    pub err_energy: f64,
    /// Norms of the reference function.
    pub ref_l2: f64,
    pub ref_h1: f64,
    pub ref_energy: f64,
    pub dofs: usize,
    pub h_max: f64,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else if a == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Squared L2, squared gradient and energy-density integrals accumulated
/// elementwise and summed pairwise at the end.
#[derive(Default, Clone, Copy)]
struct Integrals {
    l2: f64,
    grad: f64,
    energy: f64,
}

fn pairwise_sum(values: &[Integrals]) -> Integrals {
    match values.len() {
        0 => Integrals::default(),
        1 => values[0],
        n => {
            let (a, b) = (pairwise_sum(&values[..n / 2]), pairwise_sum(&values[n / 2..]));
            Integrals { l2: a.l2 + b.l2, grad: a.grad + b.grad, energy: a.energy + b.energy }
        }
    }
}

/// Integrates `|v|^2`, `|grad v|^2` and `Re(A grad v . conj grad v) + k^2 (2 - Re B) |v|^2`
/// over `region`, where `v` is produced pointwise by `field`.
fn integrate<T: Real>(
    system: &NlhSystem<T>,
    region: NormRegion,
    field: impl Fn(usize, &Element<T>, usize) -> (Complex<T>, [Complex<T>; 2]),
) -> Result<Integrals, MetricsError> {
    let problem = system.problem();
    let mesh = &problem.mesh;
    let rule = QuadratureRule::degree4();
    let mut per_element = Vec::new();
    for t in 0..mesh.num_triangles() {
        let tag = mesh.regions()[t];
        if !region.contains(tag) {
            continue;
        }
        let el = Element::new(mesh, t, &rule);
        let k = problem.wavenumber.at(tag);
        let mut acc = Integrals::default();
        for q in 0..el.points.len() {
            let (v, g) = field(t, &el, q);
            let c = problem.pml.coefficients_in(tag, el.points[q]);
            let ag = [c.a[0][0] * g[0] + c.a[0][1] * g[1], c.a[1][0] * g[0] + c.a[1][1] * g[1]];
            let flux = (ag[0] * g[0].conj() + ag[1] * g[1].conj()).re;
            let w = to_f64(el.weights[q]);
            let (l2, grad) = (to_f64(v.norm_sqr()), to_f64(g[0].norm_sqr() + g[1].norm_sqr()));
            let k2 = to_f64(k * k);
            acc.l2 += w * l2;
            acc.grad += w * grad;
            acc.energy += w * (to_f64(flux) + k2 * (2.0 - to_f64(c.b.re)) * l2);
        }
        per_element.push(acc);
    }
    if per_element.is_empty() {
        return Err(MetricsError::EmptyRegion(region));
    }
    Ok(pairwise_sum(&per_element))
}

fn fe_value<T: Real>(nodal: &[Complex<T>], el: &Element<T>, q: usize) -> (Complex<T>, [Complex<T>; 2]) {
    let mut v = Complex::new(T::zero(), T::zero());
    let mut g = [v, v];
    for a in 0..3 {
        let u = nodal[el.vertices[a]];
        v = v + u * el.basis[q][a];
        g[0] = g[0] + u * el.grads[a][0];
        g[1] = g[1] + u * el.grads[a][1];
    }
    (v, g)
}

fn check_len<T: Real>(system: &NlhSystem<T>, u: &[Complex<T>]) -> Result<(), MetricsError> {
    if u.len() == system.num_dofs() {
        Ok(())
    } else {
        Err(MetricsError::DimensionMismatch { expected: system.num_dofs(), got: u.len() })
    }
}

/// Relative L2, full H1 and energy errors of the P1 function `u` against
/// `exact` with gradient `gradient`, integrated over `region`.
pub fn error_against_exact<T: Real>(
    system: &NlhSystem<T>,
    u: &[Complex<T>],
    exact: impl Fn([T; 2]) -> Complex<T>,
    gradient: impl Fn([T; 2]) -> [Complex<T>; 2],
    region: NormRegion,
) -> Result<ErrorReport, MetricsError> {
    check_len(system, u)?;
    let nodal = system.dofs().expand(u);
    let err = integrate(system, region, |_, el, q| {
        let (v, g) = fe_value(&nodal, el, q);
        let x = el.points[q];
        let (e, eg) = (exact(x), gradient(x));
        (v - e, [g[0] - eg[0], g[1] - eg[1]])
    })?;
    let reference = integrate(system, region, |_, el, q| {
        let x = el.points[q];
        (exact(x), gradient(x))
    })?;
    let (err_l2, ref_l2) = (err.l2.sqrt(), reference.l2.sqrt());
    let (err_h1, ref_h1) = ((err.l2 + err.grad).sqrt(), (reference.l2 + reference.grad).sqrt());
    let (err_energy, ref_energy) = (err.energy.max(0.0).sqrt(), reference.energy.max(0.0).sqrt());
    Ok(ErrorReport {
        region,
        rel_l2: ratio(err_l2, ref_l2),
        rel_h1: ratio(err_h1, ref_h1),
        rel_energy: ratio(err_energy, ref_energy),
        err_l2,
        err_h1,
        err_energy,
        ref_l2,
        ref_h1,
        ref_energy,
        dofs: system.num_dofs(),
        h_max: to_f64(system.problem().mesh.h_max()),
    })
}

/// Energy norm of a P1 function by direct quadrature (no assembled matrices).
pub fn energy_norm_quadrature<T: Real>(
    system: &NlhSystem<T>,
    u: &[Complex<T>],
    region: NormRegion,
) -> Result<f64, MetricsError> {
    check_len(system, u)?;
    let nodal = system.dofs().expand(u);
    let i = integrate(system, region, |_, el, q| fe_value(&nodal, el, q))?;
    Ok(i.energy.max(0.0).sqrt())
}

/// `(Re a(v, v) + 2 k^2 ||v||^2)^(1/2)` over `region` from the assembled forms.
pub fn energy_norm<T: Real>(system: &NlhSystem<T>, v: &[Complex<T>], region: NormRegion) -> T {
    system.energy_norm(v, region)
}

/// Nodal interpolant at the unknowns.
pub fn interpolate<T: Real>(system: &NlhSystem<T>, f: impl Fn([T; 2]) -> Complex<T>) -> Vec<Complex<T>> {
    let mesh = &system.problem().mesh;
    (0..system.num_dofs()).map(|d| f(mesh.vertices()[system.dofs().vertex(d)])).collect()
}

/// `M(f) = ||f||_{0, Omega} + k^2 eps ||u_inc||^3_{L^6(Omega_0)}` by quadrature.
pub fn compute_mf<T: Real>(system: &NlhSystem<T>) -> f64 {
    let problem = system.problem();
    let mesh = &problem.mesh;
    let rule = QuadratureRule::degree4();
    let (mut f2, mut inc6) = (0.0, 0.0);
    for t in 0..mesh.num_triangles() {
        let tag = mesh.regions()[t];
        if !tag.in_omega() {
            continue;
        }
        let el = Element::new(mesh, t, &rule);
        for q in 0..el.points.len() {
            let w = to_f64(el.weights[q]);
            f2 += w * to_f64(problem.load_value(tag, el.points[q]).norm_sqr());
            if tag == Region::Kerr {
                inc6 += w * to_f64(problem.incident.value(el.points[q]).norm_sqr()).powi(3);
            }
        }
    }
    f2.sqrt() + to_f64(problem.kerr_coefficient()) * inc6.sqrt()
}

/// Interval orders and least-squares slope of a convergence sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    /// Entry `i` compares interval `(e_i, e_{i+1})` with the previous one:
    /// `(log e_{i+1} - log e_i) / (log e_i - log e_{i-1})`; the first is undefined.
    pub interval_orders: Vec<Option<f64>>,
    /// Slope of `log e` against `log x` by least squares, absent when some
    /// `x` is not positive or all `x` coincide.
    pub slope: Option<f64>,
}

/// Convergence orders of `(x, e)` pairs, where `x` is a mesh size or a step index.
pub fn order_fit(pairs: &[(f64, f64)]) -> Result<OrderFit, MetricsError> {
    if pairs.len() < 2 {
        return Err(MetricsError::TooFewPoints { needed: 2, got: pairs.len() });
    }
    for (i, &(_, e)) in pairs.iter().enumerate() {
        if !(e > 0.0) {
            return Err(MetricsError::NonPositive(e, i));
        }
    }
    let le: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let interval_orders = (1..pairs.len())
        .map(|i| if i == 1 { None } else { Some((le[i] - le[i - 1]) / (le[i - 1] - le[i - 2])) })
        .collect();
    let slope = if pairs.iter().all(|p| p.0 > 0.0) {
        let lx: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
        let n = pairs.len() as f64;
        let (mx, me) = (lx.iter().sum::<f64>() / n, le.iter().sum::<f64>() / n);
        let cov: f64 = lx.iter().zip(&le).map(|(x, e)| (x - mx) * (e - me)).sum();
        let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
        (var > 0.0).then(|| cov / var)
    } else {
        None
    };
    Ok(OrderFit { interval_orders, slope })
}

/// Per-step orders of an iteration error sequence `e_0, e_1, ...`, where
/// `e_0` is the error of the initial guess. Entry `l` is the order reported
/// at step `l`; steps 0 and 1 have none.
pub fn step_orders(errors: &[f64]) -> Vec<Option<f64>> {
    (0..errors.len())
        .map(|l| {
            if l < 2 {
                return None;
            }
            let (a, b, c) = (errors[l - 2], errors[l - 1], errors[l]);
            if a > 0.0 && b > 0.0 && c > 0.0 && a != b {
                Some((c.ln() - b.ln()) / (b.ln() - a.ln()))
            } else {
                None
            }
        })
        .collect()
}
