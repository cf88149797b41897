//! Iteration schemes for the discrete Kerr problem, iteration-order tables
//! and amplitude continuation.
//!
//! Every scheme solves for the next iterate directly (not for an increment):
//! `(S + K_l) u^{l+1} [+ Q_l conj(u^{l+1})] = f + g_l`, where `S` is the
//! linear system matrix and `K_l`, `Q_l`, `g_l` come from the Kerr
//! linearization at `u^l`. Iterations stop once the relative energy-norm
//! update `|||u^l - u^{l-1}||| / |||u^l|||` falls below the tolerance.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::assembly::{NlhSystem, NormRegion};
use crate::linsolve::{solve, solve_antilinear, LinearSolveReport, SolveError};
use crate::metrics::step_orders;
use crate::scalar::{lit, norm2, to_f64, Complex, Real};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 1e3;
pub const DEFAULT_JUMP_RATIO: f64 = 1.25;
pub const DEFAULT_REFERENCE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Newton,
    ModifiedNewton,
    Frozen,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Newton, Scheme::ModifiedNewton, Scheme::Frozen];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Newton => "newton",
            Scheme::ModifiedNewton => "modified",
            Scheme::Frozen => "frozen",
        }
    }

    pub fn default_max_iter(self) -> usize {
        match self {
            Scheme::Newton => 50,
            Scheme::ModifiedNewton | Scheme::Frozen => 300,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "newton" => Ok(Scheme::Newton),
            "modified" | "modified-newton" | "modified_newton" => Ok(Scheme::ModifiedNewton),
            "frozen" => Ok(Scheme::Frozen),
            other => Err(format!("unknown scheme '{other}' (expected newton, modified or frozen)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    /// Stop once the relative update is below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative updates above this (or non-finite) abort the iteration.
    pub divergence_threshold: f64,
    /// Region of the energy norm used in the stop criterion.
    pub norm_region: NormRegion,
}

impl IterationOptions {
    pub fn for_scheme(scheme: Scheme) -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: scheme.default_max_iter(),
            divergence_threshold: DEFAULT_DIVERGENCE_THRESHOLD,
            norm_region: NormRegion::Domain,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationStep {
    /// Index `l` of the iterate `u^l` produced by this step, from 1.
    pub step: usize,
    pub relative_update: f64,
    /// `||r(u^l)|| / ||f||`, or the absolute norm when the load vanishes.
    pub relative_residual: f64,
    pub linear: LinearSolveReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub scheme: Scheme,
    pub steps: Vec<IterationStep>,
    pub termination: Termination,
}

impl IterationTrace {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn last_update(&self) -> f64 {
        self.steps.last().map_or(f64::NAN, |s| s.relative_update)
    }

    pub fn final_residual(&self) -> f64 {
        self.steps.last().map_or(f64::NAN, |s| s.relative_residual)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NonlinearError {
    #[error("linear solve failed at step {step}: {source}")]
    LinearSolve { step: usize, source: SolveError },
    #[error("initial guess has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid iteration options: {0}")]
    InvalidOptions(String),
    #[error("reference solution did not converge ({0:?} after {1} steps)")]
    ReferenceNotConverged(Termination, usize),
    #[error("amplitudes must be sorted ascending and nonempty")]
    InvalidAmplitudes,
}

fn relative_update<T: Real>(system: &NlhSystem<T>, new: &[Complex<T>], old: &[Complex<T>], region: NormRegion) -> f64 {
    let diff: Vec<_> = new.iter().zip(old).map(|(a, b)| *a - *b).collect();
    let num = to_f64(system.energy_norm(&diff, region));
    let den = to_f64(system.energy_norm(new, region));
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// `|||u - reference||| / |||reference|||`.
pub fn relative_error<T: Real>(
    system: &NlhSystem<T>,
    u: &[Complex<T>],
    reference: &[Complex<T>],
    region: NormRegion,
) -> f64 {
    let diff: Vec<_> = u.iter().zip(reference).map(|(a, b)| *a - *b).collect();
    let num = to_f64(system.energy_norm(&diff, region));
    let den = to_f64(system.energy_norm(reference, region));
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

/// Residual of the discrete nonlinear equation relative to the load.
pub fn relative_residual<T: Real>(system: &NlhSystem<T>, u: &[Complex<T>]) -> f64 {
    let r = to_f64(norm2(&system.nonlinear_residual(u)));
    let f = to_f64(norm2(system.load()));
    if f > 0.0 {
        r / f
    } else {
        r
    }
}

/// One step of `scheme` from the iterate `u`.
pub fn iterate_once<T: Real>(
    system: &NlhSystem<T>,
    scheme: Scheme,
    u: &[Complex<T>],
) -> Result<(Vec<Complex<T>>, LinearSolveReport), SolveError> {
    let lin = match scheme {
        Scheme::Newton => system.kerr_newton(u),
        Scheme::ModifiedNewton => system.kerr_modified_newton(u),
        Scheme::Frozen => system.kerr_frozen(u),
    };
    let matrix = system.system_matrix().add(&lin.matrix);
    let rhs: Vec<_> = system.load().iter().zip(&lin.rhs).map(|(f, g)| *f + *g).collect();
    match lin.antilinear {
        Some(q) if q.nnz() > 0 => solve_antilinear(&matrix, &q, &rhs),
        _ => solve(&matrix, &rhs),
    }
}

/// Solution of the problem without the Kerr term.
pub fn solve_linear<T: Real>(system: &NlhSystem<T>) -> Result<Vec<Complex<T>>, SolveError> {
    solve(system.system_matrix(), system.load()).map(|(u, _)| u)
}

/// Runs `scheme` from `initial` until the stop criterion, the iteration cap
/// or divergence.
pub fn solve_nlh<T: Real>(
    system: &NlhSystem<T>,
    scheme: Scheme,
    initial: &[Complex<T>],
    options: &IterationOptions,
) -> Result<(Vec<Complex<T>>, IterationTrace), NonlinearError> {
    solve_nlh_observed(system, scheme, initial, options, |_, _| {})
}

/// As [`solve_nlh`], calling `observer(l, u^l)` after every step.
pub fn solve_nlh_observed<T: Real>(
    system: &NlhSystem<T>,
    scheme: Scheme,
    initial: &[Complex<T>],
    options: &IterationOptions,
    mut observer: impl FnMut(usize, &[Complex<T>]),
) -> Result<(Vec<Complex<T>>, IterationTrace), NonlinearError> {
    if initial.len() != system.num_dofs() {
        return Err(NonlinearError::DimensionMismatch { expected: system.num_dofs(), got: initial.len() });
    }
    if options.max_iter == 0 || !(options.tol > 0.0) {
        return Err(NonlinearError::InvalidOptions(format!(
            "need max_iter >= 1 and tol > 0, got {} and {}",
            options.max_iter, options.tol
        )));
    }
    let mut u = initial.to_vec();
    let mut trace = IterationTrace { scheme, steps: Vec::new(), termination: Termination::MaxIterations };
    for step in 1..=options.max_iter {
        let (next, linear) =
            iterate_once(system, scheme, &u).map_err(|source| NonlinearError::LinearSolve { step, source })?;
        let update = relative_update(system, &next, &u, options.norm_region);
        u = next;
        trace.steps.push(IterationStep {
            step,
            relative_update: update,
            relative_residual: relative_residual(system, &u),
            linear,
        });
        observer(step, &u);
        if !update.is_finite() || update > options.divergence_threshold {
            trace.termination = Termination::Diverged;
            break;
        }
        if update < options.tol {
            trace.termination = Termination::Converged;
            break;
        }
    }
    Ok((u, trace))
}

/// Per-step errors of one scheme against the reference solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeErrors {
    pub scheme: Scheme,
    /// `e_l = |||u^l - u_ref||| / |||u_ref|||` for `l = 0, 1, ...`, where
    /// `e_0 = 1` is the error of the zero initial guess.
    pub errors: Vec<f64>,
    /// Entry `l` is `(log e_l - log e_{l-1}) / (log e_{l-1} - log e_{l-2})`.
    pub orders: Vec<Option<f64>>,
    pub trace: IterationTrace,
}

impl SchemeErrors {
    /// First step at which the error is at most `level`.
    pub fn steps_to(&self, level: f64) -> Option<usize> {
        self.errors.iter().position(|&e| e <= level)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderTable {
    pub reference_trace: IterationTrace,
    pub schemes: Vec<SchemeErrors>,
}

/// Errors and orders of each scheme from a zero initial guess, measured
/// against a Newton solution converged to `reference_tol`. Each scheme runs
/// with its own `options`, typically a tolerance near the reference accuracy.
pub fn newton_order_table<T: Real>(
    system: &NlhSystem<T>,
    schemes: &[(Scheme, IterationOptions)],
    reference_tol: f64,
) -> Result<OrderTable, NonlinearError> {
    let zero = vec![Complex::new(T::zero(), T::zero()); system.num_dofs()];
    let ref_opts = IterationOptions::for_scheme(Scheme::Newton).with_tol(reference_tol);
    let (reference, reference_trace) = solve_nlh(system, Scheme::Newton, &zero, &ref_opts)?;
    if !reference_trace.converged() {
        return Err(NonlinearError::ReferenceNotConverged(reference_trace.termination, reference_trace.num_steps()));
    }
    let mut table = OrderTable { reference_trace, schemes: Vec::new() };
    for &(scheme, options) in schemes {
        let mut errors = vec![1.0];
        let (_, trace) = solve_nlh_observed(system, scheme, &zero, &options, |_, u| {
            errors.push(relative_error(system, u, &reference, options.norm_region));
        })?;
        let orders = step_orders(&errors);
        table.schemes.push(SchemeErrors { scheme, errors, orders, trace });
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepDirection {
    Up,
    Down,
}

impl SweepDirection {
    pub fn name(self) -> &'static str {
        match self {
            SweepDirection::Up => "up",
            SweepDirection::Down => "down",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchPoint {
    pub amplitude: f64,
    /// Energy norm of the scattered field over the physical domain.
    pub energy: f64,
    pub direction: SweepDirection,
    pub converged: bool,
    /// The warm start failed and this point was recomputed from zero.
    pub restarted: bool,
    pub steps: usize,
    pub last_update: f64,
    /// Set when the linear solver failed at this amplitude.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub up: Vec<BranchPoint>,
    pub down: Vec<BranchPoint>,
    /// Midpoint of the amplitude pair where the up pass jumps.
    pub up_threshold: Option<f64>,
    /// Midpoint of the amplitude pair where the down pass jumps.
    pub down_threshold: Option<f64>,
}

impl SweepResult {
    /// Both jumps were found and the up jump lies above the down jump.
    pub fn hysteresis(&self) -> bool {
        matches!((self.up_threshold, self.down_threshold), (Some(u), Some(d)) if u > d)
    }
}

/// First pair of neighbouring converged points (failed points in between are
/// skipped) whose amplitude-normalised energies `E / I` differ by more than
/// `ratio`; returns the midpoint of their amplitudes.
pub fn detect_jump(points: &[BranchPoint], ratio: f64) -> Option<f64> {
    let usable: Vec<&BranchPoint> =
        points.iter().filter(|p| p.converged && p.amplitude > 0.0 && p.energy > 0.0 && p.energy.is_finite()).collect();
    usable.windows(2).find_map(|w| {
        let (ea, eb) = (w[0].energy / w[0].amplitude, w[1].energy / w[1].amplitude);
        (ea.max(eb) / ea.min(eb) > ratio).then(|| 0.5 * (w[0].amplitude + w[1].amplitude))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub scheme: Scheme,
    pub iteration: IterationOptions,
    pub jump_ratio: f64,
}

impl SweepOptions {
    pub fn new(scheme: Scheme) -> Self {
        Self { scheme, iteration: IterationOptions::for_scheme(scheme), jump_ratio: DEFAULT_JUMP_RATIO }
    }
}

fn solve_point<T: Real>(
    system: &NlhSystem<T>,
    amplitude: f64,
    direction: SweepDirection,
    options: &SweepOptions,
    initial: &[Complex<T>],
    guess: &mut Option<Vec<Complex<T>>>,
) -> BranchPoint {
    match solve_nlh(system, options.scheme, initial, &options.iteration) {
        Ok((u, trace)) => {
            let converged = trace.converged();
            let energy = to_f64(system.energy_norm(&u, NormRegion::Omega));
            if converged {
                *guess = Some(u);
            }
            BranchPoint {
                amplitude,
                energy,
                direction,
                converged,
                restarted: false,
                steps: trace.num_steps(),
                last_update: trace.last_update(),
                failure: None,
            }
        }
        Err(e) => BranchPoint {
            amplitude,
            energy: f64::NAN,
            direction,
            converged: false,
            restarted: false,
            steps: 0,
            last_update: f64::NAN,
            failure: Some(e.to_string()),
        },
    }
}

fn sweep_pass<T: Real>(
    system: &mut NlhSystem<T>,
    amplitudes: impl Iterator<Item = f64>,
    direction: SweepDirection,
    options: &SweepOptions,
    start: Option<Vec<Complex<T>>>,
    observer: &mut impl FnMut(&BranchPoint),
) -> (Vec<BranchPoint>, Option<Vec<Complex<T>>>) {
    let zero = vec![Complex::new(T::zero(), T::zero()); system.num_dofs()];
    let mut guess = start;
    let mut points = Vec::new();
    for amplitude in amplitudes {
        let incident = system.problem().incident.with_amplitude(lit(amplitude));
        system.set_incident(incident);
        let warm = guess.take();
        let mut point =
            solve_point(system, amplitude, direction, options, warm.as_deref().unwrap_or(&zero), &mut guess);
        if !point.converged && warm.is_some() {
            point = solve_point(system, amplitude, direction, options, &zero, &mut guess);
            point.restarted = true;
        }
        observer(&point);
        points.push(point);
    }
    (points, guess)
}

/// Amplitude continuation over `amplitudes` (ascending) for a plane-wave
/// problem: an up pass with warm starts, then a down pass started from the
/// last up solution. A point whose warm start fails is retried from zero;
/// after a point fails outright the next amplitude starts from zero.
pub fn bistability_sweep<T: Real>(
    system: &mut NlhSystem<T>,
    amplitudes: &[f64],
    options: &SweepOptions,
) -> Result<SweepResult, NonlinearError> {
    bistability_sweep_observed(system, amplitudes, options, |_| {})
}

/// As [`bistability_sweep`], reporting each point as it is computed.
pub fn bistability_sweep_observed<T: Real>(
    system: &mut NlhSystem<T>,
    amplitudes: &[f64],
    options: &SweepOptions,
    mut observer: impl FnMut(&BranchPoint),
) -> Result<SweepResult, NonlinearError> {
    if amplitudes.is_empty() || amplitudes.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(NonlinearError::InvalidAmplitudes);
    }
    let original = system.problem().incident;
    let (up, last) = sweep_pass(system, amplitudes.iter().copied(), SweepDirection::Up, options, None, &mut observer);
    let (down, _) =
        sweep_pass(system, amplitudes.iter().rev().copied(), SweepDirection::Down, options, last, &mut observer);
    system.set_incident(original);
    let up_threshold = detect_jump(&up, options.jump_ratio);
    let down_threshold = detect_jump(&down, options.jump_ratio);
    Ok(SweepResult { up, down, up_threshold, down_threshold })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(amplitude: f64, energy: f64) -> BranchPoint {
        BranchPoint {
            amplitude,
            energy,
            direction: SweepDirection::Up,
            converged: true,
            restarted: false,
            steps: 1,
            last_update: 0.0,
            failure: None,
        }
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("picard".parse::<Scheme>().is_err());
    }

    #[test]
    fn jump_detection() {
        let linear: Vec<_> = (1..10).map(|i| point(i as f64, 3.0 * i as f64)).collect();
        assert_eq!(detect_jump(&linear, 1.5), None);
        let mut jumped = linear.clone();
        for p in &mut jumped[5..] {
            p.energy *= 4.0;
        }
        assert_eq!(detect_jump(&jumped, 1.5), Some(5.5));
        jumped[4].converged = false;
        assert_eq!(detect_jump(&jumped, 1.5), Some(5.0));
        // unconverged points are skipped, so the bracket widens to [4, 7]
        jumped[5].converged = false;
        assert_eq!(detect_jump(&jumped, 1.5), Some(5.5));
        assert_eq!(detect_jump(&[point(1.0, 0.0), point(2.0, 5.0)], 1.5), None);
    }

    #[test]
    fn hysteresis_flag() {
        let r = |u, d| SweepResult { up: vec![], down: vec![], up_threshold: u, down_threshold: d };
        assert!(r(Some(2.0), Some(1.0)).hysteresis());
        assert!(!r(Some(1.0), Some(1.0)).hysteresis());
        assert!(!r(None, Some(1.0)).hysteresis());
    }
}
