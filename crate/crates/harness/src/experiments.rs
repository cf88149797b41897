//! Experiment drivers. Each returns typed rows; [`run`] renders them to
//! CSV, SVG and a plain-text report.

use std::fmt;

use nlh_core::analytic::Benchmark;
use nlh_core::assembly::{NlhProblem, NlhSystem, NormRegion, Penalty};
use nlh_core::geometry::Mesh;
use nlh_core::metrics::{compute_mf, error_against_exact, interpolate, order_fit, ErrorReport};
use nlh_core::nonlinear::{
    bistability_sweep_observed, newton_order_table, relative_error, solve_nlh, IterationOptions, IterationTrace,
    OrderTable, Scheme, SweepOptions, SweepResult,
};
use nlh_core::pml::validate_params;
use nlh_core::presets;
use nlh_core::Complex64;

use crate::config::{ExperimentConfig, ExperimentKind, Method, ProblemKind};
use crate::output::{CsvTable, Plot, Series};
use crate::HarnessError;

/// Progress sink for long runs.
pub type Log<'a> = &'a mut dyn FnMut(&str);

/// Rendered outputs of one run.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    /// File name and content.
    pub files: Vec<(String, String)>,
    /// Meshes to export, with their base file name.
    pub meshes: Vec<(String, Mesh<f64>)>,
    pub summary: Vec<String>,
    pub warnings: Vec<String>,
    /// Some solve did not converge.
    pub numerical_failure: bool,
}

/// Row kind of an error study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowMethod {
    Fem,
    Cip,
    Interp,
}

impl RowMethod {
    pub fn name(self) -> &'static str {
        match self {
            RowMethod::Fem => "FEM",
            RowMethod::Cip => "CIP",
            RowMethod::Interp => "INTERP",
        }
    }
}

impl From<Method> for RowMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Fem => RowMethod::Fem,
            Method::Cip => RowMethod::Cip,
        }
    }
}

impl fmt::Display for RowMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One cell of a convergence or pollution study.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub k: f64,
    /// Nominal mesh size of the level or of the `kh` rule.
    pub h: f64,
    pub h_max: f64,
    pub dofs: usize,
    pub method: RowMethod,
    /// Relative errors over the physical domain.
    pub rel_h1: f64,
    pub rel_l2: f64,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub failure: Option<String>,
}

/// One absorption strength of the PML study.
#[derive(Debug, Clone, PartialEq)]
pub struct PmlRow {
    pub sigma0: f64,
    pub thickness: f64,
    pub h_max: f64,
    pub dofs: usize,
    pub rel_h1: f64,
    pub rel_l2: f64,
    /// `2 k sigma0 L (1 - R^2 / (R_hat^2 + sigma0^2 L^2))^(1/2)`, the decay
    /// exponent of the layer error.
    pub exponent: f64,
    /// Relative energy difference over the physical domain to the solution
    /// on the same mesh at the strongest absorption of the study; isolates
    /// the layer error from the discretization error.
    pub layer_difference: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Result of a single solve.
pub struct SolveOutcome {
    pub system: NlhSystem<f64>,
    pub solution: Vec<Complex64>,
    pub trace: IterationTrace,
    /// Errors over the physical domain when the exact solution is known.
    pub report: Option<ErrorReport>,
    pub data_functional: f64,
}

fn penalty(method: Method) -> Penalty<f64> {
    match method {
        Method::Fem => Penalty::None,
        Method::Cip => Penalty::Dispersion,
    }
}

fn core_err(e: impl fmt::Display) -> HarnessError {
    HarnessError::Numerical(e.to_string())
}

fn customise(mut problem: NlhProblem<f64>, cfg: &ExperimentConfig) -> NlhProblem<f64> {
    if cfg.problem.epsilon >= 0.0 {
        problem.kerr_epsilon = cfg.problem.epsilon;
    }
    problem.with_kerr_scaling(cfg.problem.kerr_scaling.into())
}

/// Benchmark system on `mesh` with the configured absorption.
pub fn benchmark_system(
    cfg: &ExperimentConfig,
    mesh: Mesh<f64>,
    k: f64,
    sigma0: f64,
    method: Method,
) -> Result<NlhSystem<f64>, HarnessError> {
    let problem = presets::benchmark_problem(mesh, k, sigma0, penalty(method)).map_err(core_err)?;
    NlhSystem::new(customise(problem, cfg)).map_err(core_err)
}

/// Plane-wave system of the bistable configuration at `amplitude`.
pub fn bistability_system(cfg: &ExperimentConfig, amplitude: f64) -> Result<NlhSystem<f64>, HarnessError> {
    let mesh = presets::bistability_mesh(cfg.discretization.h).map_err(core_err)?;
    let eps = if cfg.problem.epsilon >= 0.0 { cfg.problem.epsilon } else { presets::BISTABILITY_EPSILON };
    let problem =
        presets::bistability_problem(mesh, amplitude, eps, penalty(cfg.experiment.method)).map_err(core_err)?;
    NlhSystem::new(customise(problem, cfg)).map_err(core_err)
}

fn iteration_options(cfg: &ExperimentConfig, scheme: Scheme) -> IterationOptions {
    let max_iter = match cfg.experiment.max_iter {
        0 => scheme.default_max_iter(),
        n => n,
    };
    IterationOptions::for_scheme(scheme).with_tol(cfg.experiment.tol).with_max_iter(max_iter)
}

fn zeros(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

fn exact_errors(system: &NlhSystem<f64>, u: &[Complex64], bench: &Benchmark<f64>) -> Result<ErrorReport, HarnessError> {
    error_against_exact(system, u, |x| bench.scattered(x), |x| bench.gradient(x), NormRegion::Omega).map_err(core_err)
}

/// Solves the benchmark and measures the error; solver failures become
/// rows with NaN errors.
fn solve_cell(cfg: &ExperimentConfig, mesh: &Mesh<f64>, k: f64, h: f64, method: Method) -> ErrorRow {
    let scheme = cfg.experiment.scheme;
    let attempt = || -> Result<(ErrorReport, IterationTrace), HarnessError> {
        let system = benchmark_system(cfg, mesh.clone(), k, cfg.problem.sigma0, method)?;
        let (u, trace) =
            solve_nlh(&system, scheme, &zeros(system.num_dofs()), &iteration_options(cfg, scheme)).map_err(core_err)?;
        let bench = Benchmark::new(k, system.problem().kerr_epsilon);
        Ok((exact_errors(&system, &u, &bench)?, trace))
    };
    match attempt() {
        Ok((r, trace)) => ErrorRow {
            k,
            h,
            h_max: r.h_max,
            dofs: r.dofs,
            method: method.into(),
            rel_h1: r.rel_h1,
            rel_l2: r.rel_l2,
            iterations: Some(trace.num_steps()),
            converged: Some(trace.converged()),
            failure: (!trace.converged()).then(|| format!("{:?}", trace.termination)),
        },
        Err(e) => ErrorRow {
            k,
            h,
            h_max: mesh.h_max(),
            dofs: 0,
            method: method.into(),
            rel_h1: f64::NAN,
            rel_l2: f64::NAN,
            iterations: None,
            converged: Some(false),
            failure: Some(e.to_string()),
        },
    }
}

fn interp_cell(cfg: &ExperimentConfig, mesh: &Mesh<f64>, k: f64, h: f64) -> Result<ErrorRow, HarnessError> {
    let system = benchmark_system(cfg, mesh.clone(), k, cfg.problem.sigma0, Method::Fem)?;
    let bench = Benchmark::new(k, system.problem().kerr_epsilon);
    let u = interpolate(&system, |x| bench.scattered(x));
    let r = exact_errors(&system, &u, &bench)?;
    Ok(ErrorRow {
        k,
        h,
        h_max: r.h_max,
        dofs: r.dofs,
        method: RowMethod::Interp,
        rel_h1: r.rel_h1,
        rel_l2: r.rel_l2,
        iterations: None,
        converged: None,
        failure: None,
    })
}

/// INTERP, FEM and CIP rows on one mesh.
fn error_cells(
    cfg: &ExperimentConfig,
    mesh: &Mesh<f64>,
    k: f64,
    h: f64,
    log: Log,
) -> Result<Vec<ErrorRow>, HarnessError> {
    let mut rows = vec![interp_cell(cfg, mesh, k, h)?];
    for method in [Method::Fem, Method::Cip] {
        let row = solve_cell(cfg, mesh, k, h, method);
        log(&format!(
            "k = {k}, h = {h:.4e}, dofs = {}, {}: rel_h1 = {:.4e} (INTERP {:.4e})",
            row.dofs, row.method, row.rel_h1, rows[0].rel_h1
        ));
        rows.push(row);
    }
    Ok(rows)
}

/// Errors of FEM, CIP and nodal interpolation for every wave number in
/// `k_list` on every refinement level in `levels`.
pub fn convergence_rows(cfg: &ExperimentConfig, log: Log) -> Result<Vec<ErrorRow>, HarnessError> {
    let mut rows = Vec::new();
    for &k in &cfg.problem.k_list {
        for &level in &cfg.discretization.levels {
            let mesh = presets::benchmark_mesh(level, cfg.problem.thickness).map_err(core_err)?;
            let h = presets::BENCHMARK_BASE_H / 2f64.powi(level as i32);
            rows.extend(error_cells(cfg, &mesh, k, h, log)?);
        }
    }
    Ok(rows)
}

/// Errors at fixed `k h` for every wave number in `k_list`.
pub fn pollution_rows(cfg: &ExperimentConfig, log: Log) -> Result<Vec<ErrorRow>, HarnessError> {
    let mut rows = Vec::new();
    for &k in &cfg.problem.k_list {
        let h = cfg.discretization.kh / k;
        let mesh = presets::benchmark_mesh_h(h, cfg.problem.thickness).map_err(core_err)?;
        rows.extend(error_cells(cfg, &mesh, k, h, log)?);
    }
    Ok(rows)
}

/// Decay exponent of the layer error for absorption `sigma0`.
pub fn pml_exponent(k: f64, sigma0: f64, thickness: f64, inner: f64) -> f64 {
    let outer = inner + thickness;
    let sl = sigma0 * thickness;
    2.0 * k * sl * (1.0 - inner * inner / (outer * outer + sl * sl)).sqrt()
}

/// Benchmark errors on one fixed mesh for every absorption in `sigma0_list`.
pub fn pml_rows(cfg: &ExperimentConfig, log: Log) -> Result<Vec<PmlRow>, HarnessError> {
    let k = cfg.problem.k;
    let thickness = cfg.problem.thickness;
    let mesh = presets::benchmark_mesh(cfg.discretization.level, thickness).map_err(core_err)?;
    let scheme = cfg.experiment.scheme;
    let mut rows = Vec::new();
    let mut solutions = Vec::new();
    let mut energy_system = None;
    for &sigma0 in &cfg.problem.sigma0_list {
        let system = benchmark_system(cfg, mesh.clone(), k, sigma0, cfg.experiment.method)?;
        let (u, trace) =
            solve_nlh(&system, scheme, &zeros(system.num_dofs()), &iteration_options(cfg, scheme)).map_err(core_err)?;
        let bench = Benchmark::new(k, system.problem().kerr_epsilon);
        let r = exact_errors(&system, &u, &bench)?;
        let exponent = pml_exponent(k, sigma0, thickness, presets::DOMAIN_RADIUS);
        log(&format!("sigma0 = {sigma0}: rel_h1 = {:.4e}, exponent = {exponent:.2}", r.rel_h1));
        rows.push(PmlRow {
            sigma0,
            thickness,
            h_max: r.h_max,
            dofs: r.dofs,
            rel_h1: r.rel_h1,
            rel_l2: r.rel_l2,
            exponent,
            layer_difference: f64::NAN,
            iterations: trace.num_steps(),
            converged: trace.converged(),
        });
        solutions.push(u);
        energy_system.get_or_insert(system);
    }
    let strongest = (0..rows.len()).max_by(|&a, &b| rows[a].sigma0.total_cmp(&rows[b].sigma0));
    if let (Some(s), Some(system)) = (strongest, &energy_system) {
        for (row, u) in rows.iter_mut().zip(&solutions) {
            row.layer_difference = relative_error(system, u, &solutions[s], NormRegion::Omega);
        }
    }
    Ok(rows)
}

/// Per-step errors and orders of all three schemes at the configured
/// amplitude, each run to the reference tolerance.
pub fn newton_table(cfg: &ExperimentConfig, log: Log) -> Result<OrderTable, HarnessError> {
    let system = bistability_system(cfg, cfg.bistability.amplitude)?;
    log(&format!("order table at I = {}, {} unknowns", cfg.bistability.amplitude, system.num_dofs()));
    let tol = cfg.bistability.reference_tol;
    let schemes: Vec<_> = Scheme::ALL
        .iter()
        .map(|&s| {
            let max_iter = if cfg.experiment.max_iter == 0 { s.default_max_iter() } else { cfg.experiment.max_iter };
            (s, IterationOptions::for_scheme(s).with_tol(tol).with_max_iter(max_iter))
        })
        .collect();
    newton_order_table(&system, &schemes, tol).map_err(core_err)
}

/// Up and down amplitude sweeps over the configured grid.
pub fn bistability(cfg: &ExperimentConfig, log: Log) -> Result<SweepResult, HarnessError> {
    let mut system = bistability_system(cfg, 1.0)?;
    let mut opts = SweepOptions::new(cfg.experiment.scheme);
    opts.iteration = iteration_options(cfg, cfg.experiment.scheme);
    opts.jump_ratio = cfg.bistability.jump_ratio;
    log(&format!("sweep with {} unknowns", system.num_dofs()));
    bistability_sweep_observed(&mut system, &cfg.amplitudes(), &opts, |p| {
        log(&format!(
            "{} I = {:.0}: E/I = {:.4} converged = {} steps = {}",
            p.direction.name(),
            p.amplitude,
            p.energy / p.amplitude,
            p.converged,
            p.steps
        ))
    })
    .map_err(core_err)
}

/// One solve of the configured problem.
pub fn solve(cfg: &ExperimentConfig) -> Result<SolveOutcome, HarnessError> {
    let (system, bench) = match cfg.problem.problem {
        ProblemKind::Benchmark => {
            let mesh = presets::benchmark_mesh(cfg.discretization.level, cfg.problem.thickness).map_err(core_err)?;
            let system = benchmark_system(cfg, mesh, cfg.problem.k, cfg.problem.sigma0, cfg.experiment.method)?;
            let bench = Benchmark::new(cfg.problem.k, system.problem().kerr_epsilon);
            (system, Some(bench))
        }
        ProblemKind::Bistability => (bistability_system(cfg, cfg.bistability.amplitude)?, None),
    };
    let scheme = cfg.experiment.scheme;
    let (solution, trace) =
        solve_nlh(&system, scheme, &zeros(system.num_dofs()), &iteration_options(cfg, scheme)).map_err(core_err)?;
    let report = bench.map(|b| exact_errors(&system, &solution, &b)).transpose()?;
    let data_functional = compute_mf(&system);
    Ok(SolveOutcome { system, solution, trace, report, data_functional })
}

/// Parameter-regime warnings for the layers used by `cfg`.
pub fn parameter_warnings(cfg: &ExperimentConfig) -> Vec<String> {
    let p = &cfg.problem;
    let cases: Vec<(f64, f64)> = match cfg.experiment.kind {
        ExperimentKind::Convergence | ExperimentKind::Pollution => p.k_list.iter().map(|&k| (k, p.sigma0)).collect(),
        ExperimentKind::PmlStudy => p.sigma0_list.iter().map(|&s| (p.k, s)).collect(),
        _ => vec![(p.k, p.sigma0)],
    };
    let thickness = match (cfg.experiment.kind, p.problem) {
        (ExperimentKind::Solve, ProblemKind::Bistability)
        | (ExperimentKind::NewtonTable | ExperimentKind::Bistability, _) => presets::BISTABILITY_THICKNESS,
        _ => p.thickness,
    };
    let sigma_fixed = matches!(cfg.experiment.kind, ExperimentKind::NewtonTable | ExperimentKind::Bistability)
        || (cfg.experiment.kind == ExperimentKind::Solve && p.problem == ProblemKind::Bistability);
    let mut out = Vec::new();
    for (k, sigma0) in cases {
        let (k, sigma0) =
            if sigma_fixed { (presets::BISTABILITY_K0, presets::BISTABILITY_SIGMA0) } else { (k, sigma0) };
        let Ok(profile) = nlh_core::pml::PmlProfile::with_thickness(sigma0, presets::DOMAIN_RADIUS, thickness) else {
            continue;
        };
        let report = validate_params(k, &profile);
        if !report.passed() {
            let line = format!("WARNING: PML parameters outside the sufficient regime at k = {k}, sigma0 = {sigma0}, L = {thickness}: {report}");
            if !out.contains(&line) {
                out.push(line);
            }
        }
    }
    out
}

fn error_table(rows: &[ErrorRow]) -> CsvTable {
    let mut t = CsvTable::new(vec![
        "k",
        "h",
        "h_max",
        "dofs",
        "method",
        "rel_h1",
        "rel_l2",
        "iterations",
        "converged",
        "failure",
    ]);
    for r in rows {
        t.push(vec![
            r.k.into(),
            r.h.into(),
            r.h_max.into(),
            r.dofs.into(),
            r.method.name().into(),
            r.rel_h1.into(),
            r.rel_l2.into(),
            r.iterations.into(),
            r.converged.into(),
            r.failure.clone().into(),
        ]);
    }
    t
}

fn error_series(rows: &[ErrorRow], x: impl Fn(&ErrorRow) -> f64, by_k: bool) -> Vec<Series> {
    let mut keys: Vec<(f64, RowMethod)> = Vec::new();
    for r in rows {
        let key = (if by_k { r.k } else { 0.0 }, r.method);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(k, m)| {
            let pts = rows.iter().filter(|r| r.method == m && (!by_k || r.k == k)).map(|r| (x(r), r.rel_h1)).collect();
            let label = if by_k { format!("{m} k={k}") } else { m.name().to_string() };
            Series::new(label, pts)
        })
        .collect()
}

fn error_summary(rows: &[ErrorRow], by_level: bool) -> Vec<String> {
    let mut out = Vec::new();
    let mut ks: Vec<f64> = rows.iter().map(|r| r.k).collect();
    ks.dedup();
    for m in [RowMethod::Interp, RowMethod::Fem, RowMethod::Cip] {
        if by_level {
            for &k in &ks {
                let pairs: Vec<(f64, f64)> =
                    rows.iter().filter(|r| r.k == k && r.method == m).map(|r| (r.h_max, r.rel_h1)).collect();
                let slope = order_fit(&pairs).ok().and_then(|f| f.slope);
                out.push(format!("k = {k} {m}: H1 order {}", slope.map_or("n/a".into(), |s| format!("{s:.3}"))));
            }
        } else {
            let errs: Vec<String> =
                rows.iter().filter(|r| r.method == m).map(|r| format!("{:.3e}", r.rel_h1)).collect();
            out.push(format!("{m}: rel_h1 over k = [{}]", errs.join(", ")));
        }
    }
    let failed = rows.iter().filter(|r| r.failure.is_some()).count();
    if failed > 0 {
        out.push(format!("{failed} solves failed"));
    }
    out
}

/// Runs the configured experiment and renders its outputs.
pub fn run(cfg: &ExperimentConfig, log: Log) -> Result<Artifacts, HarnessError> {
    let mut art = Artifacts { warnings: parameter_warnings(cfg), ..Default::default() };
    for w in &art.warnings {
        log(w);
    }
    let kind = cfg.experiment.kind;
    let name = kind.name().replace('-', "_");
    let provenance = crate::provenance(cfg);
    let table = |art: &mut Artifacts, suffix: &str, t: &CsvTable| {
        art.files.push((format!("{name}{suffix}.csv"), t.render(&provenance)));
    };
    match kind {
        ExperimentKind::Convergence | ExperimentKind::Pollution => {
            let convergence = kind == ExperimentKind::Convergence;
            let rows = if convergence { convergence_rows(cfg, log)? } else { pollution_rows(cfg, log)? };
            art.numerical_failure = rows.iter().any(|r| r.failure.is_some());
            table(&mut art, "", &error_table(&rows));
            art.summary = error_summary(&rows, convergence);
            let plot = if convergence {
                Plot {
                    title: "Relative H1 error over the physical domain".into(),
                    x_label: "1/h".into(),
                    y_label: "relative H1 error".into(),
                    log_x: true,
                    log_y: true,
                    series: error_series(&rows, |r| 1.0 / r.h_max, true),
                }
            } else {
                Plot {
                    title: format!("Relative H1 error at kh = {:.4}", cfg.discretization.kh),
                    x_label: "k".into(),
                    y_label: "relative H1 error".into(),
                    log_x: true,
                    log_y: true,
                    series: error_series(&rows, |r| r.k, false),
                }
            };
            art.files.push((format!("{name}.svg"), plot.to_svg()));
        }
        ExperimentKind::PmlStudy => {
            let rows = pml_rows(cfg, log)?;
            art.numerical_failure = rows.iter().any(|r| !r.converged);
            let mut t = CsvTable::new(vec![
                "sigma0",
                "L",
                "h_max",
                "dofs",
                "rel_h1",
                "rel_l2",
                "exponent",
                "layer_difference",
                "iterations",
                "converged",
            ]);
            for r in &rows {
                t.push(vec![
                    r.sigma0.into(),
                    r.thickness.into(),
                    r.h_max.into(),
                    r.dofs.into(),
                    r.rel_h1.into(),
                    r.rel_l2.into(),
                    r.exponent.into(),
                    r.layer_difference.into(),
                    r.iterations.into(),
                    r.converged.into(),
                ]);
            }
            table(&mut art, "", &t);
            art.summary = rows
                .iter()
                .map(|r| {
                    format!(
                        "sigma0 = {}: rel_h1 = {:.4e}, layer difference = {:.4e}",
                        r.sigma0, r.rel_h1, r.layer_difference
                    )
                })
                .collect();
            let plot = Plot {
                title: format!("Layer error at k = {}, L = {}", cfg.problem.k, cfg.problem.thickness),
                x_label: "sigma0".into(),
                y_label: "relative error".into(),
                log_x: true,
                log_y: true,
                series: vec![
                    Series::new("H1", rows.iter().map(|r| (r.sigma0, r.rel_h1)).collect()),
                    Series::new("L2", rows.iter().map(|r| (r.sigma0, r.rel_l2)).collect()),
                    Series::new("layer difference", rows.iter().map(|r| (r.sigma0, r.layer_difference)).collect()),
                ],
            };
            art.files.push((format!("{name}.svg"), plot.to_svg()));
        }
        ExperimentKind::NewtonTable => {
            let tab = newton_table(cfg, log)?;
            let mut t = CsvTable::new(vec!["scheme", "step", "error", "order"]);
            for s in &tab.schemes {
                for (l, (&e, &o)) in s.errors.iter().zip(&s.orders).enumerate() {
                    t.push(vec![s.scheme.name().into(), l.into(), e.into(), o.into()]);
                }
            }
            table(&mut art, "", &t);
            art.summary.push(format!("reference: {} Newton steps", tab.reference_trace.num_steps()));
            for s in &tab.schemes {
                let at = |lvl: f64| s.steps_to(lvl).map_or("never".into(), |n| n.to_string());
                art.summary.push(format!(
                    "{}: {} steps, {:?}; reaches 1e-7 at step {}, 1e-12 at step {}",
                    s.scheme,
                    s.trace.num_steps(),
                    s.trace.termination,
                    at(1e-7),
                    at(1e-12)
                ));
            }
            let plot = Plot {
                title: format!("Iteration errors at I = {}", cfg.bistability.amplitude),
                x_label: "step".into(),
                y_label: "relative error".into(),
                log_x: false,
                log_y: true,
                series: tab
                    .schemes
                    .iter()
                    .map(|s| {
                        Series::new(s.scheme.name(), s.errors.iter().enumerate().map(|(l, &e)| (l as f64, e)).collect())
                    })
                    .collect(),
            };
            art.files.push((format!("{name}.svg"), plot.to_svg()));
        }
        ExperimentKind::Bistability => {
            let sweep = bistability(cfg, log)?;
            let points: Vec<_> = sweep.up.iter().chain(&sweep.down).collect();
            art.numerical_failure = points.iter().any(|p| !p.converged);
            let mut t = CsvTable::new(vec![
                "direction",
                "amplitude",
                "energy",
                "energy_over_amplitude",
                "converged",
                "restarted",
                "steps",
                "last_update",
                "failure",
            ]);
            for p in &points {
                t.push(vec![
                    p.direction.name().into(),
                    p.amplitude.into(),
                    p.energy.into(),
                    (p.energy / p.amplitude).into(),
                    p.converged.into(),
                    p.restarted.into(),
                    p.steps.into(),
                    p.last_update.into(),
                    p.failure.clone().into(),
                ]);
            }
            table(&mut art, "", &t);
            let mut s = CsvTable::new(vec!["up_threshold", "down_threshold", "hysteresis", "gap"]);
            let gap = sweep.up_threshold.zip(sweep.down_threshold).map(|(u, d)| u - d);
            s.push(vec![sweep.up_threshold.into(), sweep.down_threshold.into(), sweep.hysteresis().into(), gap.into()]);
            table(&mut art, "_summary", &s);
            let fmt_t = |t: Option<f64>| t.map_or("none".into(), |v| format!("{v}"));
            art.summary.push(format!(
                "up threshold {}, down threshold {}, hysteresis {}",
                fmt_t(sweep.up_threshold),
                fmt_t(sweep.down_threshold),
                sweep.hysteresis()
            ));
            let branch = |pts: &[nlh_core::nonlinear::BranchPoint]| {
                pts.iter().filter(|p| p.converged).map(|p| (p.amplitude, p.energy)).collect::<Vec<_>>()
            };
            let plot = Plot {
                title: "Scattered energy against incident amplitude".into(),
                x_label: "incident amplitude I".into(),
                y_label: "energy norm of the scattered field".into(),
                log_x: false,
                log_y: false,
                series: vec![Series::new("UP", branch(&sweep.up)), Series::new("DOWN", branch(&sweep.down))],
            };
            art.files.push((format!("{name}.svg"), plot.to_svg()));
        }
        ExperimentKind::Solve => {
            let out = solve(cfg)?;
            art.numerical_failure = !out.trace.converged();
            let mesh = &out.system.problem().mesh;
            let nodal = out.system.dofs().expand(&out.solution);
            let mut sol = CsvTable::new(vec!["vertex", "x", "y", "re", "im"]);
            for (i, (p, v)) in mesh.vertices().iter().zip(&nodal).enumerate() {
                sol.push(vec![i.into(), p[0].into(), p[1].into(), v.re.into(), v.im.into()]);
            }
            table(&mut art, "_solution", &sol);
            let mut tr = CsvTable::new(vec!["step", "relative_update", "relative_residual", "linear_residual"]);
            for s in &out.trace.steps {
                tr.push(vec![
                    s.step.into(),
                    s.relative_update.into(),
                    s.relative_residual.into(),
                    s.linear.relative_residual.into(),
                ]);
            }
            table(&mut art, "_trace", &tr);
            art.summary.push(format!(
                "{} dofs, {} after {} steps, last update {:.3e}, residual {:.3e}",
                out.system.num_dofs(),
                if out.trace.converged() { "converged" } else { "not converged" },
                out.trace.num_steps(),
                out.trace.last_update(),
                out.trace.final_residual()
            ));
            art.summary.push(format!("M(f) = {:.6e}", out.data_functional));
            if let Some(r) = &out.report {
                let mut e = CsvTable::new(vec!["rel_l2", "rel_h1", "rel_energy", "dofs", "h_max"]);
                e.push(vec![r.rel_l2.into(), r.rel_h1.into(), r.rel_energy.into(), r.dofs.into(), r.h_max.into()]);
                table(&mut art, "_errors", &e);
                art.summary.push(format!(
                    "relative errors over Omega: L2 {:.4e}, H1 {:.4e}, energy {:.4e}",
                    r.rel_l2, r.rel_h1, r.rel_energy
                ));
            }
            if cfg.experiment.export_mesh {
                art.meshes.push(("mesh".into(), mesh.clone()));
            }
        }
    }
    Ok(art)
}
