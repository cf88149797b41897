//! Experiment manifests: TOML files with `[experiment]`, `[problem]`,
//! `[discretization]` and `[bistability]` sections. Every key is optional;
//! missing keys take the defaults of the experiment kind, and command-line
//! flags override both.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nlh_core::assembly::KerrScaling;
use nlh_core::nonlinear::{Scheme, DEFAULT_JUMP_RATIO, DEFAULT_REFERENCE_TOL, DEFAULT_TOL};
use nlh_core::presets;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Solve,
    Convergence,
    Pollution,
    PmlStudy,
    NewtonTable,
    Bistability,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Solve,
        ExperimentKind::Convergence,
        ExperimentKind::Pollution,
        ExperimentKind::PmlStudy,
        ExperimentKind::NewtonTable,
        ExperimentKind::Bistability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Solve => "solve",
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::Pollution => "pollution",
            ExperimentKind::PmlStudy => "pml-study",
            ExperimentKind::NewtonTable => "newton-table",
            ExperimentKind::Bistability => "bistability",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown experiment '{s}'"))
    }
}

/// Discretization method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fem,
    Cip,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Fem => "fem",
            Method::Cip => "cip",
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fem" => Ok(Method::Fem),
            "cip" => Ok(Method::Cip),
            other => Err(format!("unknown method '{other}' (expected fem or cip)")),
        }
    }
}

/// Configuration to solve for in `solve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    /// Closed-form benchmark on the unit disk.
    Benchmark,
    /// Plane wave on the high-index Kerr disk.
    Bistability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KerrScalingConfig {
    Background,
    Local,
}

impl From<KerrScalingConfig> for KerrScaling {
    fn from(s: KerrScalingConfig) -> Self {
        match s {
            KerrScalingConfig::Background => KerrScaling::Background,
            KerrScalingConfig::Local => KerrScaling::Local,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: ExperimentKind,
    pub method: Method,
    #[serde(with = "scheme_name")]
    pub scheme: Scheme,
    pub tol: f64,
    /// Zero selects the scheme's default cap.
    pub max_iter: usize,
    pub out: PathBuf,
    pub seed: u64,
    /// Also write the mesh (`solve` only).
    pub export_mesh: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub problem: ProblemKind,
    /// Wave number of single-k experiments.
    pub k: f64,
    /// Wave numbers of convergence and pollution studies.
    pub k_list: Vec<f64>,
    pub sigma0: f64,
    /// PML thickness `L`.
    pub thickness: f64,
    /// Absorption strengths of the PML study.
    pub sigma0_list: Vec<f64>,
    /// Kerr constant; negative selects the default rule (`k^-2` for the
    /// benchmark, `1e-12` for the bistable configuration).
    pub epsilon: f64,
    pub kerr_scaling: KerrScalingConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationSection {
    /// Refinement level of single-mesh benchmark runs.
    pub level: usize,
    /// Refinement levels of the convergence study.
    pub levels: Vec<usize>,
    /// Fixed `k h` of the pollution study.
    pub kh: f64,
    /// Mesh size of the bistable configuration.
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BistabilitySection {
    pub amplitude_min: f64,
    pub amplitude_max: f64,
    pub amplitude_step: f64,
    pub jump_ratio: f64,
    /// Amplitude of `newton-table` and of a bistable `solve`.
    pub amplitude: f64,
    pub reference_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub problem: ProblemSection,
    pub discretization: DiscretizationSection,
    pub bistability: BistabilitySection,
}

mod scheme_name {
    use nlh_core::nonlinear::Scheme;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: &Scheme, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(s.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Scheme, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl ExperimentConfig {
    /// Defaults of one experiment kind.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let mut cfg = Self {
            experiment: ExperimentSection {
                kind,
                method: Method::Cip,
                scheme: Scheme::Newton,
                tol: DEFAULT_TOL,
                max_iter: 0,
                out: PathBuf::from("out"),
                seed: 0,
                export_mesh: false,
            },
            problem: ProblemSection {
                problem: ProblemKind::Benchmark,
                k: 10.0,
                k_list: vec![10.0],
                sigma0: presets::BENCHMARK_SIGMA0,
                thickness: presets::BENCHMARK_THICKNESS,
                sigma0_list: vec![0.05, 0.1, 0.2, 0.3, 0.5, 1.0, 2.0, 4.0, 8.0],
                epsilon: -1.0,
                kerr_scaling: KerrScalingConfig::Background,
            },
            discretization: DiscretizationSection {
                level: 3,
                levels: vec![1, 2, 3, 4, 5],
                kh: std::f64::consts::PI / 5.0,
                h: 2e-2,
            },
            bistability: BistabilitySection {
                amplitude_min: 2.0e5,
                amplitude_max: 3.1e5,
                amplitude_step: 5e3,
                jump_ratio: DEFAULT_JUMP_RATIO,
                amplitude: 2.63e5,
                reference_tol: DEFAULT_REFERENCE_TOL,
            },
        };
        // error studies reach ~4e5 unknowns, where the real 2n Newton system
        // exceeds desk memory; the frozen scheme solves complex n x n systems
        if matches!(kind, ExperimentKind::Convergence | ExperimentKind::Pollution | ExperimentKind::PmlStudy) {
            cfg.experiment.scheme = Scheme::Frozen;
        }
        match kind {
            ExperimentKind::Pollution => cfg.problem.k_list = vec![10.0, 20.0, 40.0, 60.0],
            ExperimentKind::PmlStudy => cfg.experiment.method = Method::Fem,
            ExperimentKind::NewtonTable | ExperimentKind::Bistability => {
                cfg.problem.problem = ProblemKind::Bistability;
                cfg.problem.k = presets::BISTABILITY_K0;
                cfg.problem.sigma0 = presets::BISTABILITY_SIGMA0;
                cfg.problem.thickness = presets::BISTABILITY_THICKNESS;
            }
            ExperimentKind::Solve | ExperimentKind::Convergence => {}
        }
        cfg
    }

    /// Reads a manifest, filling unset keys from the defaults of `kind`.
    pub fn from_toml(text: &str, kind: ExperimentKind) -> Result<Self, HarnessError> {
        let file: toml::Table = text.parse().map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
        if let Some(k) = file.get("experiment").and_then(|e| e.get("kind")).and_then(|k| k.as_str()) {
            if k != kind.name() {
                return Err(HarnessError::Config(format!("config is for experiment '{k}', not '{kind}'")));
            }
        }
        let defaults = toml::Table::try_from(Self::defaults(kind)).map_err(|e| HarnessError::Config(e.to_string()))?;
        let merged = merge(defaults, file);
        let cfg: Self = merged.try_into().map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path, kind: ExperimentKind) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read config '{}': {e}", path.display())))?;
        Self::from_toml(&text, kind)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of the canonical serialization. The output directory is
    /// excluded so identical experiments written to different places agree.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.experiment.out = PathBuf::new();
        Sha256::digest(canonical.to_toml().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        let p = &self.problem;
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.experiment.tol) {
            return bad(format!("tol must be positive, got {}", self.experiment.tol));
        }
        if !positive(p.k) || !p.k_list.iter().all(|&k| positive(k)) {
            return bad("wave numbers must be positive".into());
        }
        if !positive(p.sigma0) || !positive(p.thickness) || !p.sigma0_list.iter().all(|&s| positive(s)) {
            return bad("sigma0 and thickness must be positive".into());
        }
        let d = &self.discretization;
        if !positive(d.kh) || !positive(d.h) {
            return bad("kh and h must be positive".into());
        }
        let b = &self.bistability;
        if !(positive(b.amplitude_step) && b.amplitude_min >= 0.0 && b.amplitude_max >= b.amplitude_min) {
            return bad("amplitude grid needs 0 <= min <= max and a positive step".into());
        }
        if !positive(b.jump_ratio - 1.0) || !positive(b.reference_tol) {
            return bad("jump_ratio must exceed 1 and reference_tol must be positive".into());
        }
        Ok(())
    }

    pub fn max_iter(&self) -> usize {
        match self.experiment.max_iter {
            0 => self.experiment.scheme.default_max_iter(),
            n => n,
        }
    }

    /// Amplitude grid of the sweep, endpoints included.
    pub fn amplitudes(&self) -> Vec<f64> {
        let b = &self.bistability;
        let n = ((b.amplitude_max - b.amplitude_min) / b.amplitude_step + 1e-9).floor() as usize;
        (0..=n).map(|i| b.amplitude_min + b.amplitude_step * i as f64).collect()
    }
}

fn merge(mut base: toml::Table, over: toml::Table) -> toml::Table {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => {
                let merged = merge(std::mem::take(b), o);
                *b = merged;
            }
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
    base
}
