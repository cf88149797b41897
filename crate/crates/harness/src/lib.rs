//! Configuration, experiment drivers and output for the `nlh` command.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::Path;

use thiserror::Error;

pub use config::{ExperimentConfig, ExperimentKind, Method};
pub use experiments::{run, Artifacts};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl HarnessError {
    /// Process exit code: 1 for usage and i/o problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) => 1,
            HarnessError::Numerical(_) => 2,
        }
    }
}

/// Comment line carried by every CSV.
pub fn provenance(cfg: &ExperimentConfig) -> String {
    format!("nlh {} experiment={} config-sha256={}", env!("CARGO_PKG_VERSION"), cfg.experiment.kind, cfg.hash())
}

/// Report text: provenance, warnings, then the summary lines.
pub fn report_text(cfg: &ExperimentConfig, art: &Artifacts) -> String {
    let mut out = format!("# {}\n", provenance(cfg));
    for line in art.warnings.iter().chain(&art.summary) {
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// Writes every artifact, the report and the resolved configuration to `dir`.
pub fn write_artifacts(cfg: &ExperimentConfig, art: &Artifacts, dir: &Path) -> Result<(), HarnessError> {
    let io = |e: std::io::Error| HarnessError::Io(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let name = cfg.experiment.kind.name().replace('-', "_");
    for (file, content) in &art.files {
        std::fs::write(dir.join(file), content).map_err(io)?;
    }
    std::fs::write(dir.join(format!("{name}_report.txt")), report_text(cfg, art)).map_err(io)?;
    std::fs::write(dir.join(format!("{name}_config.toml")), cfg.to_toml()).map_err(io)?;
    for (base, mesh) in &art.meshes {
        nlh_core::geometry::write_mesh(
            mesh,
            &dir.join(format!("{base}_nodes.txt")),
            &dir.join(format!("{base}_elements.txt")),
        )
        .map_err(|e| HarnessError::Io(e.to_string()))?;
    }
    Ok(())
}
