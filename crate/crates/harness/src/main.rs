use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nlh_core::nonlinear::Scheme;
use nlh_harness::{run, write_artifacts, ExperimentConfig, ExperimentKind, HarnessError, Method};

#[derive(Parser)]
#[command(name = "nlh", version, about = "Finite element solver for the nonlinear Helmholtz equation with a PML")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single solve; writes nodal values, the iteration trace and errors.
    Solve(Flags),
    /// Errors of FEM, CIP and interpolation under mesh refinement.
    Convergence(Flags),
    /// Errors at fixed kh for increasing k.
    Pollution(Flags),
    /// Errors against the absorption strength of the layer.
    PmlStudy(Flags),
    /// Per-step errors and orders of the three iteration schemes.
    NewtonTable(Flags),
    /// Up and down amplitude sweeps of the bistable configuration.
    Bistability(Flags),
}

#[derive(Args)]
struct Flags {
    /// TOML manifest; unset keys take the experiment defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<Scheme>,
    /// Refinement level of benchmark meshes.
    #[arg(long)]
    level: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress progress lines.
    #[arg(long)]
    quiet: bool,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse()
}

impl Command {
    fn split(self) -> (ExperimentKind, Flags) {
        match self {
            Command::Solve(f) => (ExperimentKind::Solve, f),
            Command::Convergence(f) => (ExperimentKind::Convergence, f),
            Command::Pollution(f) => (ExperimentKind::Pollution, f),
            Command::PmlStudy(f) => (ExperimentKind::PmlStudy, f),
            Command::NewtonTable(f) => (ExperimentKind::NewtonTable, f),
            Command::Bistability(f) => (ExperimentKind::Bistability, f),
        }
    }
}

fn configure(kind: ExperimentKind, flags: &Flags) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &flags.config {
        Some(path) => ExperimentConfig::from_file(path, kind)?,
        None => ExperimentConfig::defaults(kind),
    };
    let e = &mut cfg.experiment;
    if let Some(out) = &flags.out {
        e.out = out.clone();
    }
    if let Some(m) = flags.method {
        e.method = m;
    }
    if let Some(s) = flags.scheme {
        e.scheme = s;
    }
    if let Some(t) = flags.tol {
        e.tol = t;
    }
    if let Some(n) = flags.max_iter {
        e.max_iter = n;
    }
    if let Some(s) = flags.seed {
        e.seed = s;
    }
    if let Some(l) = flags.level {
        cfg.discretization.level = l;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (kind, flags) = cli.command.split();
    let result = configure(kind, &flags).and_then(|cfg| {
        let quiet = flags.quiet;
        let mut log = |line: &str| {
            if !quiet {
                eprintln!("{line}");
            }
        };
        let art = run(&cfg, &mut log)?;
        write_artifacts(&cfg, &art, &cfg.experiment.out)?;
        for line in art.warnings.iter().chain(&art.summary) {
            println!("{line}");
        }
        println!("wrote {} files to {}", art.files.len() + 2, cfg.experiment.out.display());
        Ok(art.numerical_failure)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("error: some solves did not converge");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
