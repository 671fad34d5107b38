//! Command-line front end: one subcommand per experiment.
//!
//! Exit codes: 0 all assertions pass, 1 assertion failure,
//! 2 configuration error, 3 numeric failure.

use clap::{Args, Parser, Subcommand};
use cubiclab::harness::{run, Experiment, ExperimentConfig};
use cubiclab::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cubiclab",
    about = "Configurable-precision numerical laboratory for the cubic random matrix model",
    version
)]
struct Cli {
    #[command(subcommand)]
    experiment: ExperimentCommand,
}

#[derive(Args)]
struct CommonArgs {
    /// Working decimal precision (each experiment has its own floor).
    #[arg(long)]
    digits: Option<u32>,
    /// Worker-pool size for independent model points.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory for result.json and CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Key-value configuration file (documented in the harness module).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Recurrence coefficients at u = 0 against the exact Gaussian values.
    GaussianOracle(CommonArgs),
    /// String-equation residuals at the critical coupling.
    StringResiduals(CommonArgs),
    /// Exact Toda identity via second differences of the free energy.
    Toda(CommonArgs),
    /// Free energy against the regular N^-2 expansion.
    RegularFreeEnergy(CommonArgs),
    /// N^{2/5}-scaled convergence of gamma^2 at the critical coupling.
    CriticalConvergence(CommonArgs),
    /// Recurrence coefficients against the double-scaling predictions.
    DoubleScalingSweep(CommonArgs),
    /// Trace of the scaling ODE solution with pole list.
    PainleveTrace(CommonArgs),
    /// Zeros of the partition function versus ODE poles (expected fragile).
    Zeros(CommonArgs),
}

impl ExperimentCommand {
    fn split(self) -> (Experiment, CommonArgs) {
        match self {
            ExperimentCommand::GaussianOracle(a) => (Experiment::GaussianOracle, a),
            ExperimentCommand::StringResiduals(a) => (Experiment::StringResiduals, a),
            ExperimentCommand::Toda(a) => (Experiment::Toda, a),
            ExperimentCommand::RegularFreeEnergy(a) => (Experiment::RegularFreeEnergy, a),
            ExperimentCommand::CriticalConvergence(a) => (Experiment::CriticalConvergence, a),
            ExperimentCommand::DoubleScalingSweep(a) => (Experiment::DoubleScalingSweep, a),
            ExperimentCommand::PainleveTrace(a) => (Experiment::PainleveTrace, a),
            ExperimentCommand::Zeros(a) => (Experiment::Zeros, a),
        }
    }
}

fn build_config(experiment: Experiment, args: &CommonArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_file_str(experiment, &text)?
        }
        None => ExperimentConfig::defaults(experiment),
    };
    if let Some(d) = args.digits {
        cfg.digits = d;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = cli.experiment.split();
    let cfg = match build_config(experiment, &args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(report) => {
            for a in report.assertions.iter() {
                let status = if a.pass { "pass" } else { "FAIL" };
                println!("[{status}] {}: {} (bound {})", a.name, a.value, a.bound);
            }
            for w in report.warnings.iter() {
                let status = if w.pass { "ok" } else { "warning" };
                println!("[{status}] {}: {} ({})", w.name, w.value, w.bound);
            }
            println!(
                "results written to {}",
                cfg.out_dir.join("result.json").display()
            );
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Error::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("numeric failure: {e}");
            ExitCode::from(3)
        }
    }
}
