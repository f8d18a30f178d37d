//! `osc`: run verification experiments, dump assembled operators, list the catalog.
//!
//! Exit codes: 0 pass, 1 a check failed, 2 configuration or I/O error,
//! 3 a rank could not be decided at the configured tolerance.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use osc_core::report::{self, ExperimentConfig, MatrixSelector};

const CONFIG_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "osc", version, about = "Oscillatory Hilbert-module and twisted de Rham experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config and emit a JSON report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the relative rank/kernel threshold.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Assemble the complex of a config and write one operator as a matrix file.
    Dump {
        #[arg(long)]
        config: PathBuf,
        /// One of d:K, adjoint:K, laplacian:K, gram:K.
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the experiment catalog.
    List {
        #[arg(long)]
        json: bool,
    },
}

fn load_config(path: &Path) -> anyhow::Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ExperimentConfig::from_json(&text)?)
}

/// Thread count from `OSC_THREADS`, defaulting to one.
fn init_threads() -> anyhow::Result<()> {
    let threads = match std::env::var("OSC_THREADS") {
        Ok(v) => v.trim().parse::<usize>().with_context(|| format!("OSC_THREADS={v:?} is not a count"))?.max(1),
        Err(_) => 1,
    };
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn execute(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Run { config, out, seed, tol } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(tol) = tol {
                cfg.tolerances.rank_rel = tol;
            }
            let report = report::run(&cfg)?;
            let json = report.to_json();
            match out {
                Some(path) => std::fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?,
                None => println!("{json}"),
            }
            let failed = report.entries().iter().filter(|e| !e.pass).count();
            eprintln!(
                "{}: {:?} ({} checks, {failed} not passing, {:.3}s)",
                cfg.experiment,
                report.outcome(),
                report.entries().len(),
                report.duration_seconds
            );
            Ok(report.exit_code() as u8)
        }
        Command::Dump { config, matrix, out } => {
            let cfg = load_config(&config)?;
            let selector: MatrixSelector = matrix.parse()?;
            report::dump_matrix(&cfg, selector, &out)?;
            eprintln!("wrote {matrix} to {}", out.display());
            Ok(0)
        }
        Command::List { json } => {
            let catalog = report::list_experiments();
            if json {
                println!("{}", serde_json::to_string_pretty(&catalog)?);
            } else {
                for e in catalog {
                    println!("{:<11} {}\n            anchor: {}", e.name, e.description, e.anchor);
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| execute(cli));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(CONFIG_ERROR)
        }
    }
}
