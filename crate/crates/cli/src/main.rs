//! Experiment runner for the monotonicity-testing laboratory.
//!
//! Subcommands: run (manifest in, CSV + JSON summary out), distance, ns,
//! calibrate, generate, audit. All commands are deterministic in their
//! seeds; `run` parallelizes over trials (set RAYON_NUM_THREADS to control
//! the worker count).

// Negated float comparisons are NaN guards (see monotest-core).
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod manifest;
mod ops;
mod runner;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use manifest::{FunctionFamily, LtfEnsemble, Manifest};

#[derive(Parser)]
#[command(name = "monotest", version, about = "Monotonicity-testing experiments on the Boolean hypercube")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    TruthTableRandom,
    MonotoneTable,
    Ltf,
    Talagrand,
    ShiftedTalagrand,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EnsembleArg {
    Yes,
    No,
    Custom,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment manifest: writes <output>.csv and
    /// <output>.summary.json.
    Run {
        #[arg(long)]
        manifest: PathBuf,
        /// Override the manifest's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Exact distance to monotone of a function document (n <= 20).
    Distance {
        #[arg(long)]
        function: PathBuf,
    },
    /// Noise sensitivity of a function document: exact by default,
    /// Monte-Carlo with --trials.
    Ns {
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Calibrate the bisection-process constant kappa(delta).
    Calibrate {
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1 << 16)]
        size: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Sample a function from a family and emit its JSON document.
    Generate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// LTF weight ensemble (ltf family).
        #[arg(long, value_enum, default_value_t = EnsembleArg::Yes)]
        ensemble: EnsembleArg,
        /// Custom atoms "value:prob,value:prob" (ltf family, ensemble=custom).
        #[arg(long)]
        atoms: Option<String>,
        /// LTF threshold (ltf family).
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// Seed density (monotone_table family).
        #[arg(long, default_value_t = 0.15)]
        density: f64,
        /// Clause cap (talagrand families).
        #[arg(long, default_value_t = 1 << 16)]
        clause_cap: u64,
        /// Wrap the sampled function in a delta-truncation.
        #[arg(long)]
        truncate_delta: Option<f64>,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Balance audit over an existing run CSV.
    Audit {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        delta_band: f64,
    },
}

fn parse_atoms(spec: &str) -> Result<Vec<(f64, f64)>> {
    spec.split(',')
        .map(|tok| {
            let (value, prob) = tok
                .split_once(':')
                .with_context(|| format!("atom {tok:?} is not value:prob"))?;
            Ok((
                value.trim().parse().with_context(|| format!("atom value {value:?}"))?,
                prob.trim().parse().with_context(|| format!("atom prob {prob:?}"))?,
            ))
        })
        .collect()
}

fn family_from_args(
    family: FamilyArg,
    ensemble: EnsembleArg,
    atoms: Option<String>,
    theta: f64,
    density: f64,
    clause_cap: u64,
    truncate_delta: Option<f64>,
) -> Result<FunctionFamily> {
    Ok(match family {
        FamilyArg::TruthTableRandom => FunctionFamily::TruthTableRandom { truncate_delta },
        FamilyArg::MonotoneTable => FunctionFamily::MonotoneTable {
            density,
            truncate_delta,
        },
        FamilyArg::Ltf => FunctionFamily::Ltf {
            ensemble: match ensemble {
                EnsembleArg::Yes => LtfEnsemble::Yes,
                EnsembleArg::No => LtfEnsemble::No,
                EnsembleArg::Custom => LtfEnsemble::Custom,
            },
            atoms: atoms.as_deref().map(parse_atoms).transpose()?.unwrap_or_default(),
            theta,
            truncate_delta,
        },
        FamilyArg::Talagrand => FunctionFamily::Talagrand {
            clause_cap,
            truncate_delta,
        },
        FamilyArg::ShiftedTalagrand => FunctionFamily::ShiftedTalagrand {
            clause_cap,
            truncate_delta,
        },
    })
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { manifest, seed } => {
            let json = std::fs::read_to_string(&manifest)
                .with_context(|| format!("reading manifest {}", manifest.display()))?;
            let parsed = Manifest::from_json(&json)?;
            let outputs = runner::cmd_run(parsed, seed)?;
            println!(
                "wrote {} and {}",
                outputs.csv_path.display(),
                outputs.summary_path.display()
            );
        }
        Command::Distance { function } => println!("{}", ops::cmd_distance(&function)?),
        Command::Ns {
            function,
            delta,
            trials,
            seed,
        } => println!("{}", ops::cmd_ns(&function, delta, trials, seed)?),
        Command::Calibrate {
            delta,
            size,
            trials,
            seed,
        } => println!("{}", ops::cmd_calibrate(delta, size, trials, seed)?),
        Command::Generate {
            family,
            n,
            seed,
            ensemble,
            atoms,
            theta,
            density,
            clause_cap,
            truncate_delta,
            out,
        } => {
            let family =
                family_from_args(family, ensemble, atoms, theta, density, clause_cap, truncate_delta)?;
            let doc = ops::cmd_generate(&family, n, seed)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, format!("{doc}\n"))
                        .with_context(|| format!("writing {}", path.display()))?;
                    println!("wrote {}", path.display());
                }
                None => println!("{doc}"),
            }
        }
        Command::Audit { csv, delta_band } => println!("{}", ops::cmd_audit(&csv, delta_band)?),
    }
    Ok(())
}
