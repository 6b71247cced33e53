//! `sparc`: theory evaluation, encode/decode round trips, solution
//! censuses and seeded experiment campaigns.
//!
//! Exit status is 0 on success, 2 on domain or configuration errors and 3
//! when an exhaustive search would exceed the codeword budget.

mod codec_cmd;
mod experiment_cmd;
mod theory_cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;
use sparc_core::sparc::DEFAULT_CODEWORD_BUDGET;
use sparc_core::Error;

#[derive(Debug, Parser)]
#[command(name = "sparc", version, about = "Sparse regression codes for lossy compression of Gaussian sources")]
pub struct Cli {
    /// Seed for the design matrix (and anything else drawn at random)
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Experiment configuration (JSON, or TOML by extension)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output path (file or directory, depending on the subcommand)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Maximum number of codewords an exhaustive search may visit
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_CODEWORD_BUDGET)]
    pub budget: u64,

    /// Report rates in bits instead of nats
    #[arg(long, global = true)]
    pub bits: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a closed-form quantity, or the full panel with --all
    #[command(allow_negative_numbers = true)]
    Theory(theory_cmd::TheoryArgs),
    /// Encode a source block and write the outcome as JSON
    Encode(codec_cmd::EncodeArgs),
    /// Reconstruct a source block from an encoded outcome
    Decode(codec_cmd::DecodeArgs),
    /// Count solutions around the encoder's choice, bucketed by overlap
    Census(codec_cmd::CensusArgs),
    /// Run the campaign named by --config and write CSV plus a manifest
    Experiment,
    /// Emit the R*(D) versus R0(D) comparison table as CSV
    Curves(experiment_cmd::CurvesArgs),
}

/// Global flags shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Globals {
    pub seed: u64,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub budget: u64,
    pub bits: bool,
}

impl Globals {
    /// Converts a quantity in nats to the requested unit.
    pub fn rate(&self, nats: f64) -> f64 {
        if self.bits {
            nats / std::f64::consts::LN_2
        } else {
            nats
        }
    }

    pub fn units(&self) -> &'static str {
        if self.bits {
            "bits"
        } else {
            "nats"
        }
    }
}

/// Prints the resolved configuration to stderr before any work starts.
pub fn announce(subcommand: &str, resolved: &Value) {
    eprintln!("sparc {subcommand}: {resolved}");
}

pub fn print_json(value: &Value) -> Result<(), Error> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Budget { .. } | Error::Allocation { .. } => 3,
        Error::Internal(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let globals = Globals { seed: cli.seed, config: cli.config, out: cli.out, budget: cli.budget, bits: cli.bits };
    let result = match cli.command {
        Command::Theory(args) => theory_cmd::run(&args, &globals),
        Command::Encode(args) => codec_cmd::run_encode(&args, &globals),
        Command::Decode(args) => codec_cmd::run_decode(&args, &globals),
        Command::Census(args) => codec_cmd::run_census(&args, &globals),
        Command::Experiment => experiment_cmd::run_experiment(&globals),
        Command::Curves(args) => experiment_cmd::run_curves(&args, &globals),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
