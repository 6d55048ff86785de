//! `mpp`: estimates, transforms, distinguishability, two-path predictions and
//! Monte Carlo checks from the command line.
//!
//! Exit codes: 0 success, 1 invalid input, 2 prediction outside `[0, 1]`, 3 I/O.

mod commands;
mod config;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mpp_core::{Sign, TransformName};
use thiserror::Error;

use crate::table::Format;

/// Seed used when neither `--seed`, the config file nor `MPP_SEED` gives one.
pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("out-of-model: {0}")]
    OutOfModel(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::OutOfModel(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<mpp_core::Error> for CliError {
    fn from(e: mpp_core::Error) -> Self {
        match e {
            mpp_core::Error::OutOfModel { raw } => CliError::OutOfModel(format!(
                "raw p_tot = {raw} is outside [0, 1] (use --clamp to clamp)"
            )),
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mpp",
    version,
    about = "Run-count-stabilized probability estimates and two-path predictions"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Csv)]
    format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Probability estimate and its half-width from click counts.
    Estimate {
        #[arg(long)]
        clicks: u64,
        #[arg(long)]
        runs: u64,
        /// Use (clicks + 1/2) / (runs + 1) instead of clicks / runs.
        #[arg(long)]
        adjusted: bool,
    },
    /// Evaluate a transform (or invert the arcsin transform with --chi).
    Transform(TransformArgs),
    /// Distinguishability coordinate theta and the count of distinguishable results.
    Distinguish {
        #[arg(long)]
        runs: u64,
        /// Only this click count; every count 0..=runs when omitted.
        #[arg(long)]
        clicks: Option<u64>,
        #[arg(long, default_value_t = 1.0)]
        separation: f64,
    },
    /// Records whose propagated uncertainty does not shrink after one more run.
    Scan {
        #[arg(long, value_parser = parse_transform)]
        transform: TransformName,
        #[arg(long)]
        max_runs: u64,
    },
    /// Predict the both-paths-open probability from two single-path measurements.
    Predict(PredictArgs),
    /// Recover the phase from a measured both-paths-open probability.
    InferPhase {
        #[command(flatten)]
        arms: ArmArgs,
        #[arg(long)]
        p_tot: f64,
    },
    /// Run a Monte Carlo sweep described by a TOML config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config file's seed and MPP_SEED.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[arg(long, value_parser = parse_transform)]
    transform: TransformName,
    #[arg(long, required_unless_present = "chi", conflicts_with = "chi")]
    p: Option<f64>,
    /// Invert: the probability for this chi (arcsin only).
    #[arg(long)]
    chi: Option<f64>,
    /// Runs used for the propagated uncertainty column.
    #[arg(long, default_value_t = 1)]
    runs: u64,
    /// Arcsin scale C.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Arcsin offset D.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    offset: f64,
}

#[derive(Debug, Args)]
struct ArmArgs {
    /// Clicks with only the left path open.
    #[arg(long)]
    nl: u64,
    /// Runs with only the left path open.
    #[arg(long)]
    l: u64,
    /// Clicks with only the right path open.
    #[arg(long)]
    nr: u64,
    /// Runs with only the right path open.
    #[arg(long)]
    r: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Real,
    Complex,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[command(flatten)]
    arms: ArmArgs,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Sign of the real combination (required for --mode real).
    #[arg(long, value_parser = parse_sign)]
    sign: Option<Sign>,
    /// Phase in radians (required for --mode complex).
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// Clamp an out-of-range complex prediction instead of failing.
    #[arg(long)]
    clamp: bool,
}

fn parse_transform(s: &str) -> Result<TransformName, String> {
    s.parse().map_err(|e: mpp_core::Error| e.to_string())
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    s.parse().map_err(|e: mpp_core::Error| e.to_string())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let table = match cli.command {
        Command::Estimate {
            clicks,
            runs,
            adjusted,
        } => commands::estimate(clicks, runs, adjusted)?,
        Command::Transform(a) => {
            commands::transform(a.transform, a.p, a.chi, a.runs, a.scale, a.offset)?
        }
        Command::Distinguish {
            runs,
            clicks,
            separation,
        } => commands::distinguish(runs, clicks, separation)?,
        Command::Scan {
            transform,
            max_runs,
        } => commands::scan(transform, max_runs)?,
        Command::Predict(a) => {
            let ArmArgs { nl, l, nr, r } = a.arms;
            let choice = match a.mode {
                Mode::Real => commands::Combination::Real(a.sign.ok_or_else(|| {
                    CliError::Validation("--mode real needs --sign plus|minus".into())
                })?),
                Mode::Complex => commands::Combination::Complex(
                    a.phi
                        .ok_or_else(|| CliError::Validation("--mode complex needs --phi".into()))?,
                ),
            };
            commands::predict((nl, l), (nr, r), choice, a.clamp)?
        }
        Command::InferPhase { arms, p_tot } => {
            commands::infer_phase((arms.nl, arms.l), (arms.nr, arms.r), p_tot)?
        }
        Command::Simulate { config, seed } => commands::simulate(&config, seed)?,
    };

    let io_err = |e: io::Error| CliError::Io(e.to_string());
    match &cli.output {
        Some(path) => {
            let file =
                File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut out = BufWriter::new(file);
            table.write(cli.format, &mut out).map_err(io_err)?;
            out.flush().map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            table.write(cli.format, &mut out).map_err(io_err)?;
            out.flush().map_err(io_err)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
