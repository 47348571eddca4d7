//! `sacs`: run SACS scenarios and parameter sweeps from scenario files.
//!
//! Exit codes: 0 success, 1 `--check` mismatch, 2 configuration or input
//! error, 3 physics validation error, 4 non-adiabatic outcome under
//! `--strict`, 5 spectroscopic data outside tolerance.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "sacs", version, about = "Stark-assisted coherent superposition simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Detuning,
    Contour,
    Surface,
    Gap,
    Levelline,
}

impl SweepKind {
    fn name(self) -> &'static str {
        match self {
            SweepKind::Detuning => "detuning",
            SweepKind::Contour => "contour",
            SweepKind::Surface => "surface",
            SweepKind::Gap => "gap",
            SweepKind::Levelline => "levelline",
        }
    }
}

#[derive(clap::Args, Debug, Clone)]
pub struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Time step in ns; defaults to dt·max‖H‖ = 0.05.
    #[arg(long)]
    dt: Option<f64>,
    /// Recompute and verify against the manifest in --out instead of writing.
    #[arg(long)]
    check: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Propagate one scenario and report the final superposition.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Exit with code 4 on a non-adiabatic outcome.
        #[arg(long)]
        strict: bool,
    },
    /// Run a parameter sweep or surface computation.
    Sweep {
        #[arg(value_enum)]
        kind: SweepKind,
        #[command(flatten)]
        common: Common,
        /// Points per axis, overriding the config.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Check the Einstein-coefficient consistency of the spectroscopic table.
    ValidateData {
        /// Data file; the shipped table by default.
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum Failure {
    Check(String),
    Config(String),
    Physics(String),
    Strict(String),
    Data(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Config(_) => 2,
            Failure::Physics(_) => 3,
            Failure::Strict(_) => 4,
            Failure::Data(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Check(m)
            | Failure::Config(m)
            | Failure::Physics(m)
            | Failure::Strict(m)
            | Failure::Data(m) => m,
        }
    }
}

impl From<sacs_core::Error> for Failure {
    fn from(e: sacs_core::Error) -> Self {
        if e.is_physics() {
            Failure::Physics(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(format!("io error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().collect();
    let command_line = argv.join(" ");
    let result = match cli.command {
        Command::Simulate { common, strict } => commands::simulate(&common, strict, &command_line),
        Command::Sweep { kind, common, grid } => commands::sweep(kind, &common, grid, &command_line),
        Command::ValidateData { data } => commands::validate_data(data.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
