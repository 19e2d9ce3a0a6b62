//! `qvhs`: checks and constructions on algebra, potential and asymptotic
//! data documents.
//!
//! Exit status: 0 when every verdict passes, 1 when some verdict fails, 2
//! for usage, I/O and parse errors.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qvhs", version, about = "Quantum potentials and asymptotic Hodge data, in exact arithmetic")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Truncation order; defaults to the document's order, else 6.
    #[arg(long, global = true)]
    pub order: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for the random cone samples.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of random interior points used to certify that the weight
    /// filtration is constant on the cone.
    #[arg(long, global = true, default_value_t = 4)]
    pub cone_samples: usize,
    /// Write the produced document to this path.
    #[arg(long, global = true)]
    pub emit: Option<PathBuf>,
    /// Include wall-clock timing in the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Frobenius axioms and associativity of the cubic potential.
    CheckFrobenius { algebra: PathBuf },
    /// WDVV, flatness of the connection and the Xi criterion.
    CheckWdvv { potential: PathBuf },
    /// Connection and nilpotent orbit checks; emits the asymptotic data.
    BuildVhs { potential: PathBuf },
    /// Recovers the potential from asymptotic data.
    RecoverPotential {
        asym: PathBuf,
        /// Potential to compare the recovered one against.
        #[arg(long)]
        expect: Option<PathBuf>,
    },
    /// Moves asymptotic data to canonical coordinates.
    CanonicalCoords { asym: PathBuf },
    /// Solves for Gamma from its p_-1 part R.
    SolveGamma { asym: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(report) => {
            print!("{}", output::render(&report, cli.common.format));
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
