//! `blowup`: JSON front end to the blow-up sequence calculus.
//!
//! Results go to stdout as pretty JSON with sorted keys. Failures go to
//! stderr as `{"error": {"code": ..., "message": ...}}`.
//!
//! Exit codes: 0 success, 1 negative decision under `--exit-status`,
//! 2 input or usage error, 3 internal limit reached.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "blowup", version, about = "Combinatorics of point blow-up sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Intersection tensor of a forest
    Tensor {
        forest: PathBuf,
        /// Also apply the strict validation rules
        #[arg(long)]
        strict: bool,
    },
    /// Final components of a tensor
    Finals { tensor: PathBuf },
    /// Blow down one final component (1-based index)
    Contract { tensor: PathBuf, index: usize },
    /// Recover a forest from a tensor
    Recover {
        tensor: PathBuf,
        /// Write the contraction trace to this file
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Every admissible contraction order
    RecoverAll {
        tensor: PathBuf,
        /// Maximum number of orders to enumerate
        #[arg(long, default_value_t = 1000)]
        limit: usize,
    },
    /// Decide equivalence of two forests or tensors
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        kind: KindArg,
        /// Partition of the first input (marked equivalence)
        #[arg(long, requires = "partition_b")]
        partition_a: Option<PathBuf>,
        /// Partition of the second input (marked equivalence)
        #[arg(long, requires = "partition_a")]
        partition_b: Option<PathBuf>,
        #[command(flatten)]
        status: StatusArg,
    },
    /// Canonical form and hash
    Canon {
        input: PathBuf,
        #[command(flatten)]
        kind: KindArg,
    },
    /// Automorphism orbits
    Orbits {
        input: PathBuf,
        #[command(flatten)]
        kind: KindArg,
    },
    /// Is every block of a partition inside one automorphism orbit?
    Compat {
        input: PathBuf,
        partition: PathBuf,
        #[command(flatten)]
        kind: KindArg,
        #[command(flatten)]
        status: StatusArg,
    },
    /// Tensor induced on block sums
    Quotient { tensor: PathBuf, partition: PathBuf },
    /// Diagonal of a tensor
    Diag { tensor: PathBuf },
    /// Check a forest against the validity rules
    Validate {
        forest: PathBuf,
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        status: StatusArg,
    },
    /// Seeded random forest
    Gen {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        max_degree: u64,
        /// Any target sets of size at most the dimension, not only plausible ones
        #[arg(long)]
        arbitrary: bool,
    },
}

#[derive(Args, Debug)]
struct KindArg {
    /// What the input files hold
    #[arg(long, value_enum, default_value_t = Kind::Tensor)]
    kind: Kind,
}

#[derive(Args, Debug)]
struct StatusArg {
    /// Exit with status 1 on a negative answer
    #[arg(long)]
    exit_status: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Forest,
    Tensor,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exit_status = match &cli.command {
        Command::Equiv { status, .. } | Command::Compat { status, .. } | Command::Validate { status, .. } => {
            status.exit_status
        }
        _ => false,
    };
    match commands::run(cli.command) {
        Ok(out) => {
            print!("{}", out.json);
            if exit_status && out.decision == Some(false) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprint!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
