mod commands;
mod error;
mod files;
mod format;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mincouple_core::{Layout, RenyiOrder, SplitLimits};

use commands::{CoupleArgs, Status};
use error::CliError;

/// Near-minimum-entropy couplings of discrete distributions.
#[derive(Debug, Parser)]
#[command(name = "mincouple", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Greatest lower bound of a collection under majorization.
    Glb {
        input: PathBuf,
        /// Entropy order for the report: a number, "shannon" or "inf".
        #[arg(long, default_value = "1")]
        alpha: RenyiOrder,
    },
    /// Build a coupling and print a summary.
    Couple {
        input: PathBuf,
        /// Stop each Bernoulli split after this many sticks.
        #[arg(long, value_name = "L")]
        trunc: Option<usize>,
        /// Stop each Bernoulli split once the uncovered length is at most this.
        #[arg(long)]
        eps: Option<f64>,
        /// Write the coupling here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "1")]
        alpha: RenyiOrder,
    },
    /// Draw correlated samples from a coupling file.
    Sample {
        coupling: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, value_enum, default_value_t = LayoutArg::Both)]
        layout: LayoutArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a coupling file against the collection it was built from.
    Verify {
        coupling: PathBuf,
        input: PathBuf,
        #[arg(long, default_value = "1")]
        alpha: RenyiOrder,
    },
    /// Score both causal directions of a joint table.
    Causal { joint: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LayoutArg {
    Cell,
    Labels,
    Both,
}

impl From<LayoutArg> for Layout {
    fn from(l: LayoutArg) -> Self {
        match l {
            LayoutArg::Cell => Layout::Cell,
            LayoutArg::Labels => Layout::Labels,
            LayoutArg::Both => Layout::Both,
        }
    }
}

fn run(cli: Cli) -> Result<Status, CliError> {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let status = match cli.command {
        Command::Glb { input, alpha } => commands::glb(&input, alpha, &mut out)?,
        Command::Couple {
            input,
            trunc,
            eps,
            out: path,
            alpha,
        } => {
            let limits = SplitLimits {
                max_steps: trunc,
                eps,
            };
            let args = CoupleArgs {
                input: &input,
                limits,
                order: alpha,
                out: path.as_deref(),
            };
            if path.is_some() {
                commands::couple(args, &mut io::sink(), &mut out)?
            } else {
                commands::couple(args, &mut out, &mut io::stderr().lock())?
            }
        }
        Command::Sample {
            coupling,
            seed,
            count,
            layout,
            out: path,
        } => commands::sample(&coupling, seed, count, layout.into(), path.as_deref(), &mut out)?,
        Command::Verify {
            coupling,
            input,
            alpha,
        } => commands::verify(&coupling, &input, alpha, &mut out)?,
        Command::Causal { joint } => commands::causal(&joint, &mut out)?,
    };
    out.flush()?;
    Ok(status)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::InvariantFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
