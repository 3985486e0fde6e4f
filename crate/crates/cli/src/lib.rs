//! Library half of the `pgame` binary: argument parsing, command dispatch
//! and output rendering. [`run`] is what `main` calls; tests call it directly
//! with in-memory writers.
// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod error;
pub mod grid;
pub mod report;

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "pgame", version, about = "Partnership game: stage equilibria, trigger strategies and repeated play")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub c1: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub c2: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Nash equilibrium, joint optimum and critical discount factor.
    Analyze {
        #[command(flatten)]
        params: ParamArgs,
        /// Optional discount factor; adds the trigger columns.
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Critical discount factor for grim-trigger cooperation at the optimum.
    Threshold {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Largest effort sustainable by grim trigger at a discount factor.
    Sustain {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Subgame-perfection check for a trigger target.
    Spe {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        /// `xhat`, `xstar` or an explicit effort.
        #[arg(long, default_value = "xhat")]
        target: String,
        /// Grid points for the numerical deviation scan.
        #[arg(long, default_value_t = 10_001)]
        grid: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Plays the repeated game under grim trigger, optionally with a scripted
    /// one-period deviation by player 2.
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, default_value_t = 10)]
        periods: usize,
        /// Period at which player 2 deviates.
        #[arg(long)]
        deviate_at: Option<usize>,
        /// Deviation effort; defaults to the best response to the target.
        #[arg(long, allow_negative_numbers = true)]
        deviation: Option<f64>,
        #[arg(long, default_value = "xhat")]
        target: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Evaluates a grid of parameter points and writes one CSV row per point.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        c1: String,
        #[arg(long, allow_hyphen_values = true)]
        c2: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Randomised cross-check of every closed form against its oracle.
    Verify {
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match commands::dispatch(&cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            if !matches!(e, CliError::VerificationFailed) {
                let _ = writeln!(err, "error: {e}");
            }
            e.exit_code()
        }
    }
}
