//! Library side of the `qkz-lab` executable, so the driver can be exercised in-process.

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use output::{RunReport, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS, EXIT_POLE};

#[derive(Debug, Parser)]
#[command(name = "qkz-lab", version, about = "Exact checks of the rational R-matrix and the qKZ connection")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Also write the report to FILE.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Seed for randomized trials (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeName {
    Bare,
    Normalized,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModeArgs {
    #[arg(long, value_enum)]
    pub mode: Option<ModeName>,
    /// Truncation order in ħ; implies normalized mode unless --mode says otherwise.
    #[arg(long)]
    pub order: Option<usize>,
    /// Numeric ħ for bare mode (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub hbar: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SystemArgs {
    /// Comma-separated points z_1,...,z_n.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub points: Option<Vec<String>>,
    /// Level k; the lattice step is ħ(k+2).
    #[arg(long, allow_hyphen_values = true)]
    pub level: Option<String>,
    /// Number of points; without --points they are drawn from the seed.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Yang-Baxter equation at (u, v), or at random points.
    Ybe {
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// R(z) R^(21)(-z) = I.
    Unitarity {
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Crossing identity; in bare mode reports the scalar ratio.
    Crossing {
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Quantum determinant, symbolic in t; with a system also its multiplicativity.
    Qdet {
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
    },
    /// RLL exchange relations in the evaluation representation.
    Rll {
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        system: SystemArgs,
        /// plus_plus, minus_plus or minus_minus (default: all three).
        #[arg(long)]
        relation: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t_prime: Option<String>,
        #[arg(long)]
        i: Option<usize>,
        #[arg(long)]
        j: Option<usize>,
        /// Value of the central element (0 in the evaluation representation).
        #[arg(long, allow_hyphen_values = true)]
        central: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Compatibility of the difference operators over all pairs (i, j).
    Flatness {
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        system: SystemArgs,
    },
    /// Transports a vector along a lattice path.
    Transport {
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        system: SystemArgs,
        /// Comma-separated signed leg indices, e.g. 1,2,-1,-2.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        steps: Option<Vec<i64>>,
        /// Comma-separated 2^n components (default: first basis vector).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        vector: Option<Vec<String>>,
    },
    /// Order-ħ² bracket table of the RLL relations against the loop algebra.
    Classical {
        /// plus_plus, minus_plus or minus_minus (default: all three).
        #[arg(long)]
        relation: Option<String>,
        /// Mode cutoff M >= 1 (default 2).
        #[arg(long, allow_hyphen_values = true)]
        cutoff: Option<i64>,
        /// signed (default), transposed or direct.
        #[arg(long)]
        identification: Option<String>,
    },
    /// Every check above on seeded random data.
    ReportAll {
        #[arg(long)]
        trials: Option<usize>,
    },
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code with the rendered report. `--out` is honored here.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            return (code, e.render().to_string());
        }
    };
    let report = commands::execute(&cli);
    let text = report.to_json();
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &text) {
            let err = qkz_core::Error::InvalidConfig(format!("cannot write {}: {e}", path.display()));
            let failed = RunReport::failed(&report.command, report.seed, &err);
            return (failed.exit_code, failed.to_json());
        }
    }
    (report.exit_code, text)
}
