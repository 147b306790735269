use std::path::PathBuf;

use clap::Parser;
use serde::Serialize;

/// Rainbow-matching experiments. Prints one JSON report on stdout.
///
/// Exit status: 0 definitive result, 2 inconclusive (budget), 1 usage or
/// input error.
#[derive(Debug, Parser, Serialize)]
#[command(name = "rainbowlab", version, about, after_help = crate::commands::COMMAND_HELP)]
pub struct Args {
    /// Subcommand name.
    #[serde(skip)]
    pub command: String,
    /// Verb for `nullsatz` and `shift`.
    #[serde(skip)]
    pub verb: Option<String>,

    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub s: Option<usize>,
    /// Thresholds f_1,...,f_s.
    #[arg(long, value_delimiter = ',')]
    pub seq: Vec<u64>,
    /// Family file to read.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Family file or CSV to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "RAINBOWLAB_WORKERS", default_value_t = 1)]
    #[serde(skip)]
    pub workers: usize,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Vec<f64>,
    #[arg(long)]
    pub r_override: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub perm_a: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    pub perm_b: Vec<u32>,
    /// Exponent vector for `nullsatz coeff` and `coeff-mod`.
    #[arg(long, value_delimiter = ',')]
    pub exponents: Vec<u32>,
    #[arg(long)]
    pub mod_p: Option<u64>,
    /// Search-node budget.
    #[arg(long)]
    pub max_nodes: Option<u64>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Rainbow search strategy.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Spread pattern selector.
    #[arg(long)]
    pub selector: Option<String>,
    /// Density of the random family for `concentration`.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Random systems tried by `falsify`.
    #[arg(long)]
    pub iterations: Option<u64>,
    /// Coordinate, target and source value of a single shift.
    #[arg(long)]
    pub j: Option<u32>,
    #[arg(long)]
    pub a: Option<u32>,
    #[arg(long)]
    pub b: Option<u32>,
    /// Disable symmetry pruning in exhaustive verification.
    #[arg(long)]
    pub no_symmetry: bool,
    /// Report elapsed_ms as 0 so output is byte-identical across runs.
    #[arg(long)]
    #[serde(skip)]
    pub no_timing: bool,
}
