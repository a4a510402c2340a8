use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "fscore",
    version,
    about = "Scoring-rule experiments for three-way match forecasts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score one forecast against a realised outcome
    Score(ScoreArgs),
    /// Map expected-score preference regions over the outcome simplex
    Regions(RegionsArgs),
    /// Selection probability of the perfect system under repeated scoring
    Exp1(Exp1Args),
    /// Near-neighbour selection experiment over a forecast pool
    Exp2(Exp2Args),
    /// Convert a bookmaker odds CSV into probability forecasts
    OddsConvert(OddsConvertArgs),
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Forecast probabilities, comma separated (e.g. 0.8,0.1,0.1)
    #[arg(long)]
    pub forecast: String,
    /// Realised outcome: H, D, A, home, draw, away, or a zero-based index
    #[arg(long)]
    pub outcome: String,
    /// Report a single rule instead of all three
    #[arg(long)]
    pub rule: Option<String>,
}

/// A candidate pair given either by built-in label or explicitly.
#[derive(Debug, Args)]
pub struct PairArgs {
    /// Built-in pair label (match1 .. match5)
    #[arg(long, conflicts_with_all = ["alpha", "beta"])]
    pub pair: Option<String>,
    /// First forecast of an explicit pair, comma separated
    #[arg(long, requires = "beta")]
    pub alpha: Option<String>,
    /// Second forecast of an explicit pair, comma separated
    #[arg(long, requires = "alpha")]
    pub beta: Option<String>,
}

#[derive(Debug, Args)]
pub struct RegionsArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Truth points to sample from the simplex
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    /// Master seed
    #[arg(long)]
    pub seed: u64,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Exp1Args {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Sequence-length grid: N, A:B, A:B:pow2, or a comma list
    #[arg(long, default_value = "1:50")]
    pub n: String,
    /// Monte Carlo replicates per grid point
    #[arg(long, default_value_t = 10_000)]
    pub replicates: usize,
    /// Probability that a trial's generating side is alpha
    #[arg(long, default_value_t = 0.5)]
    pub mixing_prob: f64,
    /// Exact enumeration instead of Monte Carlo
    #[arg(long)]
    pub exact: bool,
    /// Master seed (unused by --exact, still recorded)
    #[arg(long)]
    pub seed: u64,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Exp2Args {
    /// Odds CSV to build the candidate pool from
    #[arg(long, conflicts_with = "synthetic")]
    pub data: Option<PathBuf>,
    /// Generate a synthetic pool of this size instead
    #[arg(long)]
    pub synthetic: Option<usize>,
    /// Keep only rows from this league code
    #[arg(long)]
    pub league: Option<String>,
    /// Season label attached to data rows
    #[arg(long)]
    pub season: Option<String>,
    /// Neighbourhood radii, comma separated
    #[arg(long, default_value = "0.01,0.025,0.05,0.1")]
    pub delta: String,
    /// Sequence-length grid: N, A:B, A:B:pow2, or a comma list
    #[arg(long, default_value = "2:1024:pow2")]
    pub n: String,
    /// Trials per (delta, n) cell
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Bootstrap resamples for the difference intervals
    #[arg(long, default_value_t = 1000)]
    pub resamples: usize,
    /// Pairing-preview draws per delta (0 to skip)
    #[arg(long, default_value_t = 1000)]
    pub preview: usize,
    /// Master seed
    #[arg(long)]
    pub seed: u64,
    /// Output directory
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct OddsConvertArgs {
    /// Odds CSV to convert
    #[arg(long)]
    pub data: PathBuf,
    /// Keep only rows from this league code
    #[arg(long)]
    pub league: Option<String>,
    /// Season label attached to data rows
    #[arg(long)]
    pub season: Option<String>,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
}
