//! Command-line definition.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hmqct_core::keyrate::BoundKind;
use hmqct_core::Beta;

use crate::config::Sampling;
use crate::grid::{parse_count, parse_real};

/// Environment variable read when `--seed` is absent.
pub const SEED_ENV: &str = "HMQCT_SEED";

/// Seed used when neither the flag, the environment nor the config file
/// sets one.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(name = "hmqct", version, about = "Key-rate analysis and simulation of hidden-matching quantum key distribution")]
pub struct Cli {
    /// RNG seed [default: 20240601]. Precedence: flag, then environment, then config file.
    #[arg(long, global = true, env = SEED_ENV, value_parser = parse_count)]
    pub seed: Option<u64>,

    /// Settings file of `key = value` lines; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rate-versus-distance CSV for both bounds and the baselines.
    Curve(CurveArgs),
    /// Run a full protocol session through the Monte Carlo channel.
    Simulate(SimulateArgs),
    /// Closed-form channel quantities and rate at one operating point.
    Analytic(AnalyticArgs),
    /// Subset-guessing adversary: formula, Monte Carlo and exact error.
    Adversary(AdversaryArgs),
    /// Self-delimiting integer code.
    #[command(subcommand)]
    Codec(CodecCommand),
    /// Guessing-probability bounds per copy count.
    Bounds(BoundsArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Number of optical modes [default: 1024]
    #[arg(long, value_parser = parse_count)]
    pub n: Option<u64>,
    /// Matching density p/q in (0, 1/2] [default: 1/4]
    #[arg(long)]
    pub beta: Option<Beta>,
    /// Noisy-memory distance [default: 1e-4]
    #[arg(long, value_parser = parse_real)]
    pub delta: Option<f64>,
    /// Dark-count probability per detector and round [default: 1e-8]
    #[arg(long = "p-dark", value_parser = parse_real)]
    pub p_dark: Option<f64>,
    /// Detector efficiency [default: 0.65]
    #[arg(long = "eta-det", value_parser = parse_real)]
    pub eta_det: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Distances in km as start:stop:step [default: 0:300:1]
    #[arg(long = "L", value_name = "GRID")]
    pub l: Option<String>,
    /// Largest copy count searched [default: ceil(4 sqrt n)]
    #[arg(long = "m-max", value_parser = parse_count)]
    pub m_max: Option<u64>,
    /// Output file [default: stdout]
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Distance in km [default: 10]
    #[arg(long = "L", value_name = "KM")]
    pub l: Option<String>,
    /// Copies per round [default: rate-optimal]
    #[arg(long, value_name = "M")]
    pub m: Option<String>,
    /// Number of rounds, e.g. 1e6 [default: 1e5]
    #[arg(long, value_parser = parse_count)]
    pub rounds: Option<u64>,
    /// Fraction of conclusive rounds revealed for QBER estimation [default: 0.1]
    #[arg(long = "pe-fraction", value_parser = parse_real)]
    pub pe_fraction: Option<f64>,
    /// theorem4 or optimistic [default: optimistic]
    #[arg(long)]
    pub bound: Option<BoundKind>,
    /// Mock cipher key size [default: 256]
    #[arg(long = "key-bits", value_parser = parse_count)]
    pub key_bits: Option<u64>,
    /// full or answer-only [default: full]
    #[arg(long)]
    pub sampling: Option<Sampling>,
    /// Summary file [default: stdout]
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Per-round CSV file
    #[arg(long = "rounds-csv")]
    pub rounds_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Distance in km [default: 10]
    #[arg(long = "L", value_name = "KM")]
    pub l: Option<String>,
    /// Copies per round [default: rate-optimal]
    #[arg(long, value_name = "M")]
    pub m: Option<String>,
    /// theorem4 or optimistic [default: optimistic]
    #[arg(long)]
    pub bound: Option<BoundKind>,
}

#[derive(Debug, Args)]
pub struct AdversaryArgs {
    /// Number of positions [default: 4]
    #[arg(long, value_parser = parse_count)]
    pub n: Option<u64>,
    /// Matching density [default: 1/4]
    #[arg(long)]
    pub beta: Option<Beta>,
    /// Budgets as a..b, start:stop:step or a list [default: 0..n]
    #[arg(long, value_name = "RANGE")]
    pub d: Option<String>,
    /// Monte Carlo trials per budget [default: 1e5]
    #[arg(long, value_parser = parse_count)]
    pub trials: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum CodecCommand {
    /// Encode positive integers; prints the bit string and its hex bytes.
    Encode {
        #[arg(required = true, value_name = "Z")]
        values: Vec<String>,
    },
    /// Decode a bit string (or hex bytes with --hex); prints one value per line.
    Decode {
        #[arg(value_name = "BITS")]
        input: String,
        #[arg(long)]
        hex: bool,
    },
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Number of modes [default: 4]
    #[arg(long, value_parser = parse_count)]
    pub n: Option<u64>,
    #[arg(long)]
    pub beta: Option<Beta>,
    /// Noisy-memory distance [default: 0]
    #[arg(long, value_parser = parse_real)]
    pub delta: Option<f64>,
    /// Copy counts [default: 1]
    #[arg(long, value_name = "RANGE")]
    pub m: Option<String>,
}
