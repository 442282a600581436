use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

/// Quantum channel capacity toolkit: channels, direct sums, verifier
/// reductions and zero-error graph certificates.
#[derive(Debug, Parser)]
#[command(name = "capq", version)]
pub struct Cli {
    /// Seed for every random choice (restart streams, random instances).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for parallel restarts.
    #[arg(long, global = true, env = "CAPQ_THREADS")]
    pub threads: Option<usize>,

    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect a channel file.
    Channel {
        #[command(subcommand)]
        action: ChannelAction,
    },
    /// Estimate the one-shot quantum capacity of a channel.
    Capacity(CapacityArgs),
    /// Build a projective direct sum and optionally check one of its laws.
    Directsum(DirectsumArgs),
    /// Turn a verifier circuit into a channel and estimate its capacity.
    Reduce(ReduceArgs),
    /// Zero-error pipeline for a confusability graph.
    Graph(GraphArgs),
    /// Run the reproducible check suite.
    Selftest,
}

#[derive(Debug, Subcommand)]
pub enum ChannelAction {
    /// Check trace preservation and complete positivity.
    Validate { file: PathBuf },
    /// Print the normalized Choi matrix.
    Choi { file: PathBuf },
    /// Print the complementary channel.
    Complement { file: PathBuf },
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    /// Number of parallel channel uses (1 or 2).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
    pub copies: u32,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Check {
    Complement,
    Additivity,
    Bound,
}

#[derive(Debug, Args)]
pub struct DirectsumArgs {
    #[arg(long)]
    pub phi0: PathBuf,
    #[arg(long)]
    pub phi1: PathBuf,
    #[arg(long)]
    pub povm: PathBuf,
    #[arg(long)]
    pub sigma: PathBuf,
    #[arg(long, value_enum)]
    pub check: Option<Check>,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    /// Tolerance for the selected check.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long)]
    pub verifier: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub sigma_restarts: usize,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    /// Also optimize over entangled proof-message inputs (experimental).
    #[arg(long)]
    pub joint: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").args(["bounds", "gram", "channel", "certify"])))]
pub struct GraphArgs {
    /// Edge-list or DIMACS graph file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Certified capacity bounds (the default).
    #[arg(long)]
    pub bounds: bool,
    /// Gram vectors and their defect.
    #[arg(long)]
    pub gram: bool,
    /// Write the c-q channel as JSON to this path.
    #[arg(long, value_name = "OUT")]
    pub channel: Option<PathBuf>,
    /// Check a strategy file and certify its message count.
    #[arg(long, value_name = "STRATEGY")]
    pub certify: Option<PathBuf>,
}
