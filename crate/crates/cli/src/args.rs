use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "convexcert", version, about = "Sampled convexity/smoothness certification and numerical conjugates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check convexity, strong convexity, smoothness or conjugate conditions.
    Certify(JobArgs),
    /// Tabulate the conjugate of a 1-D function as `s,fstar` CSV.
    Conjugate(JobArgs),
    /// Check that strong convexity and smoothness swap under conjugation.
    Duality(JobArgs),
    /// Inspect the built-in functions.
    Zoo {
        #[command(subcommand)]
        action: ZooAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ZooAction {
    /// One line per function: name, dimension, known constants.
    List,
}

/// Flags shared by every job. Each mirrors a key of the config file.
#[derive(Debug, Default, Clone, Args)]
pub struct JobArgs {
    /// Flat `key = value` file; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Expression in x1..xn, e.g. "x1^2 + exp(x2)".
    #[arg(long, allow_hyphen_values = true)]
    pub func: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Built-in function name (see `zoo list`).
    #[arg(long)]
    pub zoo: Option<String>,
    /// Diagonal of a zoo quadratic, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub diag: Vec<f64>,
    /// Huber threshold.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Bounds of one axis; repeat per axis, or give once for a cube.
    #[arg(
        long = "box",
        num_args = 2,
        value_names = ["LO", "HI"],
        action = ArgAction::Append,
        allow_negative_numbers = true
    )]
    pub bounds: Vec<f64>,
    /// Claimed strong convexity constant.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Claimed Lipschitz constant of the gradient.
    #[arg(long = "L", allow_negative_numbers = true)]
    pub l: Option<f64>,
    /// Number of random sample triples.
    #[arg(long)]
    pub n: Option<usize>,
    /// Interpolation weights per pair for Jensen-type conditions.
    #[arg(long)]
    pub alphas: Option<usize>,
    /// Sampler seed (default: $CONVEXCERT_SEED, else 0).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub fd_step: Option<f64>,
    /// Condition id such as SM_0 or CVX_JENSEN; repeatable.
    #[arg(long = "check", action = ArgAction::Append)]
    pub checks: Vec<String>,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the conjugate table here (conjugate job).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Slope range of the conjugate table.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub slopes: Vec<f64>,
    /// Slope spacing of the conjugate table.
    #[arg(long)]
    pub step: Option<f64>,
    /// Primal grid size of the conjugate table.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Conjugation engine: llt or brute.
    #[arg(long)]
    pub engine: Option<String>,
}
