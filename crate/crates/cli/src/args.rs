use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lrcone_core::dynamics::NormKind;

#[derive(Debug, Parser)]
#[command(name = "lrcone", version, about = "Lieb-Robinson bounds for power-law interactions and their numerical verification")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "LRCONE_OUT", default_value = "lrcone-out")]
    pub out: PathBuf,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the light-cone envelope on an (r, t) grid and trace the velocity recursion.
    Bound(BoundArgs),
    /// Iterate the exponent tightening map to its fixed point.
    Fixpoint(FixpointArgs),
    /// Measure operator spreading with exact dynamics.
    Simulate(SimulateArgs),
    /// Run the verification harness.
    Verify(VerifyArgs),
    /// Print the bound comparison table with exact rationals.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// JSON config; flags given on the command line override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Interaction exponent, 2d < alpha < 2d+1.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Lattice dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Distance grid [default: 1:100:10].
    #[arg(long)]
    pub r: Option<String>,
    /// Time grid [default: 0.1:10:20].
    #[arg(long)]
    pub t: Option<String>,
    /// Theorem epsilon [default: 0.1].
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Envelope prefactor of the front term [default: 1].
    #[arg(long)]
    pub c1: Option<f64>,
    /// Envelope prefactor of the tail term [default: 1].
    #[arg(long)]
    pub c2: Option<f64>,
    /// Window constant c in t <= c r^(alpha-2d-epsilon) [default: 1].
    #[arg(long)]
    pub window: Option<f64>,
    /// Level-count parameter eta for the recursion [default: 0.1].
    #[arg(long)]
    pub eta: Option<f64>,
    /// Shell epsilon for the lambda constant [default: 0.25].
    #[arg(long)]
    pub shell_epsilon: Option<f64>,
    /// Exponential-interaction constant nu [default: 4e].
    #[arg(long)]
    pub nu: Option<f64>,
    /// Lattice sum tau [default: computed on a hypercubic lattice].
    #[arg(long)]
    pub tau: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FixpointArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Level-count parameter, 0 <= eta < 1/(alpha-d) [default: 0].
    #[arg(long)]
    pub eta: Option<f64>,
    /// Convergence tolerance [default: 1e-12].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap [default: 10000].
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON config describing the model and the (r, t) grid.
    #[arg(long)]
    pub config: PathBuf,
    /// Override the interaction exponent of a sampled model.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Override the seed of a sampled model.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the norm.
    #[arg(long, value_enum)]
    pub norm: Option<NormArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NormArg {
    Operator,
    Frobenius,
}

impl From<NormArg> for NormKind {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Operator => NormKind::Operator,
            NormArg::Frobenius => NormKind::Frobenius,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// JSON sweep config.
    #[arg(long, required_unless_present_any = ["preset", "list_checks"], conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Bundled config instead of a file.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Worker threads; 0 uses every core. Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Override the master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print the available checks and exit.
    #[arg(long)]
    pub list_checks: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Preset {
    /// 2-site chain, runs in well under a second.
    Smoke,
    /// 6-site chain, three exponents, three realizations.
    Chain6,
}

impl Preset {
    pub fn json(self) -> &'static str {
        match self {
            Preset::Smoke => include_str!("../configs/smoke.json"),
            Preset::Chain6 => include_str!("../configs/chain6.json"),
        }
    }
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}
