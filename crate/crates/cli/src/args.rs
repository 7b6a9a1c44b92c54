use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use extremaldep::estimate::Denominator;
use extremaldep::verify::{Suite, DEFAULT_SEED};
use extremaldep::{Margin, ModelSpec, PartitionSpec, TauVector};
use serde::Serialize;

use crate::error::CliError;

/// Extremal dependence coefficients, simulation and extremal index estimation
/// for stationary multivariate sequences.
#[derive(Debug, Parser)]
#[command(name = "extremaldep", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form coefficients, bounds and verdicts for a built-in model.
    Report(ReportArgs),
    /// Simulate a stationary series and write it as CSV.
    Simulate(SimulateArgs),
    /// Monte Carlo estimators.
    #[command(subcommand)]
    Estimate(EstimateCommand),
    /// Run the reproduction suite and report pass/fail per row.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum EstimateCommand {
    /// Block estimator of the extremal index at a tau vector.
    Blocks(BlocksArgs),
    /// Runs estimator on one univariate series.
    Runs(RunsArgs),
    /// Exponent estimate n·P(some coordinate exceeds its level) on an i.i.d. sample.
    Gamma(GammaArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// max_ar (alias ex31), three_dependent (ex32) or iid_product (iid).
    #[arg(long)]
    pub model: Option<String>,
    /// Copies of X in a max_ar row.
    #[arg(long)]
    pub p: Option<usize>,
    /// Copies of −X in a max_ar row.
    #[arg(long)]
    pub q: Option<usize>,
    /// Dimension of iid_product.
    #[arg(long)]
    pub d: Option<usize>,
}

impl ModelArgs {
    pub fn spec(&self) -> Result<Option<ModelSpec>, CliError> {
        self.model
            .as_deref()
            .map(|kind| ModelSpec::from_parts(kind, self.p, self.q, self.d))
            .transpose()
            .map_err(CliError::from)
    }

    pub fn require(&self) -> Result<ModelSpec, CliError> {
        self.spec()?
            .ok_or_else(|| CliError::Usage("--model is required".into()))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Split of the coordinates, e.g. `1,2|3`. Defaults to the model's own split.
    #[arg(long)]
    pub partition: Option<PartitionSpec>,
    /// Reference tau, e.g. `1,1,1`. Defaults to all ones.
    #[arg(long)]
    pub tau: Option<TauVector>,
    /// Tolerance for the verdict comparisons.
    #[arg(long, default_value_t = extremaldep::dependence::DEFAULT_TOL)]
    pub tol: f64,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Number of rows.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Noise df: unit_frechet or standard_uniform.
    #[arg(long, default_value_t = Margin::UnitFrechet)]
    pub margin: Margin,
    /// CSV path; a `.manifest.json` sidecar is written next to it.
    /// Without it the CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DenominatorArg {
    Exact,
    Simulated,
}

impl From<DenominatorArg> for Denominator {
    fn from(d: DenominatorArg) -> Self {
        match d {
            DenominatorArg::Exact => Denominator::Exact,
            DenominatorArg::Simulated => Denominator::Simulated,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BlocksArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Direction, e.g. `1,0` for the X coordinate of max_ar(1,1). Defaults to all ones.
    #[arg(long)]
    pub tau: Option<TauVector>,
    #[arg(long, default_value_t = 1000)]
    pub block_n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = Margin::UnitFrechet)]
    pub margin: Margin,
    /// How the i.i.d. block probability is obtained.
    #[arg(long, value_enum, default_value_t = DenominatorArg::Exact)]
    pub denominator: DenominatorArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// CSV series to read. Without it a series of `--n` rows is simulated from `--model`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Series length when simulating.
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = Margin::UnitFrechet)]
    pub margin: Margin,
    /// 1-based column to use. Without it the row maximum is used.
    #[arg(long)]
    pub column: Option<usize>,
    /// Explicit threshold. Without it the level solves block_n·(1 − F(u)) = tau
    /// on the margin of the chosen series, which needs `--model`.
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 1000)]
    pub block_n: usize,
    /// Run length that separates clusters.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GammaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// CSV sample to read. Without it `--n` i.i.d. vectors are drawn from `--model`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Number of i.i.d. vectors when sampling.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long)]
    pub tau: Option<TauVector>,
    /// Normalization n in n·(1 − F_j(u_j)) = tau_j.
    #[arg(long, default_value_t = 200)]
    pub block_n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = Margin::UnitFrechet)]
    pub margin: Margin,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// all, closed, props, mc or sim.
    #[arg(long, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Shift every built-in θ by this amount (sensitivity check).
    #[arg(long, hide = true, allow_negative_numbers = true)]
    pub perturb_theta: Option<f64>,
}
