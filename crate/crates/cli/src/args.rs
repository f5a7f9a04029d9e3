use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "qleb", version, about = "Quantum Lebesgue decomposition and q-LAN studies")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Relative rank cutoff (rank_tol = dim * ||A||_2 * cutoff).
    #[arg(long, global = true, env = "QLEB_CUTOFF")]
    pub cutoff: Option<f64>,
    /// Report file, written atomically. Reports go to stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lebesgue decomposition of sigma with respect to rho by both routes.
    Decompose(DecomposeArgs),
    /// Singularity and absolute-continuity tests.
    Check(CheckArgs),
    /// Convergence studies on a parametric model.
    Qlan(QlanArgs),
    /// Writes a seeded random pair of density matrices.
    Sample(SampleArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Matrix JSON file for rho.
    #[arg(long)]
    pub rho: PathBuf,
    /// Matrix JSON file for sigma.
    #[arg(long)]
    pub sigma: PathBuf,
    /// Hermiticity tolerance for the inputs, relative to max(1, ||A||_max).
    #[arg(long, default_value_t = qleb::linalg::DEFAULT_HERMITIAN_TOL)]
    pub hermitian_tol: f64,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Largest accepted operator-norm gap between the block and direct routes.
    #[arg(long, default_value_t = 1e-8)]
    pub route_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// rho and sigma have orthogonal supports.
    Singular,
    /// rho is absolutely continuous with respect to sigma.
    Ac,
    /// rho and sigma are mutually absolutely continuous.
    Mutual,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub kind: CheckKind,
    #[command(flatten)]
    pub pair: PairArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Study {
    Qclt,
    Lecam,
    Oh2,
    Sandwich,
}

#[derive(Debug, Args)]
pub struct QlanArgs {
    /// Built-in model name, e.g. spin-pure or spin-perturbed:quartic.
    #[arg(long, required_unless_present = "model_file", conflicts_with = "model_file")]
    pub model: Option<String>,
    /// Tabulated model JSON.
    #[arg(long)]
    pub model_file: Option<PathBuf>,
    /// Studies to run (repeatable or comma separated).
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub study: Vec<Study>,
    /// Copy counts, strictly increasing.
    #[arg(long, value_delimiter = ',', default_values_t = [100u64, 1000, 10_000])]
    pub n: Vec<u64>,
    /// Local parameter h (defaults to zero).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub h: Option<Vec<f64>>,
    /// One query per flag: vectors separated by ';', components by ',', complex as re:im.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Vec<String>,
    /// Radii for the oh2 study.
    #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.1, 0.05, 0.025])]
    pub radii: Vec<f64>,
    /// Directions per radius for the oh2 study.
    #[arg(long, default_value_t = qleb::qlan::DEFAULT_DIRECTIONS)]
    pub directions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Generic,
    Orthogonal,
    NearSingular,
    NearDeficient,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub rank_rho: usize,
    #[arg(long)]
    pub rank_sigma: usize,
    #[arg(long, value_enum, default_value_t = Mode::Generic)]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Destination for rho.
    #[arg(long)]
    pub rho: PathBuf,
    /// Destination for sigma.
    #[arg(long)]
    pub sigma: PathBuf,
}
