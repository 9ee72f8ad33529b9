use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use simplex_bounds::TailDirection;

/// Comma-separated reals. Aliased so clap parses one list per flag instead
/// of repeating the flag.
pub type Reals = Vec<f64>;
pub type Counts = Vec<u64>;

#[derive(Debug, Parser)]
#[command(
    name = "simplex-bounds",
    version,
    about = "Concentration bounds for simplex-bounded random vectors, checked against tail oracles"
)]
pub struct Cli {
    /// Output format for single-record commands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Suppress diagnostics and summary lines; records are still written.
    #[arg(long, global = true)]
    pub quiet: bool,

    /// Monte Carlo seed (0 when omitted; overrides a sweep config's seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Leave the timestamp field out of records.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Lower,
    Upper,
}

impl From<Direction> for TailDirection {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Lower => TailDirection::Lower,
            Direction::Upper => TailDirection::Upper,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a tail bound.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Compute a tail probability by exact enumeration or Monte Carlo.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Monte Carlo estimate of a sample-mean tail (same as `oracle mc`).
    Mc(McArgs),
    /// Run an audit sweep from a JSON config file.
    Sweep(SweepArgs),
}

#[derive(Debug, Subcommand)]
pub enum BoundCommand {
    /// Simplex bound for an arbitrary mean vector (k coordinates).
    General(GeneralArgs),
    /// Count-form bound for a multinomial law.
    Multinomial(MultinomialArgs),
    /// Bound on the mean of n Dirichlet vectors.
    Dirichlet(DirichletArgs),
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Exact multinomial tail by lattice enumeration.
    Multinomial(MultinomialOracleArgs),
    /// Exact tail for the vertex law with the given mean.
    General(GeneralOracleArgs),
    /// Monte Carlo estimate of a sample-mean tail.
    Mc(McArgs),
}

#[derive(Debug, Args)]
pub struct GeneralArgs {
    /// Mean vector mu_1..mu_k, comma separated.
    #[arg(long, value_parser = parse_reals, allow_hyphen_values = true)]
    pub mu: Reals,
    /// Target z_1..z_k, comma separated.
    #[arg(long, value_parser = parse_reals, allow_hyphen_values = true)]
    pub z: Reals,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_enum)]
    pub dir: Direction,
    /// Slack tolerated on the order precondition.
    #[arg(long, default_value_t = 0.0)]
    pub slack: f64,
}

#[derive(Debug, Args)]
pub struct MultinomialArgs {
    #[arg(long)]
    pub n: u64,
    /// Cell probabilities p_0..p_k, comma separated.
    #[arg(long, value_parser = parse_reals)]
    pub p: Reals,
    /// Counts z_1..z_k, or z_0..z_k summing to n.
    #[arg(long, value_parser = parse_counts)]
    pub z: Counts,
    #[arg(long, value_enum)]
    pub dir: Direction,
}

#[derive(Debug, Args)]
pub struct DirichletArgs {
    /// Concentrations alpha_0..alpha_k, comma separated.
    #[arg(long, value_parser = parse_reals)]
    pub alpha: Reals,
    /// Target z_1..z_k.
    #[arg(long, value_parser = parse_reals, allow_hyphen_values = true)]
    pub z: Reals,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_enum)]
    pub dir: Direction,
}

#[derive(Debug, Args)]
pub struct MultinomialOracleArgs {
    #[command(flatten)]
    pub inner: MultinomialArgs,
    /// Largest lattice to enumerate.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GeneralOracleArgs {
    #[command(flatten)]
    pub inner: GeneralArgs,
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    General,
    Multinomial,
    Dirichlet,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Mean vector (general family).
    #[arg(long, value_parser = parse_reals)]
    pub mu: Option<Reals>,
    /// Cell probabilities p_0..p_k (multinomial family).
    #[arg(long, value_parser = parse_reals)]
    pub p: Option<Reals>,
    /// Concentrations alpha_0..alpha_k (dirichlet family).
    #[arg(long, value_parser = parse_reals)]
    pub alpha: Option<Reals>,
    #[arg(long)]
    pub n: u64,
    /// Target mean z_1..z_k.
    #[arg(long, value_parser = parse_reals, allow_hyphen_values = true)]
    pub z: Reals,
    #[arg(long, value_enum)]
    pub dir: Direction,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = simplex_bounds::oracle::DEFAULT_CONFIDENCE)]
    pub confidence: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep config (JSON).
    pub config: PathBuf,
    /// CSV report path, overriding the config.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON report path, overriding the config.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Override the Monte Carlo worker count.
    #[arg(long)]
    pub workers: Option<usize>,
}

fn split(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = split(s)
        .map(|t| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err("expected a comma-separated list of numbers".into());
    }
    Ok(v)
}

fn parse_counts(s: &str) -> Result<Vec<u64>, String> {
    let v: Vec<u64> = split(s)
        .map(|t| t.parse::<u64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err("expected a comma-separated list of counts".into());
    }
    Ok(v)
}
