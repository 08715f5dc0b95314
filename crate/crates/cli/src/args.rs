use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_HELP: &str = "\
Exit status:
  0  every audited invariant holds (for `counterexample`: the outcome matches
     theory, i.e. a violation was found for c < 2 or none for c >= 2)
  2  a violation or finding is reported (for `counterexample`: the outcome
     contradicts theory)
  1  usage, parse or I/O error";

#[derive(Debug, Parser)]
#[command(name = "hyptype", version, about = "Hyperbolic-type metric experiments on sampled spaces", after_help = EXIT_HELP)]
pub struct Cli {
    /// Worker threads (default: machine parallelism). Never changes results.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one metric value with its envelopes and distance bound.
    Eval(EvalArgs),
    /// Audit the metric axioms of a family on a space, and the Lipschitz property of its weights.
    Audit(SpaceArgs),
    /// Estimate the Gromov constant of a family on a space.
    Delta(SpaceArgs),
    /// Empirical and envelope dilatation profile at one center.
    Dilatation(DilatationArgs),
    /// Search the unit disk for a triangle violation of the DHV metric.
    Counterexample(CounterexampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Go,
    Dhv,
    Na,
    Ibr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Exhaustive when the tuple count fits the budget, sampled otherwise.
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Fine,
    Coarse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// DHV parameter.
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Coordinates of x, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Coordinates of y, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    /// Base distance d(x, y); defaults to the Euclidean distance of --x and --y.
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long)]
    pub fx: f64,
    #[arg(long)]
    pub fy: f64,
    #[arg(long, value_enum, default_value_t = VariantArg::Fine)]
    pub variant: VariantArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SpaceArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Space-spec JSON file.
    #[arg(long)]
    pub space: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    /// Sampled tuples in sampled mode.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DilatationArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Euclidean space-spec JSON file; its obstacle defines F.
    #[arg(long)]
    pub space: PathBuf,
    /// Center, comma separated (default: the first sample point).
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Radii as fractions r/F(x): a comma list or `geom:start:end:count`.
    #[arg(long = "r-grid", default_value = "geom:1e-1:1e-6:6")]
    pub r_grid: String,
    /// Probe directions per radius (default: 512 in 2-D, 2048 otherwise).
    #[arg(long)]
    pub probes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = VariantArg::Fine)]
    pub variant: VariantArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CounterexampleArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Unit-disk space-spec JSON file.
    #[arg(long)]
    pub space: PathBuf,
    /// Triple budget.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}
