use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Hopf bundles, the canonical connection and singlet collapse statistics.
///
/// Every default can also be set through a `HOPFC_*` environment variable.
#[derive(Parser, Debug, Clone, Serialize, Deserialize, PartialEq)]
#[command(name = "hopfc", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GlobalOpts {
    /// Monte Carlo worker threads; results do not depend on this value.
    #[arg(long, global = true, default_value_t = 1, env = "HOPFC_WORKERS")]
    pub workers: usize,

    /// Write the report here instead of stdout. A manifest is written next to it.
    #[arg(long, global = true, env = "HOPFC_OUT")]
    pub out: Option<std::path::PathBuf>,

    /// Write the run manifest to this path.
    #[arg(long, global = true, env = "HOPFC_MANIFEST")]
    pub manifest: Option<std::path::PathBuf>,

    /// Compact JSON instead of pretty-printed.
    #[arg(long, global = true, env = "HOPFC_COMPACT")]
    pub compact: bool,

    /// Override the pass/fail tolerance of the command.
    #[arg(long, global = true, env = "HOPFC_TOLERANCE")]
    pub tolerance: Option<f64>,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Check fibre invariance and the inclusion square on random samples.
    FibrationCheck(FibrationArgs),
    /// Measure particle 2 of fresh singlets and record each collapse.
    Collapse(CollapseArgs),
    /// Singlet correlation against analyzer angle, as CSV.
    CorrelationSweep(SweepArgs),
    /// CHSH combination for four coplanar analyzer angles.
    Chsh(ChshArgs),
    /// Holonomy of a latitude loop on the Bloch sphere.
    Holonomy(HolonomyArgs),
    /// Lattice Chern number of a line bundle over CP1.
    Chern(ChernArgs),
    /// Re-run a manifest and compare output checksums.
    #[serde(skip)]
    Replay(ReplayArgs),
    /// Print the JSON schema for reports.
    #[serde(skip)]
    Schema,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::FibrationCheck(_) => "fibration-check",
            Command::Collapse(_) => "collapse",
            Command::CorrelationSweep(_) => "correlation-sweep",
            Command::Chsh(_) => "chsh",
            Command::Holonomy(_) => "holonomy",
            Command::Chern(_) => "chern",
            Command::Replay(_) => "replay",
            Command::Schema => "schema",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::FibrationCheck(a) => Some(a.seed),
            Command::Collapse(a) => Some(a.seed),
            Command::CorrelationSweep(a) => a.shots.map(|_| a.seed),
            Command::Chsh(a) => a.shots.map(|_| a.seed),
            _ => None,
        }
    }
}

fn parse_bundle_n(s: &str) -> Result<u32, String> {
    match s {
        "2" => Ok(2),
        "4" => Ok(4),
        _ => Err(format!("n must be 2 (S3 -> CP1) or 4 (S7 -> CP3), got {s}")),
    }
}

fn parse_positive(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FibrationArgs {
    /// Complex dimension: 2 for S3 -> CP1, 4 for S7 -> CP3.
    #[arg(long, value_parser = parse_bundle_n)]
    pub n: u32,
    #[arg(long, default_value_t = 1000, value_parser = parse_positive, env = "HOPFC_TRIALS")]
    pub trials: u64,
    #[arg(long, default_value_t = 0, env = "HOPFC_SEED")]
    pub seed: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CollapseArgs {
    /// Measurement axis; normalized with a warning if not unit length.
    #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"], allow_negative_numbers = true, default_values_t = [0.0, 0.0, 1.0])]
    pub axis: Vec<f64>,
    #[arg(long, default_value_t = 1000, env = "HOPFC_SHOTS")]
    pub shots: u64,
    #[arg(long, default_value_t = 0, env = "HOPFC_SEED")]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json, env = "HOPFC_FORMAT")]
    pub format: Format,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SweepArgs {
    /// First analyzer angle (radians) between the two axes.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_min: f64,
    /// Last analyzer angle (radians), inclusive.
    #[arg(long, default_value_t = std::f64::consts::PI, allow_negative_numbers = true)]
    pub theta_max: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 13)]
    pub points: usize,
    /// Explicit angle list; replaces the uniform grid.
    #[arg(long, num_args = 1.., allow_negative_numbers = true, conflicts_with_all = ["theta_min", "theta_max", "points"])]
    pub thetas: Option<Vec<f64>>,
    /// Monte Carlo shots per angle; omit for the exact column only.
    #[arg(long, conflicts_with = "exact", env = "HOPFC_SHOTS")]
    pub shots: Option<u64>,
    /// Exact correlations only.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 0, env = "HOPFC_SEED")]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ChshArgs {
    /// Analyzer angles a, a', b, b' (radians) in the x-z plane.
    #[arg(
        long,
        num_args = 4,
        value_names = ["A", "A_PRIME", "B", "B_PRIME"],
        allow_negative_numbers = true,
        default_values_t = [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_4, 3.0 * std::f64::consts::FRAC_PI_4]
    )]
    pub angles: Vec<f64>,
    /// Monte Carlo shots per correlation; omit for exact evaluation.
    #[arg(long, conflicts_with = "exact", env = "HOPFC_SHOTS")]
    pub shots: Option<u64>,
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 0, env = "HOPFC_SEED")]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HolonomyArgs {
    #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"], allow_negative_numbers = true, default_values_t = [0.0, 0.0, 1.0])]
    pub axis: Vec<f64>,
    /// Polar angle of the latitude loop about the axis, radians.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 10_000, value_parser = parse_positive)]
    pub steps: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BundleKind {
    Trivial,
    Tautological,
    Dual,
    /// k-th tensor power of the dual (negative k: powers of the tautological bundle).
    Power,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ChernArgs {
    #[arg(long, value_enum)]
    pub bundle: BundleKind,
    /// Exponent for `--bundle power`.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub k: i32,
    #[arg(long, default_value_t = 32)]
    pub mesh: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReplayArgs {
    pub manifest_path: std::path::PathBuf,
}
