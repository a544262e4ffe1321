use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_CODES: &str = "\
Exit codes:
  0   success
  1   verification failure or runtime error
  2   scheme is not zero-stable (only with --strict)
  64  usage error (bad flags, malformed numbers, invalid ranges)

Environment:
  ZEROSTAB_OUT_DIR  directory for relative --out paths";

#[derive(Debug, Parser)]
#[command(name = "zerostab", version, about = "Zero-stability analysis of explicit multistep schemes", after_help = EXIT_CODES)]
pub struct Cli {
    /// Flat TOML file whose keys mirror long flags (e.g. `h = 0.01`); command-line flags win
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Root moduli, root condition and consistency of one scheme
    Analyze(AnalyzeArgs),
    /// Scan the one-parameter family over a lambda grid
    LambdaScan(ScanArgs),
    /// Recompute the reference coefficient-to-moduli table
    TableVerify(TableArgs),
    /// Integrate an initial-value problem, optionally probing stability and convergence order
    Integrate(IntegrateArgs),
    /// Clean-versus-noisy feature propagation sweep
    Propagate(PropagateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the table here instead of stdout; relative paths resolve against ZEROSTAB_OUT_DIR when set
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    /// History weights alpha_0..alpha_{d-1}, comma separated (fractions like 1/3 allowed)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_number, conflicts_with = "lambda")]
    pub alphas: Option<Vec<f64>>,

    /// Activation weight
    #[arg(long, allow_hyphen_values = true, value_parser = parse_number, requires = "alphas")]
    pub beta: Option<f64>,

    /// Member of the one-parameter third-order family
    #[arg(long, allow_hyphen_values = true, value_parser = parse_number)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,

    /// Exit with code 2 when the scheme is not zero-stable
    #[arg(long)]
    pub strict: bool,

    /// Root-condition modulus tolerance
    #[arg(long, default_value_t = zerostab_core::DEFAULT_STABILITY_TOL, value_parser = parse_number)]
    pub tol: f64,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true, value_parser = parse_number)]
    pub lambda_min: f64,

    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true, value_parser = parse_number)]
    pub lambda_max: f64,

    #[arg(long, default_value_t = 0.01, value_parser = parse_number)]
    pub step: f64,

    #[arg(long, default_value_t = zerostab_core::DEFAULT_STABILITY_TOL, value_parser = parse_number)]
    pub tol: f64,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// CSV with columns alpha_0,alpha_1,alpha_2,beta,modulus_1,modulus_2,modulus_3,zero_stable
    /// instead of the embedded table
    #[arg(long, value_name = "FILE")]
    pub fixture: Option<PathBuf>,

    #[arg(long, default_value_t = zerostab_core::DEFAULT_STABILITY_TOL, value_parser = parse_number)]
    pub tol: f64,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// y' = -y, y(0) = 1 on [0, 1]
    Decay,
    /// y' = 0, y(0) = y0 on [0, 1]
    Constant,
    /// y0' = y1, y1' = -y0, y(0) = (1, 0) on [0, 1]
    Oscillator,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,

    #[arg(long, value_enum, conflicts_with = "rhs")]
    pub preset: Option<Preset>,

    /// Scalar right-hand side in t and y, e.g. "-y + sin(t)"
    #[arg(long, allow_hyphen_values = true)]
    pub rhs: Option<String>,

    /// Initial value(s); for --rhs and the constant preset
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_number)]
    pub y0: Option<Vec<f64>>,

    /// Interval start for --rhs
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true, value_parser = parse_number)]
    pub t0: f64,

    /// Interval end for --rhs
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true, value_parser = parse_number)]
    pub t1: f64,

    #[arg(long, default_value_t = 0.01, value_parser = parse_number)]
    pub h: f64,

    /// Index of the last grid point (t = t0 + steps * h); defaults to the interval end
    #[arg(long)]
    pub steps: Option<usize>,

    /// Perturb the seed states by this size and report the amplification ratio
    #[arg(long, value_parser = parse_number)]
    pub probe: Option<f64>,

    /// Decreasing step sizes for a convergence-order estimate, comma separated
    #[arg(long, value_delimiter = ',', value_parser = parse_number)]
    pub orders: Option<Vec<f64>>,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Exit with code 2 when the scheme is not zero-stable
    #[arg(long)]
    pub strict: bool,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PropagateArgs {
    /// Include the ten reference coefficient rows
    #[arg(long)]
    pub table8: bool,

    /// Family members to include (repeatable or comma separated)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_number)]
    pub lambda: Vec<f64>,

    /// One explicit scheme: history weights
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_number, requires = "beta")]
    pub alphas: Option<Vec<f64>>,

    /// One explicit scheme: activation weight
    #[arg(long, allow_hyphen_values = true, value_parser = parse_number, requires = "alphas")]
    pub beta: Option<f64>,

    /// none | gaussian:SIGMA | uniform:LO:HI | constant:MU (repeatable)
    #[arg(long, allow_hyphen_values = true)]
    pub noise: Vec<String>,

    /// Clamp noisy inputs to [0, 1]
    #[arg(long)]
    pub clip: bool,

    #[arg(long, default_value_t = 56, value_parser = clap::value_parser!(u64).range(1..))]
    pub depth: u64,

    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub width: u64,

    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    #[arg(long, default_value_t = 1.0, value_parser = parse_number)]
    pub h: f64,

    /// Use one block for every depth instead of one per depth
    #[arg(long)]
    pub shared_block: bool,

    /// Scale applied after the block's standardization
    #[arg(long, default_value_t = zerostab_core::propagation::DEFAULT_OUTPUT_SCALE, value_parser = parse_number)]
    pub output_scale: f64,

    /// Worker threads (default: all cores); results do not depend on it
    #[arg(long)]
    pub threads: Option<usize>,

    #[arg(long, default_value_t = zerostab_core::DEFAULT_STABILITY_TOL, value_parser = parse_number)]
    pub tol: f64,

    #[command(flatten)]
    pub output: OutputArgs,
}

/// A finite decimal number or a fraction `p/q`.
pub fn parse_number(text: &str) -> Result<f64, String> {
    let text = text.trim();
    let value = match text.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| format!("malformed number {text:?}"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("malformed number {text:?}"))?;
            if q == 0.0 {
                return Err(format!("zero denominator in {text:?}"));
            }
            p / q
        }
        None => text.parse().map_err(|_| format!("malformed number {text:?}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("number {text:?} is not finite"))
    }
}
