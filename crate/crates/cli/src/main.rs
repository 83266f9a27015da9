//! `addsieve`: generate sets, compute energies and sieve checks, and run
//! parameter sweeps. Tables go to CSV (default) or JSON.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use addsieve::Error;

#[derive(Parser, Debug)]
#[command(
    name = "addsieve",
    version,
    about = "Additive energy and sieve experiments"
)]
pub struct Cli {
    /// Output format for tables
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Worker threads for sweeps (1 = sequential)
    #[arg(long, default_value_t = 1, global = true)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a set file
    Gen(GenArgs),
    /// Additive energy of two sets
    Energy(EnergyArgs),
    /// Representation function table r_{A+B} or r_{A-B}
    Reps(RepsArgs),
    /// Composite-moduli check, larger sieve, divisor sums
    Sieve(SieveArgs),
    /// Quadratic-hits and Sidon reports
    Report(ReportArgs),
    /// Partial sums M(x), T(x) and the truncated singular series
    Series(SeriesArgs),
    /// One row per N over a grid
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: GenKind,
    #[arg(long = "N")]
    pub cap: u64,
    /// Prime for the Sidon construction
    #[arg(long)]
    pub p: Option<u64>,
    /// Quadratic coefficients q(x) = a x² + b x + c
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<i64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    pub b: i64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    pub c: i64,
    /// Largest prime constrained by the random-avoiding generator
    #[arg(long = "P")]
    pub prime_bound: Option<u64>,
    /// Epsilon preset (0, 1/2, 1, decimal) or config file path
    #[arg(long, default_value = "1/2")]
    pub eps: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "qr")]
    pub strategy: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Squares,
    Sidon,
    Quadratic,
    RandomAvoiding,
}

#[derive(Args, Debug)]
pub struct EnergyArgs {
    pub set_a: PathBuf,
    pub set_b: Option<PathBuf>,
    /// Use the squares up to the cap of A as the second set
    #[arg(long, conflicts_with = "set_b")]
    pub squares: bool,
    #[arg(long, value_enum, default_value_t = Method::Sum)]
    pub method: Method,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Sum,
    Diff,
    Brute,
    All,
}

#[derive(Args, Debug)]
pub struct RepsArgs {
    pub set_a: PathBuf,
    pub set_b: Option<PathBuf>,
    #[arg(long, conflicts_with = "set_b")]
    pub squares: bool,
    /// r_{A-B} instead of r_{A+B}
    #[arg(long)]
    pub diff: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("mode").required(true)
    .args(["check_v", "check_upto", "gallagher", "divisor_sum", "divisor_scale"])))]
pub struct SieveArgs {
    pub set_a: PathBuf,
    /// Composite-moduli check at one modulus
    #[arg(long)]
    pub check_v: Option<u64>,
    /// Composite-moduli check at every modulus 1..=V
    #[arg(long)]
    pub check_upto: Option<u64>,
    /// Larger-sieve bound over primes <= Q
    #[arg(long)]
    pub gallagher: Option<u64>,
    /// Divisor-sum trace (both algorithms)
    #[arg(long)]
    pub divisor_sum: bool,
    /// Divisor sum against |A|² log N
    #[arg(long)]
    pub divisor_scale: bool,
    #[arg(long, default_value = "1/2")]
    pub eps: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[arg(value_enum)]
    pub kind: ReportKind,
    pub set_a: PathBuf,
    /// Prime bound for occupancy profiles (Sidon report)
    #[arg(long = "Q", default_value_t = 50)]
    pub prime_bound: u64,
    #[arg(long, default_value = "1/2")]
    pub eps: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    Hits,
    Sidon,
    Decomposition,
    LowerBound,
}

#[derive(Args, Debug)]
pub struct SeriesArgs {
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<String>,
    #[arg(long, default_value = "0")]
    pub eps: String,
    /// Truncation prime for the singular series
    #[arg(long = "P", default_value_t = 100_000)]
    pub truncation: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub experiment: SweepKind,
    /// Comma-separated N values; `1e5` notation accepted
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<String>,
    /// Set family for the theorem experiment
    #[arg(long, value_enum, default_value_t = SweepSet::Squares)]
    pub set: SweepSet,
    #[arg(long = "P", default_value_t = 13)]
    pub prime_bound: u64,
    #[arg(long, default_value = "1/2")]
    pub eps: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Theorem,
    Ramanujan,
    Sidon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepSet {
    Squares,
    RandomAvoiding,
    Sidon,
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: msg.into(),
        }
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: msg.into(),
        }
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Failure {
            code: 4,
            message: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Invariant(_) => 3,
            Error::Resource(_) | Error::Overflow(_) => 4,
            Error::Parse { .. } | Error::Precondition(_) | Error::Degenerate(_) | Error::Io(_) => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
