//! The `spinmacro` command line.

mod bench;
mod commands;
mod selftest;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;

pub use bench::{bench_csv, fit_exponent, run_bench, BenchOptions, BenchPhase, BenchRecord};
pub use selftest::{run_selftest, CheckOutcome, Golden, SelftestReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_SELFTEST: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "spinmacro", version, about = "Macroscopicity measures for spin systems")]
pub struct Cli {
    /// Output file, `-` for stdout.
    #[arg(long, global = true, default_value = "-")]
    pub out: String,

    /// Worker threads (ignored by `bench`, which always runs on one).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ℐ and/or ℱ of a state stored in an MSDM file.
    Measure(MeasureArgs),
    /// Wigner grid of the two-component spin cat.
    Wigner(WignerArgs),
    /// ℐ and ℱ of Ising block states across λ.
    IsingSweep(SweepArgs),
    /// Scaling of the ring ground state's maximal variance with N.
    IsingScaling(ScalingArgs),
    /// Collective decay of a GHZ state.
    Dissipate(DissipateArgs),
    /// Timing of the V and W constructions.
    Bench(BenchArgs),
    /// Golden-value checks.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    I,
    F,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Raw,
    Qubit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Auto,
    Dicke,
    Full,
}

#[derive(Debug, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 200)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Which::Both)]
    pub measure: Which,
    /// Defaults to `qubit` for spin 1/2 and `raw` otherwise.
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
    #[command(flatten)]
    pub opt: OptimizerArgs,
}

#[derive(Debug, Args)]
pub struct WignerArgs {
    /// Twice the spin.
    #[arg(long)]
    pub spin: u32,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long)]
    pub ntheta: Option<usize>,
    #[arg(long)]
    pub nphi: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.05)]
    pub lmin: f64,
    #[arg(long, default_value_t = 20.0)]
    pub lmax: f64,
    #[arg(long, default_value_t = 41)]
    pub steps: usize,
    /// Uniform instead of logarithmic spacing in λ.
    #[arg(long)]
    pub linear: bool,
    #[arg(long = "L", value_delimiter = ',', default_values_t = [2usize, 4, 8])]
    pub block_lens: Vec<usize>,
    /// Skip ℱ (written as NaN).
    #[arg(long)]
    pub no_f: bool,
    #[command(flatten)]
    pub opt: OptimizerArgs,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[arg(long = "N", value_delimiter = ',', default_values_t = [8usize, 10, 12, 14])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[command(flatten)]
    pub opt: OptimizerArgs,
}

#[derive(Debug, Args)]
pub struct DissipateArgs {
    #[arg(long = "N", default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub rabi: f64,
    #[arg(long, default_value_t = 5.0)]
    pub tmax: f64,
    /// Defaults to the stability bound (at most 0.01).
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub save_every: usize,
    /// `auto` takes the Dicke path; N > 10 always does.
    #[arg(long, value_enum, default_value_t = PathArg::Auto)]
    pub path: PathArg,
    #[arg(long, value_enum, default_value_t = ConventionArg::Qubit)]
    pub convention: ConventionArg,
    #[command(flatten)]
    pub opt: OptimizerArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long = "N", value_delimiter = ',', default_values_t = [4usize, 6, 8, 10])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub restarts: usize,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long)]
    pub json: bool,
    /// Replacement golden table (JSON).
    #[arg(long)]
    pub golden: Option<PathBuf>,
}

/// A failed command: exit code and message.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: msg.into() }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: msg.into() }
    }

    /// Numerical errors become exit 3, bad values exit 1 and format errors exit 2.
    pub fn from_error(stage: &str, e: Error) -> Self {
        let code = match &e {
            Error::InvalidInput(_) => EXIT_USAGE,
            Error::Format { .. } | Error::Io(_) => EXIT_INPUT,
            Error::Numerical { .. } | Error::NonConvergence { .. } => EXIT_NUMERICAL,
        };
        Self { code, message: format!("{stage}: {e}") }
    }
}

pub(crate) type CmdResult = std::result::Result<(), Failure>;

/// Sends text to `--out`.
pub(crate) fn emit(out: &str, text: &str) -> CmdResult {
    if out == "-" {
        let mut so = std::io::stdout().lock();
        so.write_all(text.as_bytes())
            .and_then(|_| so.flush())
            .map_err(|e| Failure::input(format!("writing stdout: {e}")))
    } else {
        std::fs::write(out, text).map_err(|e| Failure::input(format!("writing {out}: {e}")))
    }
}

fn configure_threads(cli: &Cli) -> CmdResult {
    let n = match (&cli.command, cli.threads) {
        (Command::Bench(_), _) => 1,
        (_, Some(0)) => return Err(Failure::usage("--threads must be at least 1")),
        (_, Some(n)) => n,
        (_, None) => return Ok(()),
    };
    // a pool may already exist when called twice in one process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    crate::linalg::set_blas_threads(n);
    Ok(())
}

/// Runs a parsed command line and returns the exit code.
pub fn execute(cli: Cli) -> i32 {
    let res = configure_threads(&cli).and_then(|_| match &cli.command {
        Command::Measure(a) => commands::measure(a, &cli.out),
        Command::Wigner(a) => commands::wigner(a, &cli.out),
        Command::IsingSweep(a) => commands::ising_sweep(a, &cli.out),
        Command::IsingScaling(a) => commands::ising_scaling(a, &cli.out),
        Command::Dissipate(a) => commands::dissipate(a, &cli.out),
        Command::Bench(a) => bench::command(a, &cli.out),
        Command::Selftest(a) => selftest::command(a, &cli.out),
    });
    match res {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Parses `args` (including the program name) and runs.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let _ = e.print();
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            }
        }
    }
}
