//! Command-line surface for `padic-teich`: convergence tables, seeded
//! invariant suites, parameter grids, lattice walks and series operations.

pub mod config;
mod diff;
mod logapprox;
mod output;
mod suite;
mod table;
mod walk;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{Format, RunConfig};
pub use output::Output;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ASSERTION: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, arguments or input files.
    Config(String),
    /// A checked property failed. The output is still written.
    Assertion { message: String, output: Option<Output> },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Assertion { .. } => EXIT_ASSERTION,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Assertion { message, .. } => write!(f, "assertion failed: {message}"),
        }
    }
}

pub(crate) fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "padic-teich", version, about = "Exact p-adic tables, invariant suites and lattice walks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    #[arg(long, visible_alias = "p", global = true, default_value_t = 5)]
    pub prime: u32,
    #[arg(long, global = true, default_value_t = 12)]
    pub precision: u32,
    #[arg(long, global = true, default_value_t = 8)]
    pub degree: usize,
    #[arg(long, global = true, default_value_t = 40)]
    pub depth: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Convergence of (x^(p^m) − 1)/p^m to log x.
    LogApprox {
        /// Element of 1 + pZ_p, as an integer or a/b.
        #[arg(long, default_value = "6")]
        x: String,
        #[arg(long = "max-m", default_value_t = 8)]
        max_m: u32,
    },
    /// Seeded invariant suite.
    Suite {
        #[arg(value_enum)]
        suite: SuiteName,
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
    /// Module outputs over a parameter grid.
    Table(TableArgs),
    /// Log-theta lattice operations.
    Lattice {
        #[command(subcommand)]
        command: LatticeCommand,
    },
    /// Operations on diffeomorphism-group series stored as JSON.
    Diff {
        #[arg(value_enum)]
        op: DiffOp,
        files: Vec<PathBuf>,
        /// Frobenius level for the Schwarzian (plain Schwarzian when absent).
        #[arg(long)]
        m: Option<u32>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteName {
    Diffgroup,
    Witt,
    Theta,
    Integrate,
    Lattice,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableTarget {
    TorsionTheta,
    LogVolume,
    SerreElliptic,
    FrobeniusLift,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(value_enum)]
    pub target: TableTarget,
    /// Torsion level.
    #[arg(long, default_value_t = 5)]
    pub l: u32,
    /// q̃ as an integer or a/b; defaults to p.
    #[arg(long = "q-tilde")]
    pub q_tilde: Option<String>,
    /// Truncation order of theta products.
    #[arg(long, default_value_t = 24)]
    pub t: u32,
    #[arg(long, default_value = "3,5")]
    pub primes: String,
    #[arg(long = "e", default_value = "1,2")]
    pub e_values: String,
    #[arg(long = "f", default_value = "1,2")]
    pub f_values: String,
    #[arg(long = "m", default_value = "1,2")]
    pub m_values: String,
    /// Curves y² = x³ + a4·x + a6 as "a4,a6;a4,a6"; defaults to the first ten good ones.
    #[arg(long)]
    pub curves: Option<String>,
    #[arg(long = "max-m", default_value_t = 8)]
    pub max_m: u32,
}

#[derive(Subcommand, Debug)]
pub enum LatticeCommand {
    /// Applies Θ-links (T) and log-links (L) in order.
    Walk(WalkArgs),
}

#[derive(Args, Debug)]
pub struct WalkArgs {
    #[arg(long, default_value_t = 5)]
    pub l: u32,
    #[arg(long, default_value = "T,L,T,L")]
    pub steps: String,
    /// Starting unit in 1 + pZ_p.
    #[arg(long, default_value = "1")]
    pub unit: String,
    /// Comma-separated starting pilot exponents.
    #[arg(long, default_value = "1")]
    pub pilot: String,
    #[arg(long, default_value_t = 1)]
    pub tag: u32,
    /// Ramification index used for log-link volumes.
    #[arg(long, default_value_t = 1)]
    pub e: u32,
    /// Residue degree used for log-link volumes.
    #[arg(long, default_value_t = 1)]
    pub f: u32,
    /// Exponent of the p-power torsion used for log-link volumes.
    #[arg(long, default_value_t = 1)]
    pub mu: u32,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffOp {
    Compose,
    Invert,
    Schwarzian,
}

/// Thread cap from `PADIC_TEICH_THREADS`, if set.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("PADIC_TEICH_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("PADIC_TEICH_THREADS must be a positive integer, got {s:?}"))),
        },
    }
}

/// Runs a parsed command and returns its output.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let cfg = RunConfig::from_args(&cli.global)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(config_err)?;
    pool.install(|| match &cli.command {
        Command::LogApprox { x, max_m } => logapprox::run(&cfg, x, *max_m),
        Command::Suite { suite, cases } => suite::run(&cfg, *suite, *cases),
        Command::Table(args) => table::run(&cfg, args),
        Command::Lattice { command: LatticeCommand::Walk(args) } => walk::run(&cfg, args),
        Command::Diff { op, files, m } => diff::run(&cfg, *op, files, *m),
    })
}

/// Parses, runs and writes output; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let out = cli.global.out.clone();
    let format = cli.global.format;
    let (result, code) = match execute(&cli) {
        Ok(o) => (Some(o), EXIT_OK),
        Err(e) => {
            eprintln!("{e}");
            let code = e.exit_code();
            match e {
                CliError::Assertion { output, .. } => (output, code),
                CliError::Config(_) => (None, code),
            }
        }
    };
    if let Some(o) = result {
        if let Err(e) = o.write(format, out.as_deref()) {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    }
    code
}
