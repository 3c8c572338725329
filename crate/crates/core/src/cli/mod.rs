//! `torus-elliptic` command line.
//!
//! Exit codes: 0 on success, 2 when a check fails, 1 on usage, parse or I/O
//! errors. Each subcommand ends with `RESULT` lines meant for scripts.

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::spectral::io::Encoding;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "torus-elliptic",
    version,
    about = "Continuity-method solver and checks for Monge-Ampere-type equations on flat tori"
)]
pub struct Cli {
    /// Seed for every randomized procedure.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads for data-parallel work (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Encoding of field files, trace and report CSVs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Decimal text.
    Csv,
    /// Little-endian f64 fields; floats in CSVs as hexadecimal bit patterns.
    Binary,
}

impl From<Format> for Encoding {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => Encoding::Csv,
            Format::Binary => Encoding::Binary,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the equation by continuation from f = 0.
    Solve(SolveArgs),
    /// Pointwise ellipticity certificate of a solution.
    Certify(CertifyArgs),
    /// Check the structural hypotheses on the drift fields.
    CheckHypotheses(SpecArgs),
    /// Compute the datum f for which a given u is an exact solution.
    Manufacture(ManufactureArgs),
    /// Oracle checks.
    Verify(VerifyArgs),
    /// Compare block-minor expansions with direct determinants.
    DetCheck(DetCheckArgs),
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Equation config file.
    #[arg(long)]
    pub spec: PathBuf,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DatumArgs {
    /// Datum f as an expression in x1..xn.
    #[arg(long = "f")]
    pub f_expr: Option<String>,
    /// Datum f as a field file.
    #[arg(long)]
    pub f_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub datum: DatumArgs,
    /// Where to write the solution field.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the continuation trace CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    pub newton_tol: f64,
    #[arg(long, default_value_t = 30)]
    pub max_newton: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub krylov_rtol: f64,
    #[arg(long, default_value_t = 0.1)]
    pub initial_dt: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub min_dt: f64,
    /// Use f as given instead of shifting it to ∫e^f dV = 1.
    #[arg(long)]
    pub no_normalize: bool,
    /// Solve even when the drift fields fail the hypotheses.
    #[arg(long)]
    pub allow_unverified: bool,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Solution field file.
    #[arg(long)]
    pub u: PathBuf,
    #[command(flatten)]
    pub datum: DatumArgs,
    /// Use f as given instead of shifting it to ∫e^f dV = 1, as `solve` does.
    #[arg(long)]
    pub no_normalize: bool,
    /// Constant added to f after normalization; pass the `shift` printed by `solve`.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub shift: f64,
    /// Certificate CSV destination (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ManufactureArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Exact solution u* as a field file; a seeded random field is drawn otherwise.
    #[arg(long)]
    pub u: Option<PathBuf>,
    /// Sup-norm bound of the random u*.
    #[arg(long, default_value_t = 0.1)]
    pub amplitude: f64,
    /// Where to write the random u*.
    #[arg(long)]
    pub u_out: Option<PathBuf>,
    /// Where to write f.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(subcommand)]
    pub check: VerifyCheck,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCheck {
    /// Transport identities for random band-limited u.
    Identities(TrialArgs),
    /// A + B − 2e^(f/2) ≥ 0 on random manufactured pairs.
    Lemma21(TrialArgs),
    /// Central differences of the operator against its linearization.
    Fd(FdArgs),
    /// ∫e^f dV = 1 for manufactured data.
    Normalization(TrialArgs),
    /// Manufacture f from a random u*, solve, compare.
    Roundtrip(TrialArgs),
}

#[derive(Debug, Args)]
pub struct TrialArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Sup-norm bound of the random fields.
    #[arg(long, default_value_t = 0.1)]
    pub amplitude: f64,
    /// Per-trial CSV destination (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FdArgs {
    #[command(flatten)]
    pub trials: TrialArgs,
    #[arg(long, default_value_t = 1e-4)]
    pub h: f64,
}

#[derive(Debug, Args)]
pub struct DetCheckArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Levels i to test, comma separated (default: 1..=k).
    #[arg(long, value_delimiter = ',')]
    pub levels: Vec<usize>,
    /// Per-trial CSV destination (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure of a subcommand.
#[derive(Debug, thiserror::Error)]
pub(crate) enum CliError {
    #[error("{0}")]
    Error(#[from] Error),
    #[error("{path}:{source}")]
    Located { path: String, source: Error },
    /// A check ran and did not pass; the details are already printed.
    #[error("check failed")]
    CheckFailed,
}

impl CliError {
    pub(crate) fn at(path: &std::path::Path) -> impl FnOnce(Error) -> CliError + '_ {
        move |source| CliError::Located {
            path: path.display().to_string(),
            source,
        }
    }

    fn exit_code(&self) -> i32 {
        let error = match self {
            CliError::CheckFailed => return EXIT_CHECK_FAILED,
            CliError::Error(e) | CliError::Located { source: e, .. } => e,
        };
        match error {
            Error::NonPositive { .. }
            | Error::CertificateRefused(_)
            | Error::HypothesesNotSatisfied(_)
            | Error::Precondition(_)
            | Error::OverflowGuard { .. } => EXIT_CHECK_FAILED,
            _ => EXIT_ERROR,
        }
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let outcome = match cli.threads {
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(|| commands::dispatch(&cli)),
            Err(e) => {
                eprintln!("error: cannot start {threads} threads: {e}");
                return EXIT_ERROR;
            }
        },
        None => commands::dispatch(&cli),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            if !matches!(e, CliError::CheckFailed) {
                eprintln!("error: {e}");
            }
            e.exit_code()
        }
    }
}
