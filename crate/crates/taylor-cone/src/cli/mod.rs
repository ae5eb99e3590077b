//! Command-line front end: every computation as a subcommand with
//! machine-readable output.
//!
//! Exit codes: 0 on success, 2 on usage or validation errors (one-line
//! diagnostic on stderr, no artifacts written), 1 on internal errors.
//! Identical invocations produce byte-identical data artifacts; the
//! run manifests additionally record wall time, which naturally varies.

mod commands;
mod output;

pub use output::{csv_table, field_binary, fmt_f64, pgm_p5, Json, RunManifest};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "taylor-cone",
    version,
    about = "Critical Taylor-cone angles, explicit regularity constants, and \
             desk-scale verification of the two-phase dielectric interface energy",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Geometry {
    /// Planar square with a horizontal phase interface through the origin.
    HalfSpace,
    /// Axisymmetric spherical shell with a conical interface.
    Cone,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the full constants ledger for (n, beta/alpha, C_S).
    Constants {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        ratio: f64,
        /// Sobolev-Poincare constant; the ledger is conditional on it.
        #[arg(long, default_value_t = 1.0)]
        cs: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Critical cone angles of the transmission equation at one ratio.
    ConeAngles {
        #[arg(long)]
        ratio: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Fold threshold lambda_1 plus the bifurcation diagram CSV.
    Threshold {
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Surface tension balancing the Euler-Lagrange equation on a
    /// critical cone.
    ConeGamma {
        #[arg(long)]
        ratio: f64,
        /// Which critical angle: "smaller" or "larger".
        #[arg(long, default_value = "larger")]
        root: String,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Solve the transmission problem and export the field.
    Solve {
        #[arg(long, value_enum)]
        geometry: Geometry,
        /// Cells per direction (planar) or radial cells (cone).
        #[arg(long, default_value_t = 128)]
        cells: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 5.0)]
        beta: f64,
        /// Planar data: pw-linear | linear-x | quadratic | two-pole.
        /// The cone geometry always uses the separable exact solution.
        #[arg(long, default_value = "pw-linear")]
        boundary: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Ball-energy decay fit (and, for the cone, the inside-phase
    /// lower-bound constant and flux-jump refinement ladder).
    Decay {
        #[arg(long, value_enum)]
        geometry: Geometry,
        #[arg(long, default_value_t = 128)]
        cells: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 5.0)]
        beta: f64,
        #[arg(long, default_value = "quadratic")]
        boundary: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Ball-average monotonicity check on half-space solves with random
    /// polynomial boundary data.
    Monotonicity {
        #[arg(long, default_value_t = 64)]
        cells: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 5.0)]
        beta: f64,
        #[arg(long, default_value_t = 5)]
        solves: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Reverse-Holder (higher integrability) soundness check against the
    /// ledger constants.
    ReverseHolder {
        #[arg(long, default_value_t = 64)]
        cells: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 5.0)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        cs: f64,
        #[arg(long, default_value = "quadratic")]
        boundary: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Alternating interface minimization from a flat key-value config.
    Minimize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Regenerate every anchored number in one deterministic run.
    Report {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

/// Error split that maps onto exit codes.
pub(crate) enum CliError {
    /// Bad inputs: exit 2, nothing written.
    Usage(String),
    /// Failure during computation or IO: exit 1.
    Internal(String),
}

impl CliError {
    fn report_and_code(self) -> i32 {
        match self {
            CliError::Usage(msg) => {
                eprintln!("error: {msg}");
                2
            }
            CliError::Internal(msg) => {
                eprintln!("internal error: {msg}");
                1
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(format!("io: {e}"))
    }
}

/// Entry point used by the binary: parses `argv` and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful output, not errors.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Constants { n, ratio, cs, format, out } => {
            commands::constants(n, ratio, cs, format, &out)
        }
        Command::ConeAngles { ratio, tol, format, out } => {
            commands::cone_angles(ratio, tol, format, &out)
        }
        Command::Threshold { tol, out } => commands::threshold(tol, &out),
        Command::ConeGamma { ratio, root, amplitude, alpha, out } => {
            commands::cone_gamma(ratio, &root, amplitude, alpha, &out)
        }
        Command::Solve { geometry, cells, alpha, beta, boundary, tol, out } => {
            commands::solve(geometry, cells, alpha, beta, &boundary, tol, &out)
        }
        Command::Decay { geometry, cells, alpha, beta, boundary, out } => {
            commands::decay(geometry, cells, alpha, beta, &boundary, &out)
        }
        Command::Monotonicity { cells, alpha, beta, solves, seed, out } => {
            commands::monotonicity(cells, alpha, beta, solves, seed, &out)
        }
        Command::ReverseHolder { cells, alpha, beta, cs, boundary, out } => {
            commands::reverse_holder(cells, alpha, beta, cs, &boundary, &out)
        }
        Command::Minimize { config, out } => commands::minimize(&config, &out),
        Command::Report { out } => commands::report(&out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => e.report_and_code(),
    }
}
