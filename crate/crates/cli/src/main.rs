use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

use commands::CliError;

/// Critical exponents of singular quasiradial p-harmonic functions.
#[derive(Debug, Parser)]
#[command(name = "pharmonic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the critical exponent alpha(p, N) = -k(p, N).
    Exponent {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long)]
        n: u32,
        /// Bisection tolerance on k.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Tabulate alpha against its a priori bounds over a grid of (p, N).
    Table {
        #[arg(long, allow_negative_numbers = true)]
        p_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        p_max: f64,
        #[arg(long, allow_negative_numbers = true)]
        p_step: f64,
        /// Comma-separated dimensions.
        #[arg(long = "n", value_delimiter = ',', num_args = 1.., required = true)]
        n_list: Vec<u32>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the critical angular profile as CSV.
    Profile {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1004)]
        points: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sign of the p-Laplacian of r^k cos(theta).
    Classify {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long)]
        n: u32,
        #[arg(long, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the consistency checks for one (p, N); fails unless all pass.
    Verify {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long)]
        n: u32,
    },
    /// Scaling of the planar p-harmonic measure of small boundary intervals.
    Measure2d {
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        /// Comma-separated interval half-widths.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true, allow_negative_numbers = true)]
        deltas: Vec<f64>,
        /// Cells per side.
        #[arg(long, default_value_t = 640)]
        grid: usize,
        /// Half-width of the square domain.
        #[arg(long, default_value_t = 4.0)]
        domain: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Exponent { p, n, tol, format } => commands::exponent(p, n, tol, format),
        Command::Table { p_min, p_max, p_step, n_list, tol, out } => {
            commands::table(p_min, p_max, p_step, &n_list, tol, out.as_deref())
        }
        Command::Profile { p, n, points, tol, out } => commands::profile(p, n, points, tol, out.as_deref()),
        Command::Classify { p, n, k, format } => commands::classify(p, n, k, format),
        Command::Verify { p, n } => commands::verify(p, n),
        Command::Measure2d { p, deltas, grid, domain, out } => {
            commands::measure2d(p, &deltas, grid, domain, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests also arrive here
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            if code != 0 {
                eprintln!("error: {e}");
            }
            ExitCode::from(code)
        }
    }
}
