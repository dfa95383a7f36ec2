//! `dinkelbach`: run the solvers on builtin or file problems, print traces
//! and diagnostics, and check the published tables.
//!
//! Exit codes: 0 converged, 1 input error, 2 iteration limit reached,
//! 3 stagnated without converging, 4 table mismatch.

mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use dinkelbach::diagnostics::MIN_PERIOD_WINDOW;
use dinkelbach::solvers::DEFAULT_MAX_ITERS;
use dinkelbach::Method;

#[derive(Parser, Debug)]
#[command(
    name = "dinkelbach",
    version,
    about = "Dinkelbach-type solvers for fractional programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one method and print its trace.
    Run {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run one method and report convergence order, sign period and chi.
    Diagnose {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
        /// Trailing records used for period detection.
        #[arg(long, default_value_t = MIN_PERIOD_WINDOW)]
        window: usize,
    },
    /// Recompute a published table and compare it cell by cell.
    Reproduce {
        /// table2, table3, table4, table5 or all.
        table: String,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Builtin name (exp_affine_9, arctan_log, cubic) or path to a problem file.
    #[arg(long)]
    problem: String,
    /// classical, interval, accel_interval or accel.
    #[arg(long)]
    method: Method,
    /// Screening parameter of the accelerated method (default 1.00001).
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<String>,
    /// Termination tolerance on |g| (default 10^(-4 digits / 5), 1e-12 native).
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    /// Working decimal digits; 0 selects native f64.
    #[arg(long, default_value_t = 0)]
    digits: u32,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
    /// Starting point for classical and accel.
    #[arg(long, allow_hyphen_values = true)]
    alpha_init: Option<String>,
    /// Lower end of the starting bracket for interval methods.
    #[arg(long, allow_hyphen_values = true)]
    gamma0: Option<String>,
    /// Upper end of the starting bracket for interval methods.
    #[arg(long, allow_hyphen_values = true)]
    alpha0: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match &cli.command {
        Command::Run { run, format } => commands::run(run, *format),
        Command::Diagnose {
            run,
            format,
            window,
        } => commands::diagnose(run, *format, *window),
        Command::Reproduce { table, format } => commands::reproduce(table, *format),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
