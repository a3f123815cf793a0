//! `aerocell`: place drone base stations, forecast demand and plan fleet
//! transfers from the command line.
//!
//! Exit status: 0 success, 1 invalid input or usage, 2 I/O failure,
//! 3 internal error. Set `AEROCELL_LOG` (e.g. `info`, `debug`) for logs on
//! stderr.

mod commands;
mod error;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Format, ForecastArgs, PlaceArgs, PlanArgs, ReportArgs};
use error::{CliError, Kind};

#[derive(Parser)]
#[command(name = "aerocell", version, about = "Drone base-station planning pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Place drones over a user snapshot.
    Place {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        users: PathBuf,
        /// Fixed fleet size.
        #[arg(long, conflicts_with = "auto")]
        n: Option<usize>,
        /// Search the smallest fleet reaching the coverage target (default).
        #[arg(long)]
        auto: bool,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Forecast per-station user counts from a usage trace.
    Forecast {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        trace: PathBuf,
        /// Only this station (default: all).
        #[arg(long)]
        bs: Option<u32>,
        #[arg(long)]
        season: usize,
        #[arg(long, default_value_t = 1)]
        horizon: usize,
        /// Fit smoothing parameters per station by grid search.
        #[arg(long)]
        fit: bool,
        /// Add residuals on a held-out last season.
        #[arg(long)]
        holdout: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run the full pipeline and write the report and plot data to `--out`.
    Plan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        users: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        season: usize,
        #[arg(long, default_value_t = 1)]
        horizon: usize,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep fleet size over the capacity palette and user counts.
    Report {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [50, 100, 150, 200])]
        counts: Vec<usize>,
        /// Draw users around this many hotspots instead of uniformly.
        #[arg(long, default_value_t = 0)]
        hotspots: usize,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Place {
            config,
            users,
            n,
            auto: _,
            alpha,
            seed,
            out,
            format,
        } => commands::cmd_place(PlaceArgs {
            config: Some(&config),
            users: &users,
            n,
            alpha,
            seed,
            out: out.as_deref(),
            format,
        }),
        Command::Forecast {
            config,
            trace,
            bs,
            season,
            horizon,
            fit,
            holdout,
            out,
            format,
        } => commands::cmd_forecast(ForecastArgs {
            config: config.as_deref(),
            trace: &trace,
            bs,
            season,
            horizon,
            fit,
            holdout,
            out: out.as_deref(),
            format,
        }),
        Command::Plan {
            config,
            users,
            trace,
            season,
            horizon,
            alpha,
            seed,
            out,
        } => commands::cmd_plan(PlanArgs {
            config: Some(&config),
            users: &users,
            trace: &trace,
            season,
            horizon,
            alpha,
            seed,
            out: &out,
        }),
        Command::Report {
            config,
            counts,
            hotspots,
            alpha,
            seed,
            out,
            format,
        } => commands::cmd_report(ReportArgs {
            config: Some(&config),
            counts: &counts,
            hotspots,
            alpha,
            seed,
            out: out.as_deref(),
            format,
        }),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("AEROCELL_LOG")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = std::panic::catch_unwind(|| run(cli)).unwrap_or_else(|_| {
        Err(CliError::new("internal", Kind::Internal, "unexpected panic"))
    });
    match result {
        Ok(stdout) => {
            let mut lock = std::io::stdout().lock();
            if lock.write_all(stdout.as_bytes()).and_then(|_| lock.flush()).is_err() {
                return ExitCode::from(Kind::Io.exit_code() as u8);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
