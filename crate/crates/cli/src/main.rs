use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use levyarea_cli::commands::{self, SweepRange};
use levyarea_cli::Result;

/// Joint characteristic function of Brownian motion and generalized Levy areas.
///
/// Exit codes: 0 success, 2 invalid input, 3 Riccati blow-up, 4 numerical failure.
#[derive(Parser, Debug)]
#[command(name = "levyarea", author, version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate with the Riccati/transport pipeline.
    Eval {
        problem: PathBuf,
        /// Maximum integration step; defaults to 4096 steps over the horizon.
        #[arg(long, env = "CF_GRID_STEP")]
        grid_step: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the planar skew-area closed form.
    Closed2d {
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate.
    Mc {
        problem: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 4096)]
        steps_per_unit: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two result files for the same problem.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the function along one lambda.
    Sweep {
        problem: PathBuf,
        /// Zero-based index into `lambdas`.
        #[arg(long, default_value_t = 0)]
        lambda_index: usize,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
        #[arg(long, env = "CF_GRID_STEP")]
        grid_step: Option<f64>,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Eval { problem, grid_step, out } => {
            let r = commands::eval(&problem, grid_step)?;
            commands::emit(&r.to_json(), out.as_deref())
        }
        Command::Closed2d { problem, out } => {
            let r = commands::closed2d(&problem)?;
            commands::emit(&r.to_json(), out.as_deref())
        }
        Command::Mc {
            problem,
            paths,
            steps_per_unit,
            seed,
            out,
        } => {
            let r = commands::mc(&problem, paths, steps_per_unit, seed)?;
            commands::emit(&r.to_json(), out.as_deref())
        }
        Command::Compare { a, b, out } => {
            let r = commands::compare(&a, &b)?;
            commands::emit(&r.to_json(), out.as_deref())
        }
        Command::Sweep {
            problem,
            lambda_index,
            from,
            to,
            points,
            grid_step,
            csv,
        } => {
            let range = SweepRange {
                lambda_index,
                from,
                to,
                points,
            };
            let rows = commands::sweep(&problem, range, grid_step)?;
            match csv {
                Some(path) => {
                    let file = std::fs::File::create(&path).map_err(|source| levyarea_cli::CliError::Write {
                        path: path.clone(),
                        source,
                    })?;
                    commands::write_sweep_csv(&rows, file)
                }
                None => commands::write_sweep_csv(&rows, std::io::stdout().lock()),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
