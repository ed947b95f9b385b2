use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use subnyquist_chest::cli::{cmd_plot, cmd_run, Metric, RunOverrides};

#[derive(Parser)]
#[command(
    version,
    about = "Sparse channel estimation from parallel low-speed ADC sub-samples"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo sweep and write the result table as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Worker threads (defaults to the available parallelism).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Render a result CSV as an SVG line chart.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        metric: Metric,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            trials,
            workers,
        } => {
            let overrides = RunOverrides {
                seed,
                trials,
                workers,
            };
            cmd_run(&config, &out, &overrides).map(|cells| {
                println!("{} ({cells} cells)", out.display());
            })
        }
        Command::Plot { csv, out, metric } => cmd_plot(&csv, &out, metric).map(|series| {
            println!("{} ({series} series)", out.display());
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
