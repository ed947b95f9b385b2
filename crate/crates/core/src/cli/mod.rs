//! Command-line front end: config files, sweep execution, CSV and SVG output.

pub mod config;
pub mod plot;
pub mod results;

use std::path::Path;

use crate::evaluation::run_sweep;
use crate::Result;

pub use config::{load_config, parse_config};
pub use plot::{render_svg, Metric};
pub use results::{parse_results, read_results, write_results, ResultRow, HEADER};

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub workers: Option<usize>,
}

/// Loads the config, runs the sweep and writes the CSV; returns the number of
/// cells written.
pub fn cmd_run(config_path: &Path, out_path: &Path, overrides: &RunOverrides) -> Result<usize> {
    let mut config = load_config(config_path)?;
    if let Some(seed) = overrides.seed {
        config.master_seed = seed;
    }
    if let Some(trials) = overrides.trials {
        config.trials = trials;
    }
    let workers = overrides.workers.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let cells = run_sweep(&config, workers)?;
    write_results(out_path, &cells)?;
    Ok(cells.len())
}

/// Renders the CSV at `csv_path` as an SVG line chart. Nothing is written
/// when the CSV is malformed or has no data rows.
pub fn cmd_plot(csv_path: &Path, out_path: &Path, metric: Metric) -> Result<usize> {
    let rows = read_results(csv_path)?;
    let (svg, series) = render_svg(&rows, metric)?;
    std::fs::write(out_path, svg)?;
    Ok(series)
}
