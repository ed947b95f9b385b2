//! Result table CSV.
//!
//! One record per `(arm, dist, k, me, snr_db)` cell under a fixed header.
//! Floats are written in Rust's shortest round-trip form, so reading a file
//! back reproduces the table exactly.

use std::path::Path;
use std::str::FromStr;

use crate::channel::TapDistribution;
use crate::evaluation::{sort_cells, AggregateStats, Arm, CellResult};
use crate::{Error, Result};

pub const HEADER: [&str; 14] = [
    "arm",
    "dist",
    "n",
    "m",
    "p",
    "k",
    "me",
    "snr_db",
    "trials",
    "recovery_prob",
    "avg_mse",
    "recovery_stderr",
    "mse_stderr",
    "seed",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub arm: Arm,
    pub dist: TapDistribution,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub k: usize,
    pub me: usize,
    pub snr_db: f64,
    pub trials: usize,
    pub recovery_prob: f64,
    pub avg_mse: f64,
    pub recovery_stderr: f64,
    pub mse_stderr: f64,
    pub seed: u64,
}

impl From<&CellResult> for ResultRow {
    fn from(c: &CellResult) -> Self {
        Self {
            arm: c.arm,
            dist: c.dist,
            n: c.n,
            m: c.m,
            p: c.p,
            k: c.k,
            me: c.me,
            snr_db: c.snr_db,
            trials: c.stats.trials,
            recovery_prob: c.stats.recovery_probability,
            avg_mse: c.stats.average_mse,
            recovery_stderr: c.stats.recovery_stderr,
            mse_stderr: c.stats.mse_stderr,
            seed: c.seed,
        }
    }
}

impl From<&ResultRow> for CellResult {
    fn from(r: &ResultRow) -> Self {
        Self {
            arm: r.arm,
            dist: r.dist,
            n: r.n,
            m: r.m,
            p: r.p,
            k: r.k,
            me: r.me,
            snr_db: r.snr_db,
            seed: r.seed,
            stats: AggregateStats {
                recovery_probability: r.recovery_prob,
                average_mse: r.avg_mse,
                recovery_stderr: r.recovery_stderr,
                mse_stderr: r.mse_stderr,
                trials: r.trials,
            },
        }
    }
}

// `{:?}` is the shortest representation that parses back to the same f64.
fn float(x: f64) -> String {
    format!("{x:?}")
}

impl ResultRow {
    fn fields(&self) -> [String; 14] {
        [
            self.arm.label().to_string(),
            self.dist.label().to_string(),
            self.n.to_string(),
            self.m.to_string(),
            self.p.to_string(),
            self.k.to_string(),
            self.me.to_string(),
            float(self.snr_db),
            self.trials.to_string(),
            float(self.recovery_prob),
            float(self.avg_mse),
            float(self.recovery_stderr),
            float(self.mse_stderr),
            self.seed.to_string(),
        ]
    }
}

/// Serializes cells (re-sorted into canonical order) to CSV text.
pub fn to_csv_string(cells: &[CellResult]) -> Result<String> {
    let mut cells = cells.to_vec();
    sort_cells(&mut cells);
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(HEADER).map_err(csv_err)?;
    for c in &cells {
        w.write_record(ResultRow::from(c).fields())
            .map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}

pub fn write_results(path: &Path, cells: &[CellResult]) -> Result<()> {
    std::fs::write(path, to_csv_string(cells)?)?;
    Ok(())
}

fn field<T: FromStr>(source: &str, line: u64, record: &csv::StringRecord, idx: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = record.get(idx).unwrap_or("");
    raw.trim().parse().map_err(|e| Error::Csv {
        path: source.to_string(),
        line,
        reason: format!("field `{}` = `{raw}`: {e}", HEADER[idx]),
    })
}

/// Parses CSV text; `source` labels error messages.
pub fn parse_results(text: &str, source: &str) -> Result<Vec<ResultRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let bad = |line: u64, reason: String| Error::Csv {
        path: source.to_string(),
        line,
        reason,
    };

    let mut rows = Vec::new();
    let mut saw_header = false;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            bad(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if !saw_header {
            if record.iter().ne(HEADER.iter().copied()) {
                return Err(bad(line, format!("expected header `{}`", HEADER.join(","))));
            }
            saw_header = true;
            continue;
        }
        if record.len() != HEADER.len() {
            return Err(bad(
                line,
                format!("expected {} fields, found {}", HEADER.len(), record.len()),
            ));
        }
        rows.push(ResultRow {
            arm: field(source, line, &record, 0)?,
            dist: field(source, line, &record, 1)?,
            n: field(source, line, &record, 2)?,
            m: field(source, line, &record, 3)?,
            p: field(source, line, &record, 4)?,
            k: field(source, line, &record, 5)?,
            me: field(source, line, &record, 6)?,
            snr_db: field(source, line, &record, 7)?,
            trials: field(source, line, &record, 8)?,
            recovery_prob: field(source, line, &record, 9)?,
            avg_mse: field(source, line, &record, 10)?,
            recovery_stderr: field(source, line, &record, 11)?,
            mse_stderr: field(source, line, &record, 12)?,
            seed: field(source, line, &record, 13)?,
        });
    }
    if !saw_header {
        return Err(bad(1, "missing header".into()));
    }
    Ok(rows)
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let text = std::fs::read_to_string(path)?;
    parse_results(&text, &path.display().to_string())
}
