//! Sweep tables (CSV) and solve reports (JSON).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::SolveReport;

/// One row of a parameter sweep. Measured fields are empty on failed rows
/// and solve fields are empty when no solve was requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub algorithm: String,
    pub desired_size: usize,
    pub average_size: Option<f64>,
    pub grid_complexity: Option<f64>,
    pub levels: Option<usize>,
    /// Node/element ratio of level 1.
    pub node_element_ratio: Option<f64>,
    /// Average connectivity of level 1.
    pub connectivity: Option<f64>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub solve_time_s: Option<f64>,
    pub setup_time_s: Option<f64>,
    pub status: String,
    pub error: Option<String>,
}

impl SweepRecord {
    pub const FIELDS: [&'static str; 13] = [
        "algorithm",
        "desired_size",
        "average_size",
        "grid_complexity",
        "levels",
        "node_element_ratio",
        "connectivity",
        "iterations",
        "converged",
        "solve_time_s",
        "setup_time_s",
        "status",
        "error",
    ];

    /// A row for a configuration that failed with `error`.
    pub fn failed(algorithm: &str, desired_size: usize, error: impl ToString) -> Self {
        SweepRecord {
            algorithm: algorithm.to_string(),
            desired_size,
            average_size: None,
            grid_complexity: None,
            levels: None,
            node_element_ratio: None,
            connectivity: None,
            iterations: None,
            converged: None,
            solve_time_s: None,
            setup_time_s: None,
            status: "failed".into(),
            error: Some(error.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::Serialize { path: path.to_path_buf(), msg: format!("{other:?}") },
    }
}

/// Writes the header and one line per record.
pub fn write_sweep_csv(path: impl AsRef<Path>, records: &[SweepRecord]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_sweep_csv_to(file, records).map_err(|e| csv_error(path, e))
}

pub fn write_sweep_csv_to(w: impl Write, records: &[SweepRecord]) -> csv::Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(SweepRecord::FIELDS)?;
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a sweep table back.
pub fn read_sweep_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRecord>> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    rdr.deserialize().collect::<csv::Result<Vec<_>>>().map_err(|e| csv_error(path, e))
}

/// Pretty-printed JSON report.
pub fn write_report_json(path: impl AsRef<Path>, report: &SolveReport) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, report)
        .map_err(|e| Error::Serialize { path: path.to_path_buf(), msg: e.to_string() })?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}
