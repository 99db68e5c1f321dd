//! CSV and JSON reports.
//!
//! CSV carries a fixed set of columns in the order of [`CSV_HEADER`]; JSON
//! carries full [`RunRecord`]s. Both have readers, and writing what was read
//! reproduces the original bytes.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::run::RunRecord;

pub const CSV_HEADER: &str = "problem,n,px,py,pz,overlap,coarse,local_solver,ordering,precision,n_coarse,iterations,converged,t_symbolic,t_numeric,t_solve,true_error,error_msg";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(BenchError::Config(format!("unknown format `{s}` (expected csv, json)"))),
        }
    }
}

/// One CSV line. Field order defines the column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub problem: String,
    pub n: usize,
    pub px: usize,
    pub py: usize,
    pub pz: usize,
    pub overlap: usize,
    pub coarse: String,
    pub local_solver: String,
    pub ordering: String,
    pub precision: String,
    pub n_coarse: usize,
    pub iterations: usize,
    pub converged: bool,
    pub t_symbolic: f64,
    pub t_numeric: f64,
    pub t_solve: f64,
    pub true_error: Option<f64>,
    pub error_msg: String,
}

impl From<&RunRecord> for CsvRow {
    fn from(r: &RunRecord) -> Self {
        Self {
            problem: r.problem.clone(),
            n: r.n,
            px: r.px,
            py: r.py,
            pz: r.pz,
            overlap: r.overlap,
            coarse: r.coarse.clone(),
            local_solver: r.local_solver.clone(),
            ordering: r.ordering.clone(),
            precision: r.precision.clone(),
            n_coarse: r.n_coarse,
            iterations: r.iterations,
            converged: r.converged,
            t_symbolic: r.t_symbolic,
            t_numeric: r.t_numeric,
            t_solve: r.t_solve,
            true_error: r.true_error,
            error_msg: r.error_msg.clone().unwrap_or_default(),
        }
    }
}

pub fn write_csv_rows<W: Write>(w: W, rows: &[CsvRow]) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wr.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        wr.serialize(row)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_csv<W: Write>(w: W, records: &[RunRecord]) -> Result<()> {
    let rows: Vec<CsvRow> = records.iter().map(CsvRow::from).collect();
    write_csv_rows(w, &rows)
}

/// Reads a CSV report, checking the header.
pub fn read_csv<R: Read>(r: R) -> Result<Vec<CsvRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<&str> = rd.headers()?.iter().collect();
    if header.join(",") != CSV_HEADER {
        return Err(BenchError::Config(format!(
            "unexpected CSV header `{}`",
            header.join(",")
        )));
    }
    rd.deserialize().map(|row| row.map_err(BenchError::from)).collect()
}

pub fn write_json<W: Write>(mut w: W, records: &[RunRecord]) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, records)?;
    writeln!(w)?;
    Ok(())
}

pub fn read_json<R: Read>(r: R) -> Result<Vec<RunRecord>> {
    Ok(serde_json::from_reader(r)?)
}

/// Writes `records` to `path` in `format`.
pub fn emit_report(records: &[RunRecord], format: ReportFormat, path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(BenchError::EmptyReport);
    }
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        ReportFormat::Csv => write_csv(&mut w, records)?,
        ReportFormat::Json => write_json(&mut w, records)?,
    }
    w.flush()?;
    Ok(())
}
