//! Batch driver for the Schwarz preconditioners: builds model problems, runs
//! the symbolic / numeric / solve phases, sweeps one parameter at a time and
//! writes CSV or JSON reports.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::RunConfig;
pub use error::{BenchError, Result};
pub use report::{emit_report, read_csv, read_json, write_csv, write_json, CsvRow, ReportFormat, CSV_HEADER};
pub use run::{execute, run_single, run_sweep, RunOutcome, RunRecord, SweepAxis};
