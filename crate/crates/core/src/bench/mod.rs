//! Experiment harness: data ingestion, synthetic instances, parameter sweeps
//! and CSV output of convergence traces and summary tables.

mod experiment;
pub mod io;
pub mod synth;

use std::path::Path;

use serde_json::json;
use thiserror::Error;

pub use experiment::{
    build_instance, initial_point, load_data, run_experiment, DatasetSpec, ExperimentOutcome, ExperimentSpec,
    GridPoint, GridSpec, ProbeSetting, RunOptions, SolverSection, SummaryRow, SUMMARY_HEADER,
};
pub use io::{load_matrix_csv, load_vector_csv, parse_matrix_csv, write_trace_csv, write_vector_csv};
pub use synth::{gen_randn, subsample};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("csv: {0}")]
    Csv(String),
    #[error("ragged csv: row {row} has {found} fields, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("non-numeric csv cell at row {row}, column {col}: '{value}'")]
    NonNumeric { row: usize, col: usize, value: String },
    #[error("csv file has no data rows")]
    Empty,
    #[error("cannot take {}x{} from a {}x{} matrix", requested.0, requested.1, available.0, available.1)]
    TooLarge { requested: (usize, usize), available: (usize, usize) },
    #[error("invalid experiment spec: {0}")]
    Spec(String),
    #[error("run {method} grid {grid} trial {trial} failed: {source}")]
    Run { method: String, grid: usize, trial: usize, source: crate::Error },
    #[error(transparent)]
    Solver(#[from] crate::Error),
}

impl BenchError {
    pub(crate) fn io(path: &Path, err: std::io::Error) -> Self {
        BenchError::Io { path: path.display().to_string(), message: err.to_string() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            BenchError::Io { .. } => "io",
            BenchError::Csv(_) => "csv",
            BenchError::Ragged { .. } => "ragged",
            BenchError::NonNumeric { .. } => "non_numeric",
            BenchError::Empty => "empty",
            BenchError::TooLarge { .. } => "too_large",
            BenchError::Spec(_) => "spec",
            BenchError::Run { .. } => "run",
            BenchError::Solver(_) => "solver",
        }
    }

    /// Machine-readable form: `{"error": kind, "message": text, ...}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({ "error": self.kind(), "message": self.to_string() });
        match self {
            BenchError::Ragged { row, .. } => v["row"] = json!(row),
            BenchError::NonNumeric { row, col, .. } => {
                v["row"] = json!(row);
                v["col"] = json!(col);
            }
            BenchError::Run { method, grid, trial, .. } => {
                v["method"] = json!(method);
                v["grid"] = json!(grid);
                v["trial"] = json!(trial);
            }
            _ => {}
        }
        v
    }
}
