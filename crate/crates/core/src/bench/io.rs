//! Dense matrix CSV input and trace/summary CSV output.
//!
//! Numbers are parsed with Rust's locale-independent `f64` parser and
//! written in shortest round-trip form, so a value read back is bit-identical.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::BenchError;
use crate::solvers::SolveTrace;

pub const TRACE_HEADER: [&str; 5] = ["iter", "elapsed_s", "objective", "step_norm", "feas_residual"];

/// Parses a rectangular numeric CSV. A first row with any non-numeric field
/// is taken as a header and skipped. Row numbers in errors are 1-based and
/// count the header.
pub fn parse_matrix_csv<R: Read>(reader: R) -> Result<DMatrix<f64>, BenchError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, record) in rdr.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| BenchError::Csv(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<Result<f64, usize>> = record
            .iter()
            .enumerate()
            .map(|(c, field)| field.parse::<f64>().map_err(|_| c + 1))
            .collect();
        if row == 1 && parsed.iter().any(Result::is_err) {
            continue;
        }
        let values = parsed
            .into_iter()
            .collect::<Result<Vec<f64>, usize>>()
            .map_err(|col| BenchError::NonNumeric {
                row,
                col,
                value: record.get(col - 1).unwrap_or_default().to_string(),
            })?;
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(BenchError::Ragged { row, expected: w, found: values.len() })
            }
            _ => {}
        }
        rows.push(values);
    }
    let ncols = width.ok_or(BenchError::Empty)?;
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub fn load_matrix_csv(path: &Path) -> Result<DMatrix<f64>, BenchError> {
    let file = File::open(path).map_err(|e| BenchError::io(path, e))?;
    parse_matrix_csv(file)
}

/// Loads a vector stored as a single row or a single column.
pub fn load_vector_csv(path: &Path) -> Result<DVector<f64>, BenchError> {
    let m = load_matrix_csv(path)?;
    if m.nrows() != 1 && m.ncols() != 1 {
        return Err(BenchError::Spec(format!(
            "{} holds a {}x{} matrix, expected a single row or column",
            path.display(),
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(DVector::from_iterator(m.len(), m.iter().copied()))
}

fn create(path: &Path) -> Result<BufWriter<File>, BenchError> {
    Ok(BufWriter::new(File::create(path).map_err(|e| BenchError::io(path, e))?))
}

pub fn write_trace_csv(path: &Path, trace: &SolveTrace) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(TRACE_HEADER).map_err(|e| BenchError::Csv(e.to_string()))?;
    for r in trace.all_records() {
        w.write_record([
            r.iter.to_string(),
            r.elapsed_s.to_string(),
            r.objective.to_string(),
            r.step_norm.to_string(),
            r.feas_residual.to_string(),
        ])
        .map_err(|e| BenchError::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| BenchError::io(path, e))
}

/// Writes one value per line under an `x` header.
pub fn write_vector_csv(path: &Path, x: &DVector<f64>) -> Result<(), BenchError> {
    let mut w = create(path)?;
    let mut body = String::from("x\n");
    for v in x.iter() {
        body.push_str(&v.to_string());
        body.push('\n');
    }
    w.write_all(body.as_bytes()).map_err(|e| BenchError::io(path, e))?;
    w.flush().map_err(|e| BenchError::io(path, e))
}

/// Writes a header and string rows.
pub fn write_table_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header).map_err(|e| BenchError::Csv(e.to_string()))?;
    for row in rows {
        w.write_record(row).map_err(|e| BenchError::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| BenchError::io(path, e))
}
