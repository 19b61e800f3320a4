//! CSV and JSON writers. CSV floats carry 17 significant digits so every
//! binary64 value round-trips; JSON documents carry `schema_version`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use nalgebra::DMatrix;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn render(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => format_float(*v),
        Cell::Text(s) => s.clone(),
    }
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(render))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `body` with `schema_version` and `command` prepended.
pub fn write_json(path: &Path, command: &str, body: Value) -> Result<()> {
    let mut doc = Map::new();
    doc.insert("schema_version".into(), SCHEMA_VERSION.into());
    doc.insert("command".into(), command.into());
    if let Value::Object(fields) = body {
        doc.extend(fields);
    } else {
        doc.insert("data".into(), body);
    }
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &Value::Object(doc))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Row-major nested arrays.
pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Long-format rows `(block, i, j, value)` with 1-based indices.
pub fn matrix_cells(block: &str, m: &DMatrix<f64>) -> Vec<Vec<Cell>> {
    let mut rows = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            rows.push(vec![block.into(), (i + 1).into(), (j + 1).into(), m[(i, j)].into()]);
        }
    }
    rows
}
