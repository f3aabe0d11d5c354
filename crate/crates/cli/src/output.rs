//! Table emission. Every file starts with a reproducibility header.

use serde_json::{json, Value};
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use crate::config::{Format, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits round-trip every f64
            Cell::F(x) => format!("{:.16e}", x + 0.0),
            Cell::I(n) => n.to_string(),
            Cell::S(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(x) if x.is_finite() => json!(x),
            Cell::F(x) => json!(x.to_string()),
            Cell::I(n) => json!(n),
            Cell::S(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::I(n as i64)
    }
}

impl From<u32> for Cell {
    fn from(n: u32) -> Self {
        Cell::I(n as i64)
    }
}

impl From<i64> for Cell {
    fn from(n: i64) -> Self {
        Cell::I(n)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::S(s)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::S(String::new()), Cell::F)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Table { name: name.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "{}", self.name);
        self.rows.push(row);
    }
}

pub fn header(cfg: &RunConfig) -> Value {
    json!({
        "tool": "blockade",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "tolerances": {
            "residual": cfg.tol,
            "negative_clamp": blockade_core::steady::NEGATIVE_CLAMP,
            "eigen": blockade_core::meanfield::EIGEN_TOL,
            "cluster": blockade_core::meanfield::CLUSTER_TOL,
        },
    })
}

fn io(path: &std::path::Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Write `table` under the configured directory and return its path.
pub fn write_table(cfg: &RunConfig, table: &Table) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&cfg.out).map_err(|e| io(&cfg.out, e))?;
    let ext = match cfg.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let path = cfg.out.join(format!("{}.{ext}", table.name));
    let mut buf = Vec::new();
    let head = header(cfg);
    match cfg.format {
        Format::Csv => {
            writeln!(buf, "# {head}").map_err(|e| io(&path, e))?;
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&table.columns).map_err(|e| io(&path, e))?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::csv)).map_err(|e| io(&path, e))?;
            }
            w.flush().map_err(|e| io(&path, e))?;
        }
        Format::Json => {
            let rows: Vec<Value> = table.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
            // the header travels inside the document so the file stays valid JSON
            let doc = json!({ "header": head, "columns": table.columns, "rows": rows });
            serde_json::to_writer_pretty(&mut buf, &doc).map_err(|e| io(&path, e))?;
            buf.push(b'\n');
        }
    }
    fs::write(&path, buf).map_err(|e| io(&path, e))?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            let s = Cell::F(x).csv();
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(Cell::F(0.5).csv(), "5.0000000000000000e-1");
        assert_eq!(Cell::from(None::<f64>).csv(), "");
    }
}
