//! Deterministic tabular output: CSV/JSON rendering and the metadata
//! sidecar written next to every table.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::OutputFormat;
use crate::error::Failure;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    /// CSV rendering; floats use 17 significant digits so they round-trip
    /// to the same double.
    fn render_csv(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn render_json(&self) -> Value {
        match self {
            Cell::Int(n) => json!(n),
            Cell::Float(x) => serde_json::Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.columns.len());
            let fields: Vec<String> = row.iter().map(Cell::render_csv).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// Rows are kept as arrays (paired with a `columns` list) so the column
    /// order survives JSON object-key normalization.
    fn render_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Array(row.iter().map(Cell::render_json).collect()))
            .collect();
        let doc = json!({ "columns": self.columns, "rows": rows });
        let mut text = serde_json::to_string_pretty(&doc).expect("table serializes");
        text.push('\n');
        text
    }
}

/// Path of the metadata sidecar adjacent to an output table.
pub fn sidecar_path(out: &Path) -> PathBuf {
    PathBuf::from(format!("{}.meta.json", out.display()))
}

/// Write the table and its sidecar (command, code version, config echo,
/// command-line overrides).
pub fn write_outputs(
    out: &Path,
    table: &Table,
    format: OutputFormat,
    meta: &Value,
) -> Result<(), Failure> {
    fs::write(out, table.render(format))
        .map_err(|e| Failure::validation(format!("cannot write {}: {e}", out.display())))?;
    let sidecar = sidecar_path(out);
    let mut text = serde_json::to_string_pretty(meta).expect("metadata serializes");
    text.push('\n');
    fs::write(&sidecar, text)
        .map_err(|e| Failure::validation(format!("cannot write {}: {e}", sidecar.display())))?;
    Ok(())
}
