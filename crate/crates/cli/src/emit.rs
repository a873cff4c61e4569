//! Table emission: CSV with a header row, or JSON mirroring the same
//! schema as a `columns`/`rows` pair. Floats are printed with 12
//! significant digits, so identical configurations produce byte-identical
//! output.

use std::io::Write;

use serde_json::{json, Value};

use crate::error::CliError;

/// One output cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => fmt_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // parse the 12-digit rendering back so both formats carry the
            // same rounded value
            Cell::Float(x) => json!(fmt_float(*x).parse::<f64>().expect("formatted float")),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
        }
    }
}

/// 12 significant digits, scientific.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let doc = json!({ "columns": self.columns, "rows": rows });
        let mut text = serde_json::to_string_pretty(&doc).expect("table serialize");
        text.push('\n');
        text
    }

    /// Render in the requested format and write to `path` ("-" = stdout).
    pub fn emit(&self, format: &str, path: &str) -> Result<(), CliError> {
        let text = match format {
            "csv" => self.to_csv(),
            "json" => self.to_json(),
            other => return Err(CliError::Usage(format!("unknown format '{other}'"))),
        };
        if path == "-" {
            std::io::stdout().write_all(text.as_bytes())?;
        } else {
            std::fs::write(path, text)?;
        }
        Ok(())
    }
}
