//! Tabular results and deterministic CSV output.

use std::fs;
use std::io::Write;
use std::path::Path;

/// Format a value with 12 significant digits; all numeric output flows
/// through here so repeated runs are byte-identical.
pub fn fmt_sig(value: f64) -> String {
    format!("{value:.11e}")
}

/// Round to 12 significant digits (for JSON numbers).
pub fn round_sig(value: f64) -> f64 {
    if !value.is_finite() {
        return value;
    }
    fmt_sig(value).parse().unwrap_or(value)
}

/// A rectangular numeric table with named columns.
#[derive(Debug, Clone)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "ragged result row");
        self.rows.push(row);
    }

    /// Comma-separated, header row, LF line endings, '.' decimal separator.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_sig(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut file = fs::File::create(path)?;
        file.write_all(self.to_csv().as_bytes())
    }
}
