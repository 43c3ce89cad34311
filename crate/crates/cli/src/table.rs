//! Numeric CSV tables with `#` metadata lines.

use std::fmt::Write as _;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Metadata lines without the leading `#`.
    pub metadata: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, k: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |r| r[k])
    }

    /// Reads a table: `#` lines anywhere, then a header row and numeric rows
    /// of matching width.
    pub fn parse(text: &str) -> Result<Self> {
        let metadata = text
            .lines()
            .filter_map(|l| l.trim_start().strip_prefix('#'))
            .map(|m| m.trim().to_string())
            .collect();
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let columns: Vec<String> = reader
            .headers()
            .map_err(|e| CliError::config(format!("table header: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        if columns.is_empty() || columns.iter().all(|c| c.is_empty()) {
            return Err(CliError::config("table has no header row"));
        }
        let mut rows = Vec::new();
        for (k, record) in reader.records().enumerate() {
            let record = record.map_err(|e| CliError::config(format!("table row {}: {e}", k + 1)))?;
            let row = record
                .iter()
                .map(|cell| {
                    cell.parse::<f64>().map_err(|e| {
                        CliError::config(format!("table row {}: `{cell}`: {e}", k + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok(Table {
            metadata,
            columns,
            rows,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for m in &self.metadata {
            let _ = writeln!(s, "# {m}");
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Shortest round-trip form; scientific notation for very small or large
/// magnitudes.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}
