//! Row-by-row comparison of a statistics table against a reference table.

use serde::Serialize;

use crate::error::{CliError, Result};
use crate::table::Table;

/// Abscissae closer than this (relative to `max(1, |x|)`) are the same point.
const GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowDeviation {
    pub x: f64,
    pub value: f64,
    pub reference: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub column: String,
    pub reference_column: String,
    pub tolerance: f64,
    pub sup_deviation: f64,
    pub pass: bool,
    pub rows: Vec<RowDeviation>,
}

fn pick(t: &Table, name: Option<&str>, what: &str) -> Result<usize> {
    match name {
        Some(n) => t
            .column_index(n)
            .ok_or_else(|| CliError::config(format!("{what} has no column `{n}`"))),
        None if t.columns.len() >= 2 => Ok(1),
        None => Err(CliError::config(format!("{what} needs at least two columns"))),
    }
}

/// Compares `column` of `table` with `reference_column` of `reference` at
/// every abscissa (first column) of `table`. Each abscissa must appear in
/// the reference.
pub fn compare(
    table: &Table,
    reference: &Table,
    column: Option<&str>,
    reference_column: Option<&str>,
    tolerance: f64,
) -> Result<CompareReport> {
    if table.rows.is_empty() {
        return Err(CliError::config("table has no rows"));
    }
    let vc = pick(table, column, "table")?;
    let rc_name = reference_column.or_else(|| {
        column.filter(|c| reference.column_index(c).is_some())
    });
    let rc = pick(reference, rc_name, "reference")?;
    let mut rows = Vec::with_capacity(table.rows.len());
    let mut sup = 0.0f64;
    for row in &table.rows {
        let x = row[0];
        let hit = reference
            .rows
            .iter()
            .find(|r| (r[0] - x).abs() <= GRID_TOL * x.abs().max(1.0))
            .ok_or_else(|| {
                CliError::config(format!("mismatched grids: x = {x} is not in the reference"))
            })?;
        let deviation = (row[vc] - hit[rc]).abs();
        sup = if deviation.is_nan() { f64::NAN } else { sup.max(deviation) };
        rows.push(RowDeviation {
            x,
            value: row[vc],
            reference: hit[rc],
            deviation,
        });
    }
    Ok(CompareReport {
        column: table.columns[vc].clone(),
        reference_column: reference.columns[rc].clone(),
        tolerance,
        sup_deviation: sup,
        pass: sup <= tolerance,
        rows,
    })
}
