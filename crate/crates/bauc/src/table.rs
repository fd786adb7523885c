//! Rectangular result tables with CSV and JSON serialization.
//!
//! Reals are printed with 9 significant digits, `.` decimal separator,
//! `,` delimiter, LF line endings — locale-independent and diffable.

use std::io::Write;

use crate::{Error, Result};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Str(String),
    Real(f64),
    Int(i64),
    /// Rendered as an empty field.
    Empty,
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Str(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Str(s)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

/// Output format tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

/// Column names plus rectangular rows of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        ResultTable {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::DimensionMismatch(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Serializes in the requested format.
    pub fn write(&self, out: &mut dyn Write, format: TableFormat) -> Result<()> {
        match format {
            TableFormat::Csv => self.write_csv(out),
            TableFormat::Json => self.write_json(out),
        }
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(render_cell).collect();
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn write_json(&self, out: &mut dyn Write) -> Result<()> {
        let mut array = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut object = serde_json::Map::new();
            for (name, cell) in self.columns.iter().zip(row) {
                let value = match cell {
                    Cell::Str(s) => serde_json::Value::String(s.clone()),
                    Cell::Real(v) => serde_json::json!(v),
                    Cell::Int(v) => serde_json::json!(v),
                    Cell::Empty => serde_json::Value::Null,
                };
                object.insert(name.clone(), value);
            }
            array.push(serde_json::Value::Object(object));
        }
        serde_json::to_writer_pretty(&mut *out, &serde_json::Value::Array(array))
            .map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out)?;
        Ok(())
    }

    pub fn to_string_in(&self, format: TableFormat) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf, format).expect("writing to memory");
        String::from_utf8(buf).expect("tables are UTF-8")
    }
}

fn render_cell(cell: &Cell) -> String {
    match cell {
        Cell::Str(s) => {
            if s.contains(',') || s.contains('"') || s.contains('\n') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
        Cell::Real(v) => format_real(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Empty => String::new(),
    }
}

/// Formats a real with 9 significant digits, switching to scientific
/// notation outside a comfortable magnitude window.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=12).contains(&exp) {
        format!("{x:.8e}")
    } else {
        let decimals = (8 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_real(0.9213503964748574), "0.921350396");
        assert_eq!(format_real(123.456), "123.456000");
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(-0.25), "-0.250000000");
        assert_eq!(format_real(3.5e-9), "3.50000000e-9");
        assert_eq!(format_real(1e15), "1.00000000e15");
    }

    #[test]
    fn rectangular_enforced() {
        let mut t = ResultTable::new(vec!["a".into(), "b".into()]);
        t.push_row(vec![Cell::from(1.0), Cell::from("x")]).unwrap();
        assert!(t.push_row(vec![Cell::from(1.0)]).is_err());
    }

    #[test]
    fn csv_rendering() {
        let mut t = ResultTable::new(vec!["name".into(), "value".into()]);
        t.push_row(vec![Cell::from("plain"), Cell::from(0.5)]).unwrap();
        t.push_row(vec![Cell::from("needs,quoting"), Cell::Empty]).unwrap();
        let text = t.to_string_in(TableFormat::Csv);
        assert_eq!(text, "name,value\nplain,0.500000000\n\"needs,quoting\",\n");
    }

    #[test]
    fn json_rendering_round_trips() {
        let mut t = ResultTable::new(vec!["k".into(), "v".into()]);
        t.push_row(vec![Cell::from("a"), Cell::from(2.0)]).unwrap();
        let text = t.to_string_in(TableFormat::Json);
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed[0]["k"], "a");
        assert_eq!(parsed[0]["v"], 2.0);
    }
}
