//! Tables, figure series and their CSV / JSON / Markdown renderings.
//!
//! Everything here runs in `f64`. Output is byte-stable: the same request
//! always renders to the same text.

mod figures;
mod tables;

pub use figures::{emit_figure_data, FigureId, FIGURE_EXPONENTS, FIGURE_LEVELS};
pub use tables::{compute_table, render_table, table_document, Column, TablePreset, TableRequest, TableRow};

use std::str::FromStr;

use serde_json::{Map, Value};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "md" | "markdown" => Ok(Format::Markdown),
            _ => Err(format!("unknown format '{s}' (expected csv, json or markdown)")),
        }
    }
}

/// One table cell: the printed text plus the number behind it for JSON.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Int(usize),
    Text(String),
    Num { value: f64, text: String },
}

impl Cell {
    pub fn num(value: f64, text: String) -> Self {
        Cell::Num { value, text }
    }

    pub fn text(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Num { text, .. } => text.clone(),
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Cell::Empty | Cell::Text(_) => None,
            Cell::Int(n) => Some(*n as f64),
            Cell::Num { value, .. } => Some(*value),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Empty => Value::Null,
            Cell::Int(n) => Value::from(*n),
            Cell::Text(t) => Value::from(t.as_str()),
            Cell::Num { value, .. } => Value::from(*value),
        }
    }
}

/// Energies as printed in the tables.
pub fn fmt_energy(e: f64) -> String {
    unsigned_zero(format!("{e:.4}"))
}

// values that round to zero print without a sign
fn unsigned_zero(s: String) -> String {
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}

/// Two significant figures in `1.9e-1` style.
pub fn fmt_deviation(x: f64) -> String {
    format!("{x:.1e}")
}

pub fn fmt_gamma(g: f64) -> String {
    unsigned_zero(format!("{g:.8}"))
}

/// Shortest text that reads back to the same `f64`; exponent notation for
/// very small or very large magnitudes.
pub fn fmt_exact(x: f64) -> String {
    if x == 0.0 || (1e-4..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// A rectangular result with named columns and free-form metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Vec<(String, Value)>,
}

impl Document {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.push((key.to_string(), value.into()));
        self
    }

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => Ok(self.json()),
            Format::Markdown => Ok(self.markdown()),
        }
    }

    fn csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    fn json(&self) -> String {
        let metadata: Map<String, Value> = self.metadata.iter().cloned().collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({ "metadata": metadata, "rows": rows });
        let mut out = serde_json::to_string_pretty(&doc).expect("plain JSON values serialise");
        out.push('\n');
        out
    }

    fn markdown(&self) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::text).collect()).collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|j| {
                cells
                    .iter()
                    .map(|r| r[j].chars().count())
                    .chain([self.columns[j].chars().count(), 3])
                    .max()
                    .unwrap_or(3)
            })
            .collect();
        let line = |items: &[String]| {
            let padded: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            format!("| {} |\n", padded.join(" | "))
        };
        let mut out = line(&self.columns);
        let rule: Vec<String> = widths.iter().map(|w| format!("{}:", "-".repeat(w - 1))).collect();
        out.push_str(&line(&rule));
        for r in &cells {
            out.push_str(&line(r));
        }
        out
    }
}

/// Parses a level list: `7`, `0..40` (inclusive), `0,1,2,10`, or a mix
/// such as `0..5,10,20`.
pub fn parse_levels(s: &str) -> std::result::Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|e| format!("'{part}': {e}"))?;
            let b: usize = b
                .trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|e| format!("'{part}': {e}"))?;
            if b < a {
                return Err(format!("empty range '{part}'"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|e| format!("'{part}': {e}"))?);
        }
    }
    if out.is_empty() {
        return Err("no levels given".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Document {
        let mut d = Document::new(&["N", "E", "AD"]).meta("m", 4.0);
        d.rows
            .push(vec![Cell::Int(0), Cell::num(1.06036, fmt_energy(1.06036)), Cell::Empty]);
        d.rows.push(vec![
            Cell::Int(10),
            Cell::num(50.2562, fmt_energy(50.2562)),
            Cell::num(-0.097, fmt_deviation(-0.097)),
        ]);
        d
    }

    #[test]
    fn number_formats() {
        assert_eq!(fmt_energy(1.01879297), "1.0188");
        assert_eq!(fmt_deviation(-0.09674), "-9.7e-2");
        assert_eq!(fmt_deviation(2.6e-6), "2.6e-6");
        assert_eq!(fmt_gamma(-1e-12), "0.00000000");
        assert_eq!(fmt_exact(0.25), "0.25");
        assert_eq!(fmt_exact(-2.5e-14), "-2.5e-14");
        // exact binary ties go to the even digit
        assert_eq!(format!("{:.2}", 0.125), "0.12");
    }

    #[test]
    fn csv_layout() {
        assert_eq!(
            sample().render(Format::Csv).unwrap(),
            "N,E,AD\n0,1.0604,\n10,50.2562,-9.7e-2\n"
        );
    }

    #[test]
    fn json_layout() {
        let v: Value = serde_json::from_str(&sample().render(Format::Json).unwrap()).unwrap();
        assert_eq!(v["metadata"]["m"], 4.0);
        assert_eq!(v["rows"][1]["AD"], -0.097);
        assert!(v["rows"][0]["AD"].is_null());
    }

    #[test]
    fn markdown_layout() {
        let md = sample().render(Format::Markdown).unwrap();
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("| --:"));
        assert!(lines[3].contains("-9.7e-2"));
    }

    #[test]
    fn level_lists() {
        assert_eq!(parse_levels("3").unwrap(), vec![3]);
        assert_eq!(parse_levels("0..3,10").unwrap(), vec![0, 1, 2, 3, 10]);
        assert_eq!(parse_levels("2..=4").unwrap(), vec![2, 3, 4]);
        assert!(parse_levels("5..1").is_err());
        assert!(parse_levels("x").is_err());
    }
}
