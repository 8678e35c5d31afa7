//! The three energy tables (linear, quartic, sextic) and custom variants.

use std::str::FromStr;

use rayon::prelude::*;

use super::{fmt_deviation, fmt_energy, fmt_gamma, Cell, Document, Format};
use crate::bohr_sommerfeld::{bse_energy, deviation, gamma_from_energy};
use crate::error::{Error, Result};
use crate::fitting::preset_energy_model;
use crate::special_math::PotentialSpec;
use crate::spectral::{exact_levels, Engine};

/// Levels printed in the linear-potential table.
const LINEAR_LEVELS: [usize; 13] = [0, 1, 2, 3, 4, 5, 10, 15, 20, 25, 50, 75, 100];
/// Levels printed in the quartic and sextic tables.
const POWER_LEVELS: [usize; 10] = [0, 1, 2, 3, 4, 5, 10, 20, 50, 100];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TablePreset {
    /// `|x|`
    Linear,
    /// `x^4`
    Quartic,
    /// `x^6`
    Sextic,
    Custom,
}

impl TablePreset {
    pub fn exponent(self) -> Option<f64> {
        match self {
            TablePreset::Linear => Some(1.0),
            TablePreset::Quartic => Some(4.0),
            TablePreset::Sextic => Some(6.0),
            TablePreset::Custom => None,
        }
    }

    pub fn levels(self) -> Option<Vec<usize>> {
        match self {
            TablePreset::Linear => Some(LINEAR_LEVELS.to_vec()),
            TablePreset::Quartic | TablePreset::Sextic => Some(POWER_LEVELS.to_vec()),
            TablePreset::Custom => None,
        }
    }
}

impl FromStr for TablePreset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "i" | "linear" => Ok(TablePreset::Linear),
            "2" | "ii" | "quartic" => Ok(TablePreset::Quartic),
            "3" | "iii" | "sextic" => Ok(TablePreset::Sextic),
            "custom" => Ok(TablePreset::Custom),
            _ => Err(format!("unknown table '{s}' (expected 1, 2, 3 or custom)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    EExact,
    EFit,
    EBs,
    Ad,
    Rd,
    Gamma,
}

impl Column {
    pub const ALL: [Column; 6] = [
        Column::EExact,
        Column::EFit,
        Column::EBs,
        Column::Ad,
        Column::Rd,
        Column::Gamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Column::EExact => "E_exact",
            Column::EFit => "E_fit",
            Column::EBs => "E_bs",
            Column::Ad => "AD",
            Column::Rd => "RD",
            Column::Gamma => "gamma",
        }
    }
}

impl FromStr for Column {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Column::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown column '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRequest {
    pub preset: TablePreset,
    pub m: f64,
    pub levels: Vec<usize>,
    pub columns: Vec<Column>,
    pub format: Format,
    pub engine: Engine,
    /// Overrides the automatic energy tolerance.
    pub tol: Option<f64>,
}

impl TableRequest {
    /// The printed layout of one of the three tables.
    pub fn preset(preset: TablePreset) -> Result<Self> {
        let (Some(m), Some(levels)) = (preset.exponent(), preset.levels()) else {
            return Err(Error::Precondition(
                "a custom table needs m and levels; use TableRequest::custom".into(),
            ));
        };
        Ok(Self {
            preset,
            m,
            levels,
            columns: Column::ALL[..5].to_vec(),
            format: Format::Markdown,
            engine: Engine::Dvr,
            tol: None,
        })
    }

    pub fn custom(m: f64, levels: Vec<usize>) -> Self {
        Self {
            preset: TablePreset::Custom,
            m,
            levels,
            columns: Column::ALL[..5].to_vec(),
            format: Format::Markdown,
            engine: Engine::Dvr,
            tol: None,
        }
    }
}

/// Unrounded values of one table row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub n: usize,
    pub e_exact: f64,
    /// `None` when there is no energy model for this exponent.
    pub e_fit: Option<f64>,
    pub e_bs: f64,
    pub ad: f64,
    pub rd: f64,
    pub gamma: f64,
}

pub fn compute_table(req: &TableRequest) -> Result<Vec<TableRow>> {
    if req.levels.is_empty() {
        return Err(Error::Precondition("table has no levels".into()));
    }
    let spec = PotentialSpec::new(req.m)?;
    let exact = exact_levels(&spec, req.engine, &req.levels, req.tol)?;
    let fit = preset_energy_model(req.m)?;
    exact
        .par_iter()
        .map(|rec| {
            let n = rec.n;
            let wrap = |e: Error| Error::Level {
                m: req.m,
                n,
                source: Box::new(e),
            };
            let e_bs = bse_energy(&spec, n as f64).map_err(wrap)?;
            let dev = deviation(rec.energy, e_bs).map_err(wrap)?;
            let e_fit = fit.as_ref().map(|f| f.eval(n as f64)).transpose().map_err(wrap)?;
            Ok(TableRow {
                n,
                e_exact: rec.energy,
                e_fit,
                e_bs,
                ad: dev.abs_dev,
                rd: dev.rel_dev,
                gamma: gamma_from_energy(&spec, n, rec.energy).map_err(wrap)?,
            })
        })
        .collect()
}

pub fn table_document(req: &TableRequest, rows: &[TableRow]) -> Document {
    let mut names = vec!["N"];
    names.extend(req.columns.iter().map(|c| c.name()));
    let mut doc = Document::new(&names)
        .meta("m", req.m)
        .meta("engine", req.engine.to_string())
        .meta(
            "tolerance",
            req.tol.map_or(serde_json::Value::from("auto"), serde_json::Value::from),
        )
        .meta("version", env!("CARGO_PKG_VERSION"));
    for r in rows {
        let mut cells = vec![Cell::Int(r.n)];
        for c in &req.columns {
            cells.push(match c {
                Column::EExact => Cell::num(r.e_exact, fmt_energy(r.e_exact)),
                Column::EFit => r.e_fit.map_or(Cell::Empty, |e| Cell::num(e, fmt_energy(e))),
                Column::EBs => Cell::num(r.e_bs, fmt_energy(r.e_bs)),
                Column::Ad => Cell::num(r.ad, fmt_deviation(r.ad)),
                Column::Rd => Cell::num(r.rd, fmt_deviation(r.rd)),
                Column::Gamma => Cell::num(r.gamma, fmt_gamma(r.gamma)),
            });
        }
        doc.rows.push(cells);
    }
    doc
}

pub fn render_table(req: &TableRequest) -> Result<String> {
    let rows = compute_table(req)?;
    table_document(req, &rows).render(req.format)
}
