//! Data series behind the four figures.

use std::str::FromStr;

use rayon::prelude::*;

use super::{fmt_exact, Cell, Document};
use crate::bohr_sommerfeld::{bse_energy, deviation, gamma_from_energy, Parity};
use crate::error::{Error, Result};
use crate::special_math::PotentialSpec;
use crate::spectral::{exact_levels, Engine};

/// Exponents sampled in the `m`-dependence figures.
pub const FIGURE_EXPONENTS: [f64; 12] = [1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 12.0, 15.0, 20.0, 30.0, 40.0];

/// Largest level shown in the `N`-dependence figures.
pub const FIGURE_LEVELS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Relative deviation of the ground state against `m`.
    Fig1,
    /// γ of the two lowest levels against `m`.
    Fig2,
    /// γ against `N` for `m = 4` and `m = 6`.
    Fig3,
    /// γ against `N` for `m = 1`, one column per parity.
    Fig4,
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().trim_start_matches("fig") {
            "1" => Ok(FigureId::Fig1),
            "2" => Ok(FigureId::Fig2),
            "3" => Ok(FigureId::Fig3),
            "4" => Ok(FigureId::Fig4),
            _ => Err(format!("unknown figure '{s}' (expected 1 to 4)")),
        }
    }
}

fn gammas(m: f64, levels: &[usize], engine: Engine, tol: Option<f64>) -> Result<Vec<f64>> {
    let spec = PotentialSpec::new(m)?;
    exact_levels(&spec, engine, levels, tol)?
        .iter()
        .map(|r| {
            gamma_from_energy(&spec, r.n, r.energy).map_err(|e| Error::Level {
                m,
                n: r.n,
                source: Box::new(e),
            })
        })
        .collect()
}

fn num(x: f64) -> Cell {
    Cell::num(x, fmt_exact(x))
}

/// The series of one figure, with γ extracted from exact energies.
pub fn emit_figure_data(id: FigureId, engine: Engine, tol: Option<f64>) -> Result<Document> {
    let (columns, rows): (&[&str], Vec<Vec<Cell>>) = match id {
        FigureId::Fig1 => {
            let rows = FIGURE_EXPONENTS
                .par_iter()
                .map(|&m| {
                    let spec = PotentialSpec::new(m)?;
                    let e = exact_levels(&spec, engine, &[0], tol)?[0].energy;
                    let dev = deviation(e, bse_energy(&spec, 0.0)?)?;
                    Ok(vec![num(m), num(dev.rel_dev)])
                })
                .collect::<Result<_>>()?;
            (&["m", "RD_0"], rows)
        }
        FigureId::Fig2 => {
            let rows = FIGURE_EXPONENTS
                .par_iter()
                .map(|&m| {
                    let g = gammas(m, &[0, 1], engine, tol)?;
                    Ok(vec![num(m), num(g[0]), num(g[1])])
                })
                .collect::<Result<_>>()?;
            (&["m", "gamma_0", "gamma_1"], rows)
        }
        FigureId::Fig3 => {
            let levels: Vec<usize> = (0..=FIGURE_LEVELS).collect();
            let (g4, g6) = rayon::join(
                || gammas(4.0, &levels, engine, tol),
                || gammas(6.0, &levels, engine, tol),
            );
            let (g4, g6) = (g4?, g6?);
            let rows = levels
                .iter()
                .map(|&n| vec![Cell::Int(n), num(g4[n]), num(g6[n])])
                .collect();
            (&["N", "gamma_m4", "gamma_m6"], rows)
        }
        FigureId::Fig4 => {
            let levels: Vec<usize> = (0..=FIGURE_LEVELS).collect();
            let g = gammas(1.0, &levels, engine, tol)?;
            let rows = levels
                .iter()
                .map(|&n| match Parity::of(n) {
                    Parity::Even => vec![Cell::Int(n), num(g[n]), Cell::Empty],
                    Parity::Odd => vec![Cell::Int(n), Cell::Empty, num(g[n])],
                })
                .collect();
            (&["N", "gamma_even", "gamma_odd"], rows)
        }
    };
    let mut doc = Document::new(columns)
        .meta("figure", format!("{id:?}").to_lowercase())
        .meta("engine", engine.to_string())
        .meta(
            "tolerance",
            tol.map_or(serde_json::Value::from("auto"), serde_json::Value::from),
        )
        .meta("version", env!("CARGO_PKG_VERSION"));
    doc.rows = rows;
    Ok(doc)
}
