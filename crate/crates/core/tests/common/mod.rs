#![allow(dead_code)]

use std::collections::BTreeMap;

const EXACT: &str = include_str!("../fixtures/exact_energies.txt");
const TABLES: &str = include_str!("../fixtures/published_tables.txt");
const BSE: &str = include_str!("../fixtures/bse_closed_form.txt");

fn rows(text: &str) -> impl Iterator<Item = Vec<&str>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().collect())
}

/// Reference energies keyed by `(m, N)`.
pub fn exact_energies() -> BTreeMap<(u32, usize), f64> {
    rows(EXACT)
        .map(|r| ((r[0].parse().unwrap(), r[1].parse().unwrap()), r[2].parse().unwrap()))
        .collect()
}

pub fn exact_energy(m: u32, n: usize) -> f64 {
    exact_energies()[&(m, n)]
}

/// One printed table row, cells kept as text.
#[derive(Debug, Clone)]
pub struct PrintedRow {
    pub m: u32,
    pub n: usize,
    pub e_exact: String,
    pub e_fit: String,
    pub e_bs: String,
    pub ad: String,
    pub rd: String,
}

pub fn printed_rows() -> Vec<PrintedRow> {
    rows(TABLES)
        .map(|r| PrintedRow {
            m: r[0].parse().unwrap(),
            n: r[1].parse().unwrap(),
            e_exact: r[2].into(),
            e_fit: r[3].into(),
            e_bs: r[4].into(),
            ad: r[5].into(),
            rd: r[6].into(),
        })
        .collect()
}

/// Closed-form Bohr–Sommerfeld energies keyed by `(m, N)`.
pub fn bse_oracle() -> BTreeMap<(u32, usize), f64> {
    rows(BSE)
        .map(|r| ((r[0].parse().unwrap(), r[1].parse().unwrap()), r[2].parse().unwrap()))
        .collect()
}

/// Decimal places in a printed number.
pub fn decimals(text: &str) -> usize {
    text.split_once('.').map_or(0, |(_, f)| f.len())
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
