//! Reader and writer for the preset table (`data/presets.txt`).
//!
//! Coefficients are kept as the exact decimal strings of the source so a
//! parsed table writes back byte for byte.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::ParityScope;

use super::{FitModel, Gamma0Model, PolyRootModel, RationalSqrtModel};

/// The preset table shipped with the crate.
pub const PRESETS_TEXT: &str = include_str!("../../data/presets.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetKind {
    PolyRoot,
    RationalSqrt,
    Gamma0,
}

impl PresetKind {
    fn tag(self) -> &'static str {
        match self {
            PresetKind::PolyRoot => "poly_root",
            PresetKind::RationalSqrt => "rational_sqrt",
            PresetKind::Gamma0 => "gamma0",
        }
    }
}

/// One row of the preset table.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset<T> {
    pub id: String,
    pub kind: PresetKind,
    /// `None` for models that span all exponents.
    pub m: Option<T>,
    pub parity: ParityScope,
    /// `key=value` fields after the fixed columns, verbatim.
    pub fields: Vec<(String, String)>,
    m_text: String,
    pub model: FitModel<T>,
}

impl<T: Real> Preset<T> {
    /// Serialises back to the table format.
    pub fn to_line(&self) -> String {
        let parity = match self.parity {
            ParityScope::Both => "all",
            ParityScope::Even => "even",
            ParityScope::Odd => "odd",
        };
        let mut out = format!("{};{};{};{}", self.id, self.kind.tag(), self.m_text, parity);
        for (k, v) in &self.fields {
            out.push(';');
            out.push_str(k);
            out.push('=');
            out.push_str(v);
        }
        out
    }

    pub fn field(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn builtin_presets<T: Real>() -> Result<Vec<Preset<T>>> {
    parse_presets(PRESETS_TEXT)
}

pub fn parse_presets<T: Real>(text: &str) -> Result<Vec<Preset<T>>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(parse_line(line).map_err(|msg| Error::Parse { line: i + 1, msg })?);
    }
    Ok(out)
}

fn parse_line<T: Real>(line: &str) -> std::result::Result<Preset<T>, String> {
    let cols: Vec<&str> = line.split(';').collect();
    if cols.len() < 5 {
        return Err(format!("expected at least 5 ';'-separated columns, got {}", cols.len()));
    }
    let id = cols[0].to_string();
    let kind = match cols[1] {
        "poly_root" => PresetKind::PolyRoot,
        "rational_sqrt" => PresetKind::RationalSqrt,
        "gamma0" => PresetKind::Gamma0,
        other => return Err(format!("unknown model kind '{other}'")),
    };
    let m = match cols[2] {
        "*" => None,
        s => Some(number::<T>(s)?),
    };
    let parity = match cols[3] {
        "all" => ParityScope::Both,
        "even" => ParityScope::Even,
        "odd" => ParityScope::Odd,
        other => return Err(format!("unknown parity '{other}'")),
    };
    let mut fields = Vec::new();
    for col in &cols[4..] {
        let (k, v) = col
            .split_once('=')
            .ok_or_else(|| format!("field '{col}' is not key=value"))?;
        fields.push((k.to_string(), v.to_string()));
    }
    let get = |key: &str| {
        fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| format!("missing field '{key}'"))
    };
    let need_m = || m.ok_or_else(|| "this model kind needs a numeric m".to_string());
    let model = match kind {
        PresetKind::PolyRoot => {
            let power = get("power")?;
            let (p, q) = power
                .split_once('/')
                .ok_or_else(|| format!("power '{power}' is not p/q"))?;
            let p: i64 = p.parse().map_err(|e| format!("power numerator: {e}"))?;
            let q: i64 = q.parse().map_err(|e| format!("power denominator: {e}"))?;
            if q == 0 {
                return Err("power has zero denominator".into());
            }
            FitModel::PolyRoot(
                PolyRootModel::new(need_m()?, number(get("scale")?)?, list(get("poly")?)?, Ratio::new(p, q))
                    .map_err(|e| e.to_string())?,
            )
        }
        PresetKind::RationalSqrt => {
            need_m()?;
            let sign = match get("sign")? {
                "+" => T::one(),
                "-" => -T::one(),
                other => return Err(format!("sign must be + or -, got '{other}'")),
            };
            let num = list::<T>(get("num")?)?.into_iter().map(|c| sign * c).collect();
            FitModel::RationalSqrt(RationalSqrtModel::new(num, list(get("den")?)?, parity).map_err(|e| e.to_string())?)
        }
        PresetKind::Gamma0 => FitModel::Gamma0(Gamma0Model {
            num_coeffs: list(get("num")?)?,
            den_coeffs: list(get("den")?)?,
        }),
    };
    Ok(Preset {
        id,
        kind,
        m,
        parity,
        fields,
        m_text: cols[2].to_string(),
        model,
    })
}

/// A preset-table line for a fitted model, with coefficients at full
/// precision. Parses back to the same model.
pub fn format_preset_line<T: Real>(id: &str, m: Option<T>, parity: ParityScope, model: &FitModel<T>) -> String {
    let join = |v: &[T]| v.iter().map(|c| format!("{c:?}")).collect::<Vec<_>>().join(",");
    let m_text = m.map_or_else(|| "*".to_string(), |m| m.to_string());
    let parity = match parity {
        ParityScope::Both => "all",
        ParityScope::Even => "even",
        ParityScope::Odd => "odd",
    };
    let body = match model {
        FitModel::PolyRoot(p) => format!(
            "poly_root;{m_text};{parity};scale={:?};poly={};power={}/{}",
            p.scale_c,
            join(&p.poly_coeffs),
            p.root_power.numer(),
            p.root_power.denom()
        ),
        FitModel::RationalSqrt(r) => format!(
            "rational_sqrt;{m_text};{parity};sign=+;num={};den={}",
            join(&r.num_coeffs),
            join(&r.den_coeffs)
        ),
        FitModel::Gamma0(g) => format!(
            "gamma0;{m_text};{parity};num={};den={}",
            join(&g.num_coeffs),
            join(&g.den_coeffs)
        ),
    };
    format!("{id};{body}")
}

fn number<T: Real>(s: &str) -> std::result::Result<T, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("'{s}': {e}"))?;
    T::from_f64(v).ok_or_else(|| format!("'{s}' not representable"))
}

fn list<T: Real>(s: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',').map(number).collect()
}
