use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use exactwkb::bohr_sommerfeld::{bse_energy, extract_gamma, modified_bse_energy, Parity};
use exactwkb::error::{Error, Result};
use exactwkb::fitting::{
    fit_energy_model, fit_gamma_model, format_preset_line, preset_energy_model, preset_gamma_model, FitModel,
};
use exactwkb::reports::{
    emit_figure_data, fmt_deviation, fmt_exact, parse_levels, render_table, Cell, Column, Document, FigureId, Format,
    TablePreset, TableRequest,
};
use exactwkb::special_math::PotentialSpec;
use exactwkb::spectral::{exact_levels, Engine, ParityScope};
use exactwkb::variational::{builtin_seeds, energy_functional, optimize_params, Family, SeedEntry};

// an alias keeps clap from treating the parsed list as a repeated flag
type Levels = Vec<usize>;

#[derive(Parser)]
#[command(
    name = "exactwkb",
    version,
    about = "Spectra of -d2/dx2 + |x|^m: Bohr-Sommerfeld, exact, fitted and variational"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// csv, json or markdown
    #[arg(long, default_value = "markdown")]
    format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Energies of a list of levels
    Energy {
        #[arg(long)]
        m: f64,
        /// Levels, e.g. `5`, `0..20` or `0..5,10,50`
        #[arg(long, default_value = "0..10", value_parser = parse_levels)]
        n: Levels,
        /// bs, modified, dvr, numerov or fit
        #[arg(long, default_value = "dvr")]
        method: String,
        /// Absolute tolerance for the exact engines
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// WKB correction γ, extracted from exact energies or from a fit
    Gamma {
        #[arg(long)]
        m: f64,
        #[arg(long, default_value = "0..40", value_parser = parse_levels)]
        n: Levels,
        /// dvr, numerov or fit
        #[arg(long, default_value = "dvr")]
        method: String,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// One of the three printed tables, or a custom one
    Table {
        /// 1 (linear), 2 (quartic), 3 (sextic) or custom
        #[arg(long, default_value = "2")]
        table: TablePreset,
        /// Exponent for a custom table
        #[arg(long)]
        m: Option<f64>,
        /// Levels; replaces the printed ones of a preset table
        #[arg(long, value_parser = parse_levels)]
        n: Option<Levels>,
        /// Comma-separated subset of E_exact,E_fit,E_bs,AD,RD,gamma
        #[arg(long, value_delimiter = ',')]
        columns: Option<Vec<Column>>,
        /// dvr or numerov
        #[arg(long, default_value = "dvr")]
        method: Engine,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Data series of a figure (1 to 4)
    Figure {
        #[arg(long)]
        id: FigureId,
        #[arg(long, default_value = "dvr")]
        method: Engine,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Refit a γ or energy model to freshly computed exact energies
    Fit {
        #[arg(long)]
        m: f64,
        #[arg(long, default_value = "0..100", value_parser = parse_levels)]
        n: Levels,
        /// gamma or energy
        #[arg(long, default_value = "gamma")]
        kind: String,
        /// Numerator degree (gamma) or polynomial degree (energy)
        #[arg(long, default_value_t = 1)]
        degree: usize,
        /// all, even or odd (gamma fits only)
        #[arg(long, default_value = "all")]
        parity: ParityScope,
        #[arg(long, default_value = "dvr")]
        method: Engine,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Variational energies of the trial functions (m = 4 or 6)
    Variational {
        /// Seed id from the built-in table; default: every seed for --m
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        m: Option<f64>,
        /// Optimise the parameters instead of evaluating them as given
        #[arg(long)]
        optimize: bool,
        #[command(flatten)]
        output: Output,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn emit(text: &str, output: &Output) -> Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn num(x: f64) -> Cell {
    Cell::num(x, fmt_exact(x))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Energy {
            m,
            n,
            method,
            tol,
            output,
        } => {
            let doc = energy_document(m, &n, &method, tol)?;
            emit(&doc.render(output.format)?, &output)
        }
        Command::Gamma {
            m,
            n,
            method,
            tol,
            output,
        } => {
            let doc = gamma_document(m, &n, &method, tol)?;
            emit(&doc.render(output.format)?, &output)
        }
        Command::Table {
            table,
            m,
            n,
            columns,
            method,
            tol,
            output,
        } => {
            let mut req = match table {
                TablePreset::Custom => {
                    let (Some(m), Some(n)) = (m, n) else {
                        return Err(Error::Precondition("a custom table needs --m and --n".into()));
                    };
                    TableRequest::custom(m, n)
                }
                preset => {
                    if m.is_some() {
                        return Err(Error::Precondition("--m applies to custom tables only".into()));
                    }
                    let mut req = TableRequest::preset(preset)?;
                    if let Some(n) = n {
                        req.levels = n;
                    }
                    req
                }
            };
            if let Some(c) = columns {
                req.columns = c;
            }
            req.engine = method;
            req.tol = tol;
            req.format = output.format;
            emit(&render_table(&req)?, &output)
        }
        Command::Figure {
            id,
            method,
            tol,
            output,
        } => emit(&emit_figure_data(id, method, tol)?.render(output.format)?, &output),
        Command::Fit {
            m,
            n,
            kind,
            degree,
            parity,
            method,
            tol,
            output,
        } => emit(
            &fit_report(m, &n, &kind, degree, parity, method, tol, output.format)?,
            &output,
        ),
        Command::Variational {
            seed,
            m,
            optimize,
            output,
        } => {
            let doc = variational_document(seed.as_deref(), m, optimize)?;
            emit(&doc.render(output.format)?, &output)
        }
    }
}

fn engine_of(method: &str) -> Option<Engine> {
    method.parse().ok()
}

fn gamma_model_for(m: f64, n: usize) -> Result<exactwkb::fitting::RationalSqrtModel<f64>> {
    preset_gamma_model(m, Parity::of(n))?
        .ok_or_else(|| Error::Precondition(format!("no built-in γ model for m = {m} and level {n}")))
}

fn energy_document(m: f64, levels: &[usize], method: &str, tol: Option<f64>) -> Result<Document> {
    let spec = PotentialSpec::new(m)?;
    let mut doc = Document::new(&["N", "E"]).meta("m", m).meta("method", method);
    let energies: Vec<f64> = match method {
        "bs" => levels
            .iter()
            .map(|&n| bse_energy(&spec, n as f64))
            .collect::<Result<_>>()?,
        "modified" => levels
            .iter()
            .map(|&n| modified_bse_energy(&spec, n, gamma_model_for(m, n)?.eval(n)?))
            .collect::<Result<_>>()?,
        "fit" => {
            let model = preset_energy_model(m)?
                .ok_or_else(|| Error::Precondition(format!("no built-in energy model for m = {m}")))?;
            levels.iter().map(|&n| model.eval(n as f64)).collect::<Result<_>>()?
        }
        other => {
            let engine = engine_of(other).ok_or_else(|| Error::Precondition(format!("unknown method '{other}'")))?;
            doc = doc.meta("tolerance", tol.map_or(json!("auto"), |t| json!(t)));
            exact_levels(&spec, engine, levels, tol)?
                .iter()
                .map(|r| r.energy)
                .collect()
        }
    };
    for (&n, e) in levels.iter().zip(energies) {
        doc.rows.push(vec![Cell::Int(n), num(e)]);
    }
    Ok(doc)
}

fn gamma_document(m: f64, levels: &[usize], method: &str, tol: Option<f64>) -> Result<Document> {
    let spec = PotentialSpec::new(m)?;
    let mut doc = Document::new(&["N", "gamma"]).meta("m", m).meta("method", method);
    let values: Vec<f64> = if method == "fit" {
        levels
            .iter()
            .map(|&n| gamma_model_for(m, n)?.eval(n))
            .collect::<Result<_>>()?
    } else {
        let engine = engine_of(method).ok_or_else(|| Error::Precondition(format!("unknown method '{method}'")))?;
        exact_levels(&spec, engine, levels, tol)?
            .iter()
            .map(|r| extract_gamma(&spec, r).map(|g| g.gamma))
            .collect::<Result<_>>()?
    };
    for (&n, g) in levels.iter().zip(values) {
        doc.rows.push(vec![Cell::Int(n), num(g)]);
    }
    Ok(doc)
}

#[allow(clippy::too_many_arguments)]
fn fit_report(
    m: f64,
    levels: &[usize],
    kind: &str,
    degree: usize,
    parity: ParityScope,
    engine: Engine,
    tol: Option<f64>,
    format: Format,
) -> Result<String> {
    let spec = PotentialSpec::new(m)?;
    let levels: Vec<usize> = levels
        .iter()
        .copied()
        .filter(|&n| parity.contains(Parity::of(n)))
        .collect();
    let exact = exact_levels(&spec, engine, &levels, tol)?;
    let (line, stats) = match kind {
        "gamma" => {
            let data: Vec<_> = exact.iter().map(|r| extract_gamma(&spec, r)).collect::<Result<_>>()?;
            let fit = fit_gamma_model(&data, degree, parity)?;
            let line = format_preset_line("refit", Some(m), parity, &FitModel::RationalSqrt(fit.model.clone()));
            let stats = json!({
                "ssr": fit.ssr,
                "max_abs_dgamma": fit.max_abs_dgamma,
                "max_energy_err": fit.max_energy_err,
                "seed": fit.seed,
            });
            (line, stats)
        }
        "energy" => {
            if parity != ParityScope::Both {
                return Err(Error::Precondition("energy fits use all levels".into()));
            }
            let fit = fit_energy_model(&exact, degree)?;
            let line = format_preset_line("refit", Some(m), parity, &FitModel::PolyRoot(fit.model.clone()));
            (line, json!({ "max_rel_dev": fit.max_rel_dev }))
        }
        other => {
            return Err(Error::Precondition(format!(
                "unknown fit kind '{other}' (gamma or energy)"
            )))
        }
    };
    Ok(match format {
        Format::Json => {
            let doc =
                json!({ "m": m, "levels": levels.len(), "engine": engine.to_string(), "model": line, "stats": stats });
            format!("{}\n", serde_json::to_string_pretty(&doc)?)
        }
        _ => {
            let mut out = format!("{line}\n");
            if let Some(obj) = stats.as_object() {
                for (k, v) in obj {
                    out.push_str(&format!("# {k} = {v}\n"));
                }
            }
            out
        }
    })
}

fn variational_document(seed: Option<&str>, m: Option<f64>, optimize: bool) -> Result<Document> {
    let seeds = builtin_seeds::<f64>()?;
    let chosen: Vec<&SeedEntry<f64>> = seeds
        .iter()
        .filter(|s| seed.is_none_or(|id| s.id == id))
        .filter(|s| m.is_none_or(|m| f64::from(s.params.family.exponent()) == m))
        .collect();
    if chosen.is_empty() {
        return Err(Error::Precondition("no variational seed matches the selection".into()));
    }
    let mut doc =
        Document::new(&["seed", "N", "A", "B", "C", "D", "E_var", "E_exact", "AD"]).meta("optimized", optimize);
    for s in chosen {
        let t = &s.params;
        let spec = PotentialSpec::new(f64::from(t.family.exponent()))?;
        let (params, e_var) = if optimize {
            let lower = lower_states(&seeds, s)?;
            let r = optimize_params(t, &spec, &lower)?;
            (r.params, r.energy)
        } else if t.n == 0 {
            (t.clone(), energy_functional(t, &spec)?)
        } else {
            return Err(Error::Precondition(format!(
                "seed '{}' is an excited state; pass --optimize",
                s.id
            )));
        };
        let e_exact = exact_levels(&spec, Engine::Dvr, &[t.state_index()], None)?[0].energy;
        let (c, d) = match t.family {
            Family::Quartic => (Cell::Empty, Cell::Empty),
            Family::Sextic => (num(params.c), num(params.d)),
        };
        doc.rows.push(vec![
            Cell::Text(s.id.clone()),
            Cell::Int(t.state_index()),
            num(params.a),
            num(params.b),
            c,
            d,
            num(e_var),
            num(e_exact),
            Cell::num(e_var - e_exact, fmt_deviation(e_var - e_exact)),
        ]);
    }
    Ok(doc)
}

/// Optimised lower states of the same family and parity, for excited seeds.
fn lower_states(seeds: &[SeedEntry<f64>], s: &SeedEntry<f64>) -> Result<Vec<exactwkb::variational::TrialParams<f64>>> {
    let spec = PotentialSpec::new(f64::from(s.params.family.exponent()))?;
    let mut lower = Vec::new();
    for k in 0..s.params.n {
        let seed = seeds
            .iter()
            .find(|e| e.params.family == s.params.family && e.params.p == s.params.p && e.params.n == k)
            .ok_or_else(|| Error::Precondition(format!("no seed for the lower state ({k}, {})", s.params.p)))?;
        lower.push(optimize_params(&seed.params, &spec, &lower)?.params);
    }
    Ok(lower)
}
