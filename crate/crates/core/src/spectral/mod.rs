//! Exact eigenvalues of `H = -d²/dx² + |x|^m`.
//!
//! Two independent engines: a sinc-function DVR on a half-line grid with
//! reflection images ([`dvr`]), and Numerov shooting with node counting
//! ([`numerov`]). Both are accelerated by Richardson extrapolation in the
//! step size; [`cross_validate`] compares them.

pub mod dvr;
pub mod numerov;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bohr_sommerfeld::{bse_energy, EnergyRecord, Parity};
use crate::error::{domain, Error, Result};
use crate::scalar::{from_usize, lit, to_f64, Real};
use crate::special_math::PotentialSpec;

pub use dvr::{dvr_eigenvalues, dvr_eigenvalues_with, dvr_ground_state, solve_spectrum_dvr, DvrState};
pub use numerov::solve_level_numerov;

/// Exponents above this are refused; use
/// [`square_well_energies`](crate::bohr_sommerfeld::square_well_energies).
pub const MAX_EXPONENT: f64 = 100.0;

/// Absolute tolerance used for `N <= 20` by [`SpectralConfig::auto`].
pub const LOW_LEVEL_TOL: f64 = 1e-10;
/// Absolute tolerance used when levels above 20 are requested.
pub const HIGH_LEVEL_TOL: f64 = 1e-8;

// The wavefunction of the highest requested level must decay by
// exp(-DECAY_ACTION) between its turning point and the box edge.
const DECAY_ACTION: f64 = 22.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Engine {
    Dvr,
    Numerov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityScope {
    Even,
    Odd,
    Both,
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "dvr" => Ok(Engine::Dvr),
            "numerov" => Ok(Engine::Numerov),
            _ => Err(format!("unknown engine '{s}' (expected dvr or numerov)")),
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Engine::Dvr => "dvr",
            Engine::Numerov => "numerov",
        })
    }
}

impl std::str::FromStr for ParityScope {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "all" | "both" => Ok(ParityScope::Both),
            "even" => Ok(ParityScope::Even),
            "odd" => Ok(ParityScope::Odd),
            _ => Err(format!("unknown parity '{s}' (expected all, even or odd)")),
        }
    }
}

impl ParityScope {
    pub fn contains(self, p: Parity) -> bool {
        match self {
            ParityScope::Both => true,
            ParityScope::Even => p == Parity::Even,
            ParityScope::Odd => p == Parity::Odd,
        }
    }
}

/// Discretisation of the half-line `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig<T> {
    pub engine: Engine,
    pub half_width_l: T,
    /// Grid points (DVR) or Numerov steps on `[0, L]` for the coarsest grid.
    pub n_points: usize,
    pub parity: ParityScope,
    /// Absolute energy tolerance.
    pub target_tol: T,
}

impl<T: Real> SpectralConfig<T> {
    /// Picks `L`, the starting grid and the tolerance for levels `0..=n_max`.
    ///
    /// `L` is placed where the WKB decay action of the level just above
    /// `n_max` reaches 22 beyond its turning point. The DVR starts at four
    /// points per local wavelength at that energy (the sinc basis then resolves twice the classical
    /// momentum); Numerov at sixty-four.
    pub fn auto(engine: Engine, spec: &PotentialSpec<T>, n_max: usize) -> Result<Self> {
        check_exponent(spec)?;
        let e_hi = upper_energy(spec, n_max)?;
        let l = box_half_width(spec, e_hi);
        let per_wavelength: f64 = match engine {
            Engine::Dvr => 4.0,
            Engine::Numerov => 64.0,
        };
        let h = lit::<T>(2.0) * T::PI() / (lit::<T>(per_wavelength) * e_hi.sqrt());
        let n_points = (l / h).ceil().to_usize().unwrap_or(usize::MAX).max(16);
        let target_tol = if n_max <= 20 { LOW_LEVEL_TOL } else { HIGH_LEVEL_TOL };
        Ok(Self {
            engine,
            half_width_l: l,
            n_points,
            parity: ParityScope::Both,
            target_tol: lit(target_tol),
        })
    }

    pub fn with_parity(mut self, parity: ParityScope) -> Self {
        self.parity = parity;
        self
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.target_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 16 {
            return Err(Error::Precondition(format!(
                "n_points must be >= 16, got {}",
                self.n_points
            )));
        }
        if !(self.half_width_l > T::zero()) || !self.half_width_l.is_finite() {
            return Err(Error::Precondition(format!(
                "half-width must be positive, got {}",
                self.half_width_l
            )));
        }
        if !(self.target_tol > T::zero()) {
            return Err(Error::Precondition(format!(
                "tolerance must be positive, got {}",
                self.target_tol
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> T {
        self.half_width_l / from_usize(self.n_points)
    }
}

/// Converged levels, ordered by `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult<T> {
    /// Quantum numbers of the entries (all `N`, or one parity class).
    pub levels: Vec<usize>,
    pub energies: Vec<T>,
    pub config_used: SpectralConfig<T>,
    pub converged: Vec<bool>,
    pub est_accuracy: Vec<T>,
}

impl<T: Real> SpectrumResult<T> {
    /// Energy of level `n` if it was computed.
    pub fn energy(&self, n: usize) -> Option<T> {
        self.levels.iter().position(|&k| k == n).map(|i| self.energies[i])
    }

    pub fn records(&self, spec: &PotentialSpec<T>) -> Vec<EnergyRecord<T>> {
        let method = match self.config_used.engine {
            Engine::Dvr => crate::bohr_sommerfeld::Method::ExactDvr,
            Engine::Numerov => crate::bohr_sommerfeld::Method::ExactNumerov,
        };
        self.levels
            .iter()
            .zip(&self.energies)
            .zip(&self.est_accuracy)
            .map(|((&n, &energy), &acc)| EnergyRecord {
                m: spec.m(),
                n,
                method,
                energy,
                est_accuracy: acc,
            })
            .collect()
    }
}

/// Solves for levels `0..=n_max` with an automatically configured DVR.
pub fn exact_spectrum<T: Real>(spec: &PotentialSpec<T>, n_max: usize) -> Result<SpectrumResult<T>> {
    let cfg = SpectralConfig::auto(Engine::Dvr, spec, n_max)?;
    solve_spectrum_dvr(spec, cfg, n_max + 1)
}

/// Energies of the requested levels with either engine. `tol` overrides the
/// automatic tolerance. Numerov levels are shot independently in parallel.
pub fn exact_levels<T: Real>(
    spec: &PotentialSpec<T>,
    engine: Engine,
    levels: &[usize],
    tol: Option<T>,
) -> Result<Vec<EnergyRecord<T>>> {
    let Some(&n_max) = levels.iter().max() else {
        return Ok(Vec::new());
    };
    let mut cfg = SpectralConfig::auto(engine, spec, n_max)?;
    if let Some(t) = tol {
        cfg = cfg.with_tol(t);
    }
    match engine {
        Engine::Dvr => {
            let all = solve_spectrum_dvr(spec, cfg, n_max + 1)?.records(spec);
            levels
                .iter()
                .map(|&n| {
                    all.iter()
                        .find(|r| r.n == n)
                        .copied()
                        .ok_or_else(|| Error::Precondition(format!("level {n} missing from the spectrum")))
                })
                .collect()
        }
        Engine::Numerov => levels
            .par_iter()
            .map(|&n| {
                solve_level_numerov(spec, n, cfg).map_err(|e| match e {
                    Error::Level { .. } => e,
                    other => Error::Level {
                        m: to_f64(spec.m()),
                        n,
                        source: Box::new(other),
                    },
                })
            })
            .collect(),
    }
}

/// Runs both engines on `N <= n_max` and returns the largest relative
/// disagreement.
pub fn cross_validate<T: Real>(spec: &PotentialSpec<T>, n_max: usize) -> Result<T> {
    let dvr = exact_spectrum(spec, n_max)?;
    let cfg = SpectralConfig::auto(Engine::Numerov, spec, n_max)?;
    let mut worst = T::zero();
    for (&n, &e) in dvr.levels.iter().zip(&dvr.energies) {
        let shot = solve_level_numerov(spec, n, cfg)?;
        worst = worst.max((shot.energy - e).abs() / e);
    }
    Ok(worst)
}

pub(crate) fn check_exponent<T: Real>(spec: &PotentialSpec<T>) -> Result<()> {
    if spec.m() > lit(MAX_EXPONENT) {
        return Err(domain(
            "spectral",
            format!(
                "m = {} exceeds {MAX_EXPONENT}; the walls are too steep for a grid, use square_well_energies",
                spec.m()
            ),
        ));
    }
    Ok(())
}

/// An energy safely above level `n_max` and below level `n_max + 2`.
pub(crate) fn upper_energy<T: Real>(spec: &PotentialSpec<T>, n_max: usize) -> Result<T> {
    bse_energy(spec, from_usize::<T>(n_max + 1))
}

/// `L` such that `∫_{x_t}^{L} sqrt(V - E) dx >= DECAY_ACTION`.
pub(crate) fn box_half_width<T: Real>(spec: &PotentialSpec<T>, e: T) -> T {
    let xt = spec.turning_point(e);
    let target: T = lit(DECAY_ACTION);
    let mut dx = (xt + T::one()) / lit(2000.0);
    let mut x = xt;
    let mut acc = T::zero();
    let mut prev = T::zero();
    while acc < target {
        let next = x + dx;
        let cur = (spec.potential(next) - e).max(T::zero()).sqrt();
        acc += (prev + cur) * dx / lit(2.0);
        prev = cur;
        x = next;
        // keep the trapezoid steps short relative to the local decay length
        if cur * dx < lit(0.01) {
            dx *= lit(1.05);
        }
    }
    debug_assert!(to_f64(x) > 0.0);
    x
}
