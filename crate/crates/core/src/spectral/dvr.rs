//! Sinc DVR on the shifted half-line grid `x_j = (j + 1/2) h`.
//!
//! The full-line grid is symmetric about the origin, so the Hamiltonian
//! splits into even and odd blocks; the partner of `x_j` is `-x_j`, which sits
//! `j + j' + 1` grid steps away from `x_{j'}`. For potentials with a cusp at
//! the origin (`m < 2`, or non-even `m`) the error is algebraic in `h`, so
//! the grid is halved repeatedly and the eigenvalues extrapolated with a
//! Richardson table in the cusp exponents.

use crate::bohr_sommerfeld::Parity;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::scalar::{from_usize, lit, to_f64, Real};
use crate::special_math::PotentialSpec;

use super::{check_exponent, Engine, SpectralConfig, SpectrumResult};

/// Largest half-line grid the refinement loop will build.
pub const MAX_POINTS: usize = 3200;

/// Kinetic matrix element `<j| -d²/dx² |j+k>` of the sinc basis.
#[inline]
fn kinetic<T: Real>(k: usize, h2: T) -> T {
    if k == 0 {
        T::PI() * T::PI() / (lit::<T>(3.0) * h2)
    } else {
        let kk = from_usize::<T>(k);
        let s = if k.is_multiple_of(2) { T::one() } else { -T::one() };
        s * lit::<T>(2.0) / (h2 * kk * kk)
    }
}

fn hamiltonian<T: Real>(potential: impl Fn(T) -> T, parity: Parity, h: T, n: usize) -> Vec<T> {
    let h2 = h * h;
    let sign = match parity {
        Parity::Even => T::one(),
        Parity::Odd => -T::one(),
    };
    // kinetic elements only depend on |i - j| and i + j + 1
    let table: Vec<T> = (0..2 * n).map(|k| kinetic(k, h2)).collect();
    let mut a = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = table[i - j] + sign * table[i + j + 1];
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
        let x = (from_usize::<T>(i) + lit(0.5)) * h;
        a[i * n + i] += potential(x);
    }
    a
}

/// The lowest `n_levels` eigenvalues of one parity block on a single grid
/// of `n_points` with spacing `h` (no extrapolation).
pub fn dvr_eigenvalues<T: Real>(
    spec: &PotentialSpec<T>,
    parity: Parity,
    h: T,
    n_points: usize,
    n_levels: usize,
) -> Result<Vec<T>> {
    dvr_eigenvalues_with(|x| spec.potential(x), parity, h, n_points, n_levels)
}

/// [`dvr_eigenvalues`] for an arbitrary even potential given on `x > 0`.
pub fn dvr_eigenvalues_with<T: Real>(
    potential: impl Fn(T) -> T,
    parity: Parity,
    h: T,
    n_points: usize,
    n_levels: usize,
) -> Result<Vec<T>> {
    if n_levels > n_points / 2 {
        return Err(Error::Precondition(format!(
            "{n_levels} levels requested from a {n_points}-point grid; at most half are reliable"
        )));
    }
    let mut a = hamiltonian(potential, parity, h, n_points);
    let eig = symmetric_eigen(&mut a, n_points, false)?;
    Ok(eig.values[..n_levels].to_vec())
}

/// Lowest state of one parity block sampled on the half-line grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DvrState<T> {
    pub energy: T,
    pub x: Vec<T>,
    /// Wavefunction values at `x`, normalised on the full line and
    /// positive near the origin.
    pub psi: Vec<T>,
}

pub fn dvr_ground_state<T: Real>(
    spec: &PotentialSpec<T>,
    parity: Parity,
    h: T,
    n_points: usize,
) -> Result<DvrState<T>> {
    let mut a = hamiltonian(|x| spec.potential(x), parity, h, n_points);
    let eig = symmetric_eigen(&mut a, n_points, true)?;
    let v = eig.vector(0).expect("vectors requested");
    // sinc coefficients are sqrt(h) psi(x_j); the half-line carries half the norm
    let scale = (lit::<T>(2.0) * h).sqrt().recip();
    let flip = if v[0] < T::zero() { -T::one() } else { T::one() };
    Ok(DvrState {
        energy: eig.values[0],
        x: (0..n_points).map(|j| (from_usize::<T>(j) + lit(0.5)) * h).collect(),
        psi: v.iter().map(|&c| flip * c * scale).collect(),
    })
}

/// Levels `0..n_levels` (restricted to `config.parity`) by grid halving
/// with Richardson extrapolation until successive extrapolants agree to
/// `config.target_tol`.
pub fn solve_spectrum_dvr<T: Real>(
    spec: &PotentialSpec<T>,
    config: SpectralConfig<T>,
    n_levels: usize,
) -> Result<SpectrumResult<T>> {
    check_exponent(spec)?;
    config.validate()?;
    if config.engine != Engine::Dvr {
        return Err(Error::Precondition(
            "solve_spectrum_dvr needs a DVR configuration".into(),
        ));
    }
    let mut levels = Vec::new();
    let mut energies = Vec::new();
    let mut converged = Vec::new();
    let mut est = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        if !config.parity.contains(parity) {
            continue;
        }
        let count = (n_levels + 1 - parity.bit() as usize) / 2;
        if count == 0 {
            continue;
        }
        if count > config.n_points / 2 {
            return Err(Error::Precondition(format!(
                "{n_levels} levels need at least {} points per half-line, config has {}",
                2 * count,
                config.n_points
            )));
        }
        let block = refine_block(spec, &config, parity, count)?;
        for (k, (e, acc, ok)) in block.into_iter().enumerate() {
            levels.push(2 * k + parity.bit() as usize);
            energies.push(e);
            est.push(acc);
            converged.push(ok);
        }
    }
    // interleave the parity blocks back into N order
    let mut order: Vec<usize> = (0..levels.len()).collect();
    order.sort_by_key(|&i| levels[i]);
    let pick = |v: &Vec<T>| order.iter().map(|&i| v[i]).collect::<Vec<_>>();
    let result = SpectrumResult {
        levels: order.iter().map(|&i| levels[i]).collect(),
        energies: pick(&energies),
        converged: order.iter().map(|&i| converged[i]).collect(),
        est_accuracy: pick(&est),
        config_used: config,
    };
    if let Some(i) = result.converged.iter().position(|&ok| !ok) {
        return Err(Error::Level {
            m: to_f64(spec.m()),
            n: result.levels[i],
            source: Box::new(Error::NotConverged {
                what: format!("DVR refinement up to {MAX_POINTS} points"),
                best: to_f64(result.energies[i]),
                bound: to_f64(result.est_accuracy[i]),
            }),
        });
    }
    Ok(result)
}

/// Number of Richardson columns kept; deeper tables amplify roundoff.
const RICHARDSON_DEPTH: usize = 3;

/// Error exponents of the raw eigenvalues in `h`.
///
/// The only non-analytic point of `|x|^m` is the origin; its contribution
/// to the eigenvalue error goes like `h^{m+1}, h^{m+3}, ...` for even states
/// and, since odd states vanish there like `x`, `h^{m+3}, h^{m+5}, ...` for
/// odd ones. For even integer `m` the potential is smooth and the error is
/// exponentially small, so no extrapolation is done.
fn error_exponents<T: Real>(m: T, parity: Parity) -> Option<[T; RICHARDSON_DEPTH]> {
    let half = m / lit(2.0);
    if half == half.round() {
        return None;
    }
    let two: T = lit(2.0);
    let lead = match parity {
        Parity::Even => m + T::one(),
        Parity::Odd => m + lit(3.0),
    };
    Some([lead, lead + two, lead + two + two])
}

/// Richardson table over successive halvings of `h`; returns
/// `(estimate, error bound, converged)` per level.
///
/// The estimate is the deepest extrapolant on the finest grid; the bound is
/// its change from the previous grid, i.e. the error of the coarser value.
fn refine_block<T: Real>(
    spec: &PotentialSpec<T>,
    config: &SpectralConfig<T>,
    parity: Parity,
    count: usize,
) -> Result<Vec<(T, T, bool)>> {
    let exponents = error_exponents(spec.m(), parity);
    let mut n = config.n_points;
    let mut h = config.step();
    // rows[k][j]: j-th extrapolant on the k-th grid
    let mut rows: Vec<Vec<Vec<T>>> = Vec::new();
    let mut best: Vec<(T, T, bool)> = vec![(T::nan(), T::infinity(), false); count];
    loop {
        let raw = dvr_eigenvalues(spec, parity, h, n, count)?;
        let mut row = vec![raw];
        if let (Some(prev), Some(p)) = (rows.last(), exponents.as_ref()) {
            for j in 0..prev.len().min(RICHARDSON_DEPTH) {
                let factor = lit::<T>(2.0).powf(p[j]) - T::one();
                let next: Vec<T> = row[j]
                    .iter()
                    .zip(&prev[j])
                    .map(|(&fine, &coarse)| fine + (fine - coarse) / factor)
                    .collect();
                row.push(next);
            }
        }
        if let Some(prev) = rows.last() {
            let depth = row.len() - 1;
            let last = prev.len() - 1;
            // eigenvalue roundoff of the dense solve, amplified by the table
            let norm = T::PI() * T::PI() / (h * h) + spec.potential(config.half_width_l);
            let floor = norm * T::epsilon() * lit(64.0);
            for i in 0..count {
                let value = row[depth][i];
                let err = (row[depth][i] - prev[last][i]).abs();
                let tol = config.target_tol.max(value.abs() * lit(1e-13)).max(floor);
                best[i] = (value, err, err <= tol);
            }
        }
        rows.push(row);
        if best.iter().all(|b| b.2) || 2 * n > MAX_POINTS {
            return Ok(best);
        }
        n *= 2;
        h /= lit(2.0);
    }
}
