//! Numerov shooting on the half-line with node counting.
//!
//! `ψ'' = (V - E) ψ` is integrated from the origin with `ψ'(0) = 0` (even)
//! or `ψ(0) = 0` (odd) to the box edge `L`. The level with `k` half-line
//! nodes is bracketed by bisection on the node count and polished with the
//! Illinois variant of regula falsi on `ψ(L)`. Three step sizes are combined
//! by Richardson extrapolation in `h⁴` and `h⁶`.

use crate::bohr_sommerfeld::{bse_energy, EnergyRecord, Method, Parity};
use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, to_f64, Real};
use crate::special_math::PotentialSpec;

use super::{box_half_width, check_exponent, Engine, SpectralConfig};

const RK4_SUBSTEPS: usize = 32;
const MAX_BISECTIONS: usize = 60;
const MAX_EXPANSIONS: usize = 30;
const MAX_STEPS: usize = 1 << 22;
const RESCALE: f64 = 1e200;

struct Shot<T> {
    nodes: usize,
    end: T,
    /// True when the amplitude had to be rescaled, so `end` is not a
    /// continuous function of the energy.
    rescaled: bool,
}

/// Value and slope at `x = h` from RK4 substeps (the Numerov recursion needs
/// two starting values).
fn start<T: Real>(spec: &PotentialSpec<T>, e: T, h: T, parity: Parity) -> (T, T) {
    let (mut y, mut z) = match parity {
        Parity::Even => (T::one(), T::zero()),
        Parity::Odd => (T::zero(), T::one()),
    };
    let dt = h / from_usize(RK4_SUBSTEPS);
    let half: T = lit(0.5);
    let f = |x: T, y: T| (spec.potential(x) - e) * y;
    for i in 0..RK4_SUBSTEPS {
        let x = from_usize::<T>(i) * dt;
        let k1y = z;
        let k1z = f(x, y);
        let k2y = z + half * dt * k1z;
        let k2z = f(x + half * dt, y + half * dt * k1y);
        let k3y = z + half * dt * k2z;
        let k3z = f(x + half * dt, y + half * dt * k2y);
        let k4y = z + dt * k3z;
        let k4z = f(x + dt, y + dt * k3y);
        y += dt / lit(6.0) * (k1y + lit::<T>(2.0) * k2y + lit::<T>(2.0) * k3y + k4y);
        z += dt / lit(6.0) * (k1z + lit::<T>(2.0) * k2z + lit::<T>(2.0) * k3z + k4z);
    }
    (y, z)
}

fn shoot<T: Real>(spec: &PotentialSpec<T>, e: T, l: T, steps: usize, parity: Parity) -> Shot<T> {
    let h = l / from_usize(steps);
    let c = h * h / lit(12.0);
    let q = |i: usize| spec.potential(from_usize::<T>(i) * h) - e;
    let mut prev = match parity {
        Parity::Even => T::one(),
        Parity::Odd => T::zero(),
    };
    let mut cur = start(spec, e, h, parity).0;
    let mut q_prev = q(0);
    let mut q_cur = q(1);
    let mut nodes = 0;
    let mut rescaled = false;
    if prev != T::zero() && prev.signum() != cur.signum() {
        nodes += 1;
    }
    for i in 1..steps {
        let q_next = q(i + 1);
        let next = (lit::<T>(2.0) * (T::one() + lit::<T>(5.0) * c * q_cur) * cur - (T::one() - c * q_prev) * prev)
            / (T::one() - c * q_next);
        if next.signum() != cur.signum() && cur != T::zero() {
            nodes += 1;
        }
        prev = cur;
        cur = next;
        q_prev = q_cur;
        q_cur = q_next;
        if cur.abs() > lit(RESCALE) {
            prev /= lit(RESCALE);
            cur /= lit(RESCALE);
            rescaled = true;
        }
    }
    Shot {
        nodes,
        end: cur,
        rescaled,
    }
}

/// Dirichlet eigenvalue at `L` with `k` half-line nodes for one step size.
fn level_on_grid<T: Real>(spec: &PotentialSpec<T>, n: usize, l: T, steps: usize, mut lo: T, mut hi: T) -> Result<T> {
    let parity = Parity::of(n);
    let k = n / 2;
    let mut expansions = 0;
    let mut f_lo = shoot(spec, lo, l, steps, parity);
    let mut f_hi = shoot(spec, hi, l, steps, parity);
    while f_lo.nodes > k || f_hi.nodes <= k {
        expansions += 1;
        if expansions > MAX_EXPANSIONS {
            return Err(Error::Bracket {
                level: n,
                msg: format!(
                    "node counts {} and {} at E = {lo} and E = {hi} do not straddle {k}",
                    f_lo.nodes, f_hi.nodes
                ),
            });
        }
        if f_lo.nodes > k {
            lo /= lit(1.5);
            f_lo = shoot(spec, lo, l, steps, parity);
        }
        if f_hi.nodes <= k {
            hi *= lit(1.5);
            f_hi = shoot(spec, hi, l, steps, parity);
        }
    }
    // bisection on the node count
    let eps = T::epsilon() * lit(8.0);
    let mut i = 0;
    while i < MAX_BISECTIONS && (f_hi.nodes > k + 1 || f_lo.nodes < k || hi - lo > lit::<T>(1e-3) * hi) {
        let mid = (lo + hi) / lit(2.0);
        let f_mid = shoot(spec, mid, l, steps, parity);
        if f_mid.nodes < f_lo.nodes || f_mid.nodes > f_hi.nodes {
            return Err(Error::NotConverged {
                what: format!("node count at level {n} is not monotone in E; step too coarse"),
                best: to_f64(mid),
                bound: to_f64(hi - lo),
            });
        }
        if f_mid.nodes > k {
            hi = mid;
            f_hi = f_mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
        i += 1;
    }
    // Illinois polish on ψ(L), which changes sign exactly once in [lo, hi]
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f_lo.end, f_hi.end);
    let mut side = 0i8;
    for _ in 0..200 {
        if (b - a).abs() <= eps * b.abs() {
            break;
        }
        let smooth = !(f_lo.rescaled || f_hi.rescaled) && fa.is_finite() && fb.is_finite() && fa != fb;
        let c = if smooth {
            (a * fb - b * fa) / (fb - fa)
        } else {
            (a + b) / lit(2.0)
        };
        let c = if c > a && c < b { c } else { (a + b) / lit(2.0) };
        let sc = shoot(spec, c, l, steps, parity);
        if sc.end == T::zero() {
            return Ok(c);
        }
        if sc.end.signum() == fb.signum() {
            b = c;
            fb = sc.end;
            f_hi = sc;
            if side == 1 {
                fa /= lit(2.0);
            }
            side = 1;
        } else {
            a = c;
            fa = sc.end;
            f_lo = sc;
            if side == -1 {
                fb /= lit(2.0);
            }
            side = -1;
        }
    }
    Ok((a + b) / lit(2.0))
}

/// Level `n` by Numerov shooting. `config.n_points` is the coarsest step
/// count; it is doubled until the extrapolated energy is stable to
/// `config.target_tol`.
pub fn solve_level_numerov<T: Real>(
    spec: &PotentialSpec<T>,
    n: usize,
    config: SpectralConfig<T>,
) -> Result<EnergyRecord<T>> {
    check_exponent(spec)?;
    config.validate()?;
    if config.engine != Engine::Numerov {
        return Err(Error::Precondition(
            "solve_level_numerov needs a Numerov configuration".into(),
        ));
    }
    let lo = if n >= 1 {
        bse_energy(spec, from_usize::<T>(n - 1))?
    } else {
        T::zero()
    };
    let hi = bse_energy(spec, from_usize::<T>(n + 1))?;
    let l = config.half_width_l;
    let needed = box_half_width(spec, hi);
    if l < needed {
        return Err(Error::Bracket {
            level: n,
            msg: format!("half-width {l} is inside the classically allowed region of the bracket; need about {needed}"),
        });
    }
    let mut steps = config.n_points;
    let wrap = |e: Error| Error::Level {
        m: to_f64(spec.m()),
        n,
        source: Box::new(e),
    };
    let mut last: Option<(T, T)> = None;
    loop {
        let run = |s: usize| level_on_grid(spec, n, l, s, lo, hi);
        let energies = [run(steps), run(2 * steps), run(4 * steps)];
        let energies = match energies {
            [Ok(a), Ok(b), Ok(c)] => [a, b, c],
            [a, b, c] => {
                let err = [a, b, c].into_iter().find_map(|r| r.err()).expect("one run failed");
                if matches!(err, Error::NotConverged { .. }) && 8 * steps <= MAX_STEPS {
                    steps *= 2;
                    continue;
                }
                return Err(wrap(err));
            }
        };
        let r4a = (lit::<T>(16.0) * energies[1] - energies[0]) / lit(15.0);
        let r4b = (lit::<T>(16.0) * energies[2] - energies[1]) / lit(15.0);
        let r6 = (lit::<T>(64.0) * r4b - r4a) / lit(63.0);
        let mut err = (r6 - r4b).abs();
        if let Some((prev, _)) = last {
            err = err.max((r6 - prev).abs());
        }
        let tol = config.target_tol.max(r6.abs() * lit(1e-13));
        if err <= tol {
            return Ok(EnergyRecord {
                m: spec.m(),
                n,
                method: Method::ExactNumerov,
                energy: r6,
                est_accuracy: err,
            });
        }
        if 8 * steps > MAX_STEPS {
            return Err(wrap(Error::NotConverged {
                what: "Numerov step refinement".into(),
                best: to_f64(r6),
                bound: to_f64(err),
            }));
        }
        last = Some((r6, err));
        steps *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(m: f64) -> PotentialSpec<f64> {
        PotentialSpec::new(m).unwrap()
    }

    fn solve(m: f64, n: usize) -> f64 {
        let s = spec(m);
        let cfg = SpectralConfig::auto(Engine::Numerov, &s, n).unwrap();
        solve_level_numerov(&s, n, cfg).unwrap().energy
    }

    #[test]
    fn harmonic() {
        for n in [0, 1, 4, 9] {
            let e = solve(2.0, n);
            assert!((e - (2 * n + 1) as f64).abs() < 1e-9, "N={n}: {e}");
        }
    }

    #[test]
    fn linear_and_quartic_anchors() {
        assert!((solve(1.0, 0) - 1.018_792_971_647_471).abs() < 1e-9);
        assert!((solve(1.0, 1) - 2.338_107_410_459_767).abs() < 1e-9);
        assert_eq!((solve(4.0, 5) * 1e4).round() / 1e4, 21.2384);
    }

    #[test]
    fn short_box_is_a_bracket_error() {
        let s = spec(4.0);
        let mut cfg = SpectralConfig::auto(Engine::Numerov, &s, 3).unwrap();
        cfg.half_width_l = 1.0;
        assert!(matches!(solve_level_numerov(&s, 3, cfg), Err(Error::Bracket { .. })));
    }
}
