//! Derivative-free simplex minimisation and a Levenberg–Marquardt polisher
//! for small least-squares problems.

use crate::linalg::least_squares;
use crate::scalar::{from_usize, lit, Real};

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions<T> {
    pub max_evals: usize,
    /// Stop when the spread of objective values across the simplex falls below
    /// `f_tol * (|f_best| + f_floor)`.
    pub f_tol: T,
    pub f_floor: T,
    /// ... and every vertex lies within `x_tol` (relative) of the best one.
    pub x_tol: T,
    /// Number of restarts from the best vertex with a fresh simplex.
    pub restarts: usize,
}

impl<T: Real> Default for SimplexOptions<T> {
    fn default() -> Self {
        Self {
            max_evals: 20_000,
            f_tol: lit(1e-14),
            f_floor: lit(1e-30),
            x_tol: lit(1e-12),
            restarts: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult<T> {
    pub x: Vec<T>,
    pub f: T,
    pub evals: usize,
    pub converged: bool,
}

/// Nelder–Mead with the standard reflection/expansion/contraction/shrink
/// coefficients (1, 2, 1/2, 1/2). `step[i]` sizes the initial simplex along
/// axis `i`. Non-finite objective values are treated as `+∞`, so constraints
/// can be imposed by rejection.
pub fn nelder_mead<T, F>(mut f: F, x0: &[T], step: &[T], opts: SimplexOptions<T>) -> SimplexResult<T>
where
    T: Real,
    F: FnMut(&[T]) -> T,
{
    let dim = x0.len();
    assert_eq!(step.len(), dim);
    let mut evals = 0usize;
    let mut eval = |x: &[T], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            T::infinity()
        }
    };

    let mut best_x = x0.to_vec();
    let mut best_f = eval(x0, &mut evals);
    let mut converged = false;

    for round in 0..=opts.restarts {
        let shrink: T = if round == 0 { T::one() } else { lit(0.1) };
        let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(dim + 1);
        simplex.push((best_x.clone(), best_f));
        for i in 0..dim {
            let mut x = best_x.clone();
            let h = if round == 0 {
                step[i]
            } else {
                (best_x[i].abs() * lit(0.05)).max(step[i] * shrink * shrink)
            };
            x[i] += h;
            let fx = eval(&x, &mut evals);
            simplex.push((x, fx));
        }
        converged = false;
        while evals < opts.max_evals {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            let f_best = simplex[0].1;
            let f_worst = simplex[dim].1;
            let f_spread = (f_worst - f_best).abs();
            let x_spread = simplex[1..]
                .iter()
                .flat_map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .map(|(&a, &b)| (a - b).abs() / (b.abs() + T::one()))
                })
                .fold(T::zero(), T::max);
            if f_spread <= opts.f_tol * (f_best.abs() + opts.f_floor) && x_spread <= opts.x_tol.sqrt() {
                converged = true;
                break;
            }
            if x_spread <= opts.x_tol {
                converged = true;
                break;
            }

            let inv = from_usize::<T>(dim).recip();
            let mut centroid = vec![T::zero(); dim];
            for (x, _) in &simplex[..dim] {
                for (c, &v) in centroid.iter_mut().zip(x) {
                    *c += v * inv;
                }
            }
            let along = |coef: T, worst: &[T]| -> Vec<T> {
                centroid.iter().zip(worst).map(|(&c, &w)| c + coef * (c - w)).collect()
            };
            let worst = simplex[dim].0.clone();
            let xr = along(T::one(), &worst);
            let fr = eval(&xr, &mut evals);
            if fr < simplex[0].1 {
                let xe = along(lit(2.0), &worst);
                let fe = eval(&xe, &mut evals);
                simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[dim - 1].1 {
                simplex[dim] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < simplex[dim].1 {
                let xc = along(lit(0.5), &worst);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(lit(-0.5), &worst);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < simplex[dim].1.min(fr) {
                simplex[dim] = (xc, fc);
                continue;
            }
            let x_best = simplex[0].0.clone();
            for (x, fx) in simplex.iter_mut().skip(1) {
                for (v, &b) in x.iter_mut().zip(&x_best) {
                    *v = b + (*v - b) * lit(0.5);
                }
                *fx = eval(x, &mut evals);
            }
        }
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let improved = simplex[0].1 < best_f;
        if simplex[0].1 <= best_f {
            best_x = simplex[0].0.clone();
            best_f = simplex[0].1;
        }
        if evals >= opts.max_evals || (round > 0 && !improved) {
            break;
        }
    }
    SimplexResult {
        x: best_x,
        f: best_f,
        evals,
        converged,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LmOptions<T> {
    pub max_iters: usize,
    pub rel_step_tol: T,
}

impl<T: Real> Default for LmOptions<T> {
    fn default() -> Self {
        Self {
            max_iters: 500,
            rel_step_tol: lit(1e-15),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmResult<T> {
    pub x: Vec<T>,
    /// Sum of squared residuals at `x`.
    pub ssr: T,
    pub iters: usize,
}

/// Levenberg–Marquardt on `residuals(x) -> (r, J)` where `J` is row-major
/// `len(r) × len(x)`. `accept(x)` can veto trial points (e.g. constraint
/// violations); vetoed points are handled like an increase of the objective.
pub fn levenberg_marquardt<T, R, A>(
    mut residuals: R,
    mut accept: A,
    x0: &[T],
    opts: LmOptions<T>,
) -> Option<LmResult<T>>
where
    T: Real,
    R: FnMut(&[T]) -> Option<(Vec<T>, Vec<T>)>,
    A: FnMut(&[T]) -> bool,
{
    let p = x0.len();
    let mut x = x0.to_vec();
    let (mut r, mut jac) = residuals(&x)?;
    let mut ssr: T = r.iter().map(|v| *v * *v).sum();
    let mut lambda: T = lit(1e-3);
    let mut iters = 0;
    while iters < opts.max_iters {
        iters += 1;
        let rows = r.len();
        // column norms of J give the Marquardt scaling
        let mut diag = vec![T::zero(); p];
        for k in 0..rows {
            for i in 0..p {
                diag[i] += jac[k * p + i] * jac[k * p + i];
            }
        }
        let mut improved = false;
        let mut tiny_step = false;
        for _ in 0..40 {
            // the step solves [J; sqrt(λ D)] δ ≈ [-r; 0] by QR, which avoids
            // squaring the condition number of J
            let mut a = jac.clone();
            let mut rhs: Vec<T> = r.iter().map(|v| -*v).collect();
            for i in 0..p {
                let mut row = vec![T::zero(); p];
                row[i] = (lambda * (diag[i] + T::min_positive_value().sqrt())).sqrt();
                a.extend(row);
                rhs.push(T::zero());
            }
            let Ok(delta) = least_squares(&a, &rhs, rows + p, p) else {
                lambda *= lit(10.0);
                continue;
            };
            let trial: Vec<T> = x.iter().zip(&delta).map(|(&a, &d)| a + d).collect();
            let step_rel = delta
                .iter()
                .zip(&x)
                .map(|(&d, &v)| d.abs() / (v.abs() + lit(1e-12)))
                .fold(T::zero(), T::max);
            if step_rel < opts.rel_step_tol {
                tiny_step = true;
                break;
            }
            if accept(&trial) {
                if let Some((rt, jt)) = residuals(&trial) {
                    let st: T = rt.iter().map(|v| *v * *v).sum();
                    if st.is_finite() && st < ssr {
                        x = trial;
                        r = rt;
                        jac = jt;
                        ssr = st;
                        lambda = (lambda * lit(0.3)).max(lit(1e-15));
                        improved = true;
                        break;
                    }
                }
            }
            lambda *= lit(10.0);
            if lambda > lit(1e16) {
                break;
            }
        }
        if !improved || tiny_step {
            break;
        }
    }
    Some(LmResult { x, ssr, iters })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_finds_rosenbrock_minimum() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(rosen, &[-1.2, 1.0], &[0.5, 0.5], SimplexOptions::default());
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r.x);
    }

    #[test]
    fn simplex_respects_rejection() {
        // minimum of (x-1)^2 restricted to x > 2 is at the boundary
        let f = |x: &[f64]| {
            if x[0] > 2.0 {
                (x[0] - 1.0).powi(2) + x[1] * x[1]
            } else {
                f64::NAN
            }
        };
        let r = nelder_mead(f, &[3.0, 1.0], &[0.3, 0.3], SimplexOptions::default());
        assert!(r.x[0] > 2.0 && r.x[0] < 2.0 + 1e-5, "{:?}", r.x);
    }

    #[test]
    fn lm_fits_exponential_exactly() {
        let ts: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = ts.iter().map(|t| 2.5 * (-1.3 * t).exp()).collect();
        let res = |p: &[f64]| {
            let mut r = Vec::new();
            let mut j = Vec::new();
            for (&t, &y) in ts.iter().zip(&ys) {
                let e = (p[1] * t).exp();
                r.push(p[0] * e - y);
                j.push(e);
                j.push(p[0] * t * e);
            }
            Some((r, j))
        };
        let out = levenberg_marquardt(res, |_| true, &[1.0, -0.5], LmOptions::default()).unwrap();
        assert!(
            (out.x[0] - 2.5).abs() < 1e-12 && (out.x[1] + 1.3).abs() < 1e-12,
            "{:?}",
            out.x
        );
    }
}
