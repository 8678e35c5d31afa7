//! Closed-form trial wavefunctions for the quartic and sextic oscillators,
//! their Rayleigh quotient, and the variational optimiser.
//!
//! Quartic, with `S = B² + x²`:
//!
//! ```text
//! ψ = x^p P(x²) S^{-1/4} (B + √S)^{-(2n+p+1/2)} exp(-(A + B²x²/6 + x⁴/3)/√S + A/B)
//! ```
//!
//! Sextic, with `S = D² + C²x² + x⁴`:
//!
//! ```text
//! ψ = x^p P(x²) S^{-1/4} (D + √S)^{-(n+p/2+1/4)} exp(-(A + Bx² + C²x⁴/8 + x⁶/4)/√S + A/D)
//! ```

use crate::error::{domain, Error, Result};
use crate::fitting::polyval;
use crate::linalg::solve_linear;
use crate::optimize::{nelder_mead, SimplexOptions};
use crate::quadrature::{integrate_pieces, QuadOptions};
use crate::scalar::{from_usize, lit, to_f64, Real};
use crate::special_math::PotentialSpec;

/// Highest `n` the orthogonality construction supports.
pub const MAX_N: usize = 2;

/// The seed table shipped with the crate.
pub const SEEDS_TEXT: &str = include_str!("../data/variational_seeds.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Quartic,
    Sextic,
}

impl Family {
    pub fn exponent(self) -> u32 {
        match self {
            Family::Quartic => 4,
            Family::Sextic => 6,
        }
    }

    fn free_params(self) -> usize {
        match self {
            Family::Quartic => 2,
            Family::Sextic => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialParams<T> {
    pub family: Family,
    pub n: usize,
    /// Parity bit; the state index is `2n + p`.
    pub p: u8,
    pub a: T,
    pub b: T,
    /// Unused by the quartic family.
    pub c: T,
    /// Unused by the quartic family.
    pub d: T,
    /// Monic polynomial in `x²` of degree `n`, ascending coefficients.
    pub poly: Vec<T>,
}

impl<T: Real> TrialParams<T> {
    /// Quartic parameters with `P = (x²)^n`; use
    /// [`orthogonality_polynomial`] for excited states.
    pub fn quartic(n: usize, p: u8, a: T, b: T) -> Result<Self> {
        Self {
            family: Family::Quartic,
            n,
            p,
            a,
            b,
            c: T::zero(),
            d: T::zero(),
            poly: monomial(n),
        }
        .validated()
    }

    pub fn sextic(n: usize, p: u8, a: T, b: T, c: T, d: T) -> Result<Self> {
        Self {
            family: Family::Sextic,
            n,
            p,
            a,
            b,
            c,
            d,
            poly: monomial(n),
        }
        .validated()
    }

    pub fn with_poly(mut self, poly: Vec<T>) -> Result<Self> {
        self.poly = poly;
        self.validated()
    }

    pub fn state_index(&self) -> usize {
        2 * self.n + self.p as usize
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(domain("trial_psi", msg));
        if self.p > 1 {
            return fail(format!("parity bit must be 0 or 1, got {}", self.p));
        }
        if self.n > MAX_N {
            return fail(format!("n = {} exceeds the supported maximum {MAX_N}", self.n));
        }
        if self.poly.len() != self.n + 1 || self.poly[self.n] != T::one() {
            return fail(format!("P must be monic of degree {} in x^2", self.n));
        }
        match self.family {
            Family::Quartic if !(self.b > T::zero()) => fail(format!("quartic B must be positive, got {}", self.b)),
            Family::Sextic if !(self.d > T::zero()) => fail(format!("sextic D must be positive, got {}", self.d)),
            _ if !(self.a.is_finite() && self.b.is_finite() && self.c.is_finite()) => {
                fail("parameters must be finite".into())
            }
            _ => Ok(()),
        }
    }

    fn free(&self) -> Vec<T> {
        match self.family {
            Family::Quartic => vec![self.a, self.b],
            Family::Sextic => vec![self.a, self.b, self.c, self.d],
        }
    }

    fn with_free(&self, v: &[T]) -> Self {
        let mut out = self.clone();
        out.a = v[0];
        out.b = v[1];
        if self.family == Family::Sextic {
            out.c = v[2];
            out.d = v[3];
        }
        out
    }
}

fn monomial<T: Real>(n: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n + 1];
    v[n] = T::one();
    v
}

/// `ln h` and its derivative, where `ψ = x^p P(x²) h(x)` and `h > 0`.
fn log_envelope<T: Real>(t: &TrialParams<T>, x: T) -> (T, T) {
    let two = lit::<T>(2.0);
    let x2 = x * x;
    let (s2, ds2, f, df, base, k, shift) = match t.family {
        Family::Quartic => {
            let b2 = t.b * t.b;
            (
                b2 + x2,
                two * x,
                t.a + b2 * x2 / lit(6.0) + x2 * x2 / lit(3.0),
                b2 * x / lit(3.0) + lit::<T>(4.0) * x * x2 / lit(3.0),
                t.b,
                from_usize::<T>(2 * t.n + t.p as usize) + lit(0.5),
                t.a / t.b,
            )
        }
        Family::Sextic => {
            let c2 = t.c * t.c;
            let x4 = x2 * x2;
            (
                t.d * t.d + c2 * x2 + x4,
                two * c2 * x + lit::<T>(4.0) * x * x2,
                t.a + t.b * x2 + c2 * x4 / lit(8.0) + x4 * x2 / lit(4.0),
                two * t.b * x + c2 * x * x2 / two + lit::<T>(1.5) * x4 * x,
                t.d,
                from_usize::<T>(t.n) + from_usize::<T>(t.p as usize) / two + lit(0.25),
                t.a / t.d,
            )
        }
    };
    let s = s2.sqrt();
    let ds = ds2 / (two * s);
    let ln = -s2.ln() / lit(4.0) - k * (base + s).ln() - f / s + shift;
    let dln = -ds2 / (lit::<T>(4.0) * s2) - k * ds / (base + s) - (df * s - f * ds) / s2;
    (ln, dln)
}

/// `x^p P(x²)` and its derivative.
fn prefactor<T: Real>(t: &TrialParams<T>, x: T) -> (T, T) {
    let y = x * x;
    let p = polyval(&t.poly, y);
    let dp: T = t
        .poly
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(T::zero(), |acc, (k, &c)| acc * y + from_usize::<T>(k) * c);
    // d/dx P(x²) = 2x P'(y)
    if t.p == 0 {
        (p, lit::<T>(2.0) * x * dp)
    } else {
        (x * p, p + lit::<T>(2.0) * y * dp)
    }
}

/// The trial wavefunction exactly as printed, constant factors included.
pub fn trial_psi<T: Real>(params: &TrialParams<T>, x: T) -> Result<T> {
    params.validate()?;
    let (ln, _) = log_envelope(params, x.abs());
    let (g, _) = prefactor(params, x.abs());
    let sign = if params.p == 1 && x < T::zero() {
        -T::one()
    } else {
        T::one()
    };
    Ok(sign * g * ln.exp())
}

/// Analytic `dψ/dx`.
pub fn trial_psi_derivative<T: Real>(params: &TrialParams<T>, x: T) -> Result<T> {
    params.validate()?;
    let ax = x.abs();
    let (ln, dln) = log_envelope(params, ax);
    let (g, dg) = prefactor(params, ax);
    // ψ' is odd for even ψ and even for odd ψ
    let sign = if params.p == 0 && x < T::zero() {
        -T::one()
    } else {
        T::one()
    };
    Ok(sign * ln.exp() * (dg + g * dln))
}

/// Point beyond which `ψ²` is below `e^{-700}` of its value scale, past every
/// root of `P`.
fn tail_cutoff<T: Real>(t: &TrialParams<T>) -> Result<T> {
    let (ln0, _) = log_envelope(t, T::zero());
    let step = lit::<T>(0.25);
    let mut x = step;
    let mut peak = ln0;
    while x < lit(200.0) {
        let (ln, _) = log_envelope(t, x);
        peak = peak.max(ln);
        if ln < peak - lit(350.0) {
            return Ok(x);
        }
        x += step;
    }
    Err(domain(
        "energy_functional",
        "trial function does not decay within |x| < 200",
    ))
}

fn check_spec<T: Real>(params: &TrialParams<T>, spec: &PotentialSpec<T>) -> Result<()> {
    if spec.m() != from_usize(params.family.exponent() as usize) || spec.hbar() != T::one() {
        return Err(Error::Precondition(format!(
            "{:?} trial functions need m = {} and hbar = 1, got m = {}, hbar = {}",
            params.family,
            params.family.exponent(),
            spec.m(),
            spec.hbar()
        )));
    }
    Ok(())
}

/// `(∫ ψ'² + |x|^m ψ²) / ∫ ψ²` over the half-line, with a quadrature cutoff
/// of `tail_scale` times the decay point.
fn rayleigh_quotient<T: Real>(params: &TrialParams<T>, spec: &PotentialSpec<T>, tail_scale: T) -> Result<T> {
    params.validate()?;
    let x_end = tail_cutoff(params)? * tail_scale;
    let (ln0, _) = log_envelope(params, T::zero());
    let pieces = 16;
    let breaks: Vec<T> = (0..=pieces)
        .map(|k| x_end * from_usize::<T>(k) / from_usize(pieces))
        .collect();
    let opts = QuadOptions::default();
    // ln h(0) is subtracted to keep the integrands well scaled
    let kinetic_potential = integrate_pieces(
        |x| {
            let (ln, dln) = log_envelope(params, x);
            let (g, dg) = prefactor(params, x);
            let h = (ln - ln0).exp();
            let dpsi = h * (dg + g * dln);
            let psi = h * g;
            dpsi * dpsi + spec.potential(x) * psi * psi
        },
        &breaks,
        opts,
    )?;
    let norm = integrate_pieces(
        |x| {
            let (ln, _) = log_envelope(params, x);
            let (g, _) = prefactor(params, x);
            let psi = (ln - ln0).exp() * g;
            psi * psi
        },
        &breaks,
        opts,
    )?;
    if !(norm.value > T::zero()) {
        return Err(domain("energy_functional", "trial function has zero norm"));
    }
    Ok(kinetic_potential.value / norm.value)
}

/// The variational energy of `params`.
pub fn energy_functional<T: Real>(params: &TrialParams<T>, spec: &PotentialSpec<T>) -> Result<T> {
    check_spec(params, spec)?;
    rayleigh_quotient(params, spec, T::one())
}

/// Same as [`energy_functional`] with the integration range stretched by
/// `tail_scale`; used to check that the cutoff is irrelevant.
pub fn energy_functional_with_tail<T: Real>(
    params: &TrialParams<T>,
    spec: &PotentialSpec<T>,
    tail_scale: T,
) -> Result<T> {
    check_spec(params, spec)?;
    rayleigh_quotient(params, spec, tail_scale)
}

/// `∫_0^∞ f g` for two trial functions of the same parity, each envelope
/// shifted by its value at the origin.
fn overlap_moments<T: Real>(t: &TrialParams<T>, lower: &TrialParams<T>) -> Result<Vec<T>> {
    let x_end = tail_cutoff(t)?.max(tail_cutoff(lower)?);
    let (l0, _) = log_envelope(t, T::zero());
    let (k0, _) = log_envelope(lower, T::zero());
    let pieces = 16;
    let breaks: Vec<T> = (0..=pieces)
        .map(|k| x_end * from_usize::<T>(k) / from_usize(pieces))
        .collect();
    // moments of x^{2j} for j = 0..=n against x^p h ψ_lower
    (0..=t.n)
        .map(|j| {
            integrate_pieces(
                |x| {
                    let (ln, _) = log_envelope(t, x);
                    let (lk, _) = log_envelope(lower, x);
                    let (gk, _) = prefactor(lower, x);
                    let xp = if t.p == 1 { x } else { T::one() };
                    xp * x.powi(2 * j as i32) * (ln - l0 + lk - k0).exp() * gk
                },
                &breaks,
                QuadOptions::default(),
            )
            .map(|r| r.value)
        })
        .collect()
}

/// The monic `P_{n,p}` that makes the state orthogonal to `lower`, which
/// must be the states `(0,p), …, (n-1,p)` of the same family in order.
pub fn orthogonality_polynomial<T: Real>(params: &TrialParams<T>, lower: &[TrialParams<T>]) -> Result<Vec<T>> {
    params.validate()?;
    let n = params.n;
    if n == 0 {
        return Ok(vec![T::one()]);
    }
    if lower.len() != n
        || lower
            .iter()
            .enumerate()
            .any(|(k, l)| l.n != k || l.p != params.p || l.family != params.family)
    {
        return Err(Error::Precondition(format!(
            "P_({n},{}) needs the lower states (0..{n}, {}) of the same family",
            params.p, params.p
        )));
    }
    // row k: sum_j a_j M[k][j] = -M[k][n], with a_n = 1
    let mut mat = Vec::with_capacity(n * n);
    let mut rhs = Vec::with_capacity(n);
    for l in lower {
        l.validate()?;
        let mom = overlap_moments(params, l)?;
        mat.extend_from_slice(&mom[..n]);
        rhs.push(-mom[n]);
    }
    let mut poly = solve_linear(&mat, &rhs, n)?;
    poly.push(T::one());
    let roots = positive_roots(&poly);
    if roots.len() != n {
        return Err(domain(
            "orthogonality_polynomial",
            format!("P has {} positive roots in x^2, expected {n}", roots.len()),
        ));
    }
    Ok(poly)
}

/// Positive real roots of a monic polynomial of degree 1 or 2.
pub fn positive_roots<T: Real>(poly: &[T]) -> Vec<T> {
    let roots = match poly.len() {
        2 => vec![-poly[0]],
        3 => {
            let disc = poly[1] * poly[1] - lit::<T>(4.0) * poly[0];
            if disc < T::zero() {
                vec![]
            } else {
                let s = disc.sqrt();
                vec![(-poly[1] - s) / lit(2.0), (-poly[1] + s) / lit(2.0)]
            }
        }
        _ => vec![],
    };
    roots.into_iter().filter(|r| *r > T::zero()).collect()
}

#[derive(Debug, Clone)]
pub struct VariationalResult<T> {
    pub params: TrialParams<T>,
    pub energy: T,
    pub evals: usize,
    pub converged: bool,
}

/// Minimises the Rayleigh quotient over the free parameters of `seed`
/// with a simplex search. For `n > 0`, `P` is rebuilt at every step from
/// `lower` (see [`orthogonality_polynomial`]).
pub fn optimize_params<T: Real>(
    seed: &TrialParams<T>,
    spec: &PotentialSpec<T>,
    lower: &[TrialParams<T>],
) -> Result<VariationalResult<T>> {
    check_spec(seed, spec)?;
    let build = |v: &[T]| -> Result<TrialParams<T>> {
        let t = seed.with_free(v);
        t.validate()?;
        let poly = orthogonality_polynomial(&t, lower)?;
        t.with_poly(poly)
    };
    let x0 = seed.free();
    build(&x0)?;
    let objective = |v: &[T]| match build(v).and_then(|t| rayleigh_quotient(&t, spec, T::one())) {
        Ok(e) => e,
        Err(_) => T::infinity(),
    };
    let step: Vec<T> = x0.iter().map(|v| v.abs() * lit(0.05) + lit(0.01)).collect();
    let opts = SimplexOptions {
        f_tol: lit(1e-15),
        x_tol: lit(1e-10),
        ..SimplexOptions::default()
    };
    debug_assert_eq!(x0.len(), seed.family.free_params());
    let res = nelder_mead(objective, &x0, &step, opts);
    if !res.f.is_finite() {
        return Err(Error::NotConverged {
            what: format!("variational search for state ({}, {})", seed.n, seed.p),
            best: to_f64(res.f),
            bound: f64::INFINITY,
        });
    }
    let params = build(&res.x)?;
    Ok(VariationalResult {
        energy: res.f,
        params,
        evals: res.evals,
        converged: res.converged,
    })
}

/// One row of the seed table.
#[derive(Debug, Clone)]
pub struct SeedEntry<T> {
    pub id: String,
    pub params: TrialParams<T>,
    /// Published variational energy at exactly these parameters.
    pub reference: Option<T>,
}

pub fn builtin_seeds<T: Real>() -> Result<Vec<SeedEntry<T>>> {
    parse_seeds(SEEDS_TEXT)
}

pub fn parse_seeds<T: Real>(text: &str) -> Result<Vec<SeedEntry<T>>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(parse_seed(line).map_err(|msg| Error::Parse { line: i + 1, msg })?);
    }
    Ok(out)
}

fn parse_seed<T: Real>(line: &str) -> std::result::Result<SeedEntry<T>, String> {
    let cols: Vec<&str> = line.split(';').collect();
    if cols.len() < 6 {
        return Err(format!("expected at least 6 columns, got {}", cols.len()));
    }
    let n: usize = cols[2].parse().map_err(|e| format!("n: {e}"))?;
    let p: u8 = cols[3].parse().map_err(|e| format!("p: {e}"))?;
    let mut kv = Vec::new();
    for col in &cols[4..] {
        let (k, v) = col
            .split_once('=')
            .ok_or_else(|| format!("field '{col}' is not key=value"))?;
        let v: f64 = v.parse().map_err(|e| format!("{k}: {e}"))?;
        kv.push((k, T::from_f64(v).ok_or_else(|| format!("{k} not representable"))?));
    }
    let get = |key: &str| kv.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
    let need = |key: &str| get(key).ok_or_else(|| format!("missing {key}"));
    let params = match cols[1] {
        "quartic" => TrialParams::quartic(n, p, need("A")?, need("B")?),
        "sextic" => TrialParams::sextic(n, p, need("A")?, need("B")?, need("C2")?.sqrt(), need("D")?),
        other => return Err(format!("unknown family '{other}'")),
    }
    .map_err(|e| e.to_string())?;
    Ok(SeedEntry {
        id: cols[0].to_string(),
        params,
        reference: get("E"),
    })
}

/// The seed with the given id from the built-in table.
pub fn builtin_seed<T: Real>(id: &str) -> Result<SeedEntry<T>> {
    builtin_seeds()?
        .into_iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::Precondition(format!("no variational seed '{id}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartic() -> PotentialSpec<f64> {
        PotentialSpec::new(4.0).unwrap()
    }

    fn sextic() -> PotentialSpec<f64> {
        PotentialSpec::new(6.0).unwrap()
    }

    #[test]
    fn published_energies() {
        let q = builtin_seed::<f64>("quartic_ground").unwrap();
        let e = energy_functional(&q.params, &quartic()).unwrap();
        assert!((e - 1.060362092).abs() < 2e-9, "{e}");
        let s = builtin_seed::<f64>("sextic_ground").unwrap();
        let e = energy_functional(&s.params, &sextic()).unwrap();
        assert!((e - 1.144802453803).abs() < 1e-8, "{e}");
    }

    #[test]
    fn parity_and_nodes() {
        let q = TrialParams::quartic(0, 0, -1.8028, 2.1470).unwrap();
        for x in [0.3, 1.0, 2.5] {
            assert_eq!(trial_psi(&q, x).unwrap(), trial_psi(&q, -x).unwrap());
        }
        assert!(trial_psi(&q, 0.0).unwrap() > 0.0);
        let s = TrialParams::sextic(0, 1, -3.0, 0.5, 2.0, 3.0).unwrap();
        assert_eq!(trial_psi(&s, 0.0).unwrap(), 0.0);
        assert_eq!(trial_psi(&s, 0.7).unwrap(), -trial_psi(&s, -0.7).unwrap());
    }

    #[test]
    fn quartic_decay_rate() {
        let q = TrialParams::quartic(0, 0, -1.8028, 2.1470).unwrap();
        let x = 20.0f64;
        // ψ itself underflows here, so compare its logarithm
        let rate = -log_envelope(&q, x).0 / (x * x * x);
        assert!((rate - 1.0 / 3.0).abs() < 0.01, "{rate}");
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let cases = [
            TrialParams::quartic(0, 1, -1.0, 1.6).unwrap(),
            TrialParams::sextic(0, 0, -3.28, 0.58, 2.0, 3.0).unwrap(),
            TrialParams::quartic(1, 0, -0.4, 1.5)
                .unwrap()
                .with_poly(vec![-0.33, 1.0])
                .unwrap(),
        ];
        for t in &cases {
            for x in [-1.3, 0.2, 0.9, 1.7] {
                let h = 1e-5;
                let fd: f64 = (trial_psi(t, x + h).unwrap() - trial_psi(t, x - h).unwrap()) / (2.0 * h);
                let an: f64 = trial_psi_derivative(t, x).unwrap();
                assert!(
                    (fd - an).abs() <= 1e-7 * an.abs().max(1e-3),
                    "{t:?} x={x}: {fd} vs {an}"
                );
            }
        }
    }

    #[test]
    fn cutoff_is_irrelevant() {
        let a = TrialParams::quartic(0, 0, -1.8028, 2.1470).unwrap();
        let e1 = energy_functional(&a, &quartic()).unwrap();
        let e2 = energy_functional_with_tail(&a, &quartic(), 2.0).unwrap();
        assert!(((e1 - e2) / e1).abs() < 1e-13, "{e1} {e2}");
    }

    #[test]
    fn domain_checks() {
        assert!(TrialParams::quartic(0, 0, -1.0, -2.0).is_err());
        assert!(TrialParams::sextic(0, 0, -1.0, 0.5, 1.0, 0.0).is_err());
        assert!(TrialParams::quartic(3, 0, -1.0, 2.0).is_err());
        assert!(TrialParams::quartic(0, 2, -1.0, 2.0).is_err());
        let q = TrialParams::quartic(0, 0, -1.0, 2.0).unwrap();
        assert!(matches!(energy_functional(&q, &sextic()), Err(Error::Precondition(_))));
    }

    #[test]
    fn first_excited_even_state_is_orthogonal() {
        let ground = optimize_params(&builtin_seed::<f64>("quartic_ground").unwrap().params, &quartic(), &[])
            .unwrap()
            .params;
        let seed = builtin_seed::<f64>("quartic_second_even").unwrap().params;
        let poly = orthogonality_polynomial(&seed, std::slice::from_ref(&ground)).unwrap();
        assert_eq!(positive_roots(&poly).len(), 1);
        let t = seed.clone().with_poly(poly).unwrap();
        let num = overlap_moments(&t, &ground).unwrap();
        let overlap = num[0] * t.poly[0] + num[1];
        let norm = overlap_moments(&ground, &ground).unwrap()[0];
        assert!(overlap.abs() <= 1e-10 * norm, "{overlap}");
        assert!(orthogonality_polynomial(&seed, &[]).is_err());
    }

    #[test]
    fn seed_table_parses() {
        let seeds = builtin_seeds::<f64>().unwrap();
        assert_eq!(seeds.len(), 6);
        let s = seeds.iter().find(|s| s.id == "sextic_ground").unwrap();
        assert!((s.params.c * s.params.c - 4.0195).abs() < 1e-12);
        assert_eq!(s.reference, Some(1.144802453803));
        assert!(parse_seeds::<f64>("x;cubic;0;0;A=1;B=1\n").is_err());
    }
}
