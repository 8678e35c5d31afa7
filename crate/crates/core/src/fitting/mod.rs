//! Closed-form fits: polynomial-root energy models and rational-over-sqrt
//! models for the WKB correction γ, with the published presets and a
//! multi-start least-squares fitter.

mod fit;
mod presets;

pub use fit::{fit_energy_model, fit_gamma_model, EnergyFit, GammaFit, GAMMA_SEEDS};
pub use presets::{builtin_presets, format_preset_line, parse_presets, Preset, PresetKind, PRESETS_TEXT};

use num_rational::Ratio;

use crate::bohr_sommerfeld::Parity;
use crate::error::{domain, Error, Result};
use crate::scalar::{from_usize, lit, Real};
use crate::spectral::ParityScope;

/// Horner evaluation of `sum c[k] x^k`.
pub fn polyval<T: Real>(coeffs: &[T], x: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
}

/// `E(N) = scale_c · (poly(N))^r` with a monic polynomial of degree `d`
/// and `d·r = 1/M`, so the large-N growth is `N^{1/M}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyRootModel<T> {
    pub scale_c: T,
    /// Ascending coefficients; the last one is 1.
    pub poly_coeffs: Vec<T>,
    pub root_power: Ratio<i64>,
}

impl<T: Real> PolyRootModel<T> {
    /// Checks monicity and `d · r = 1/M` for the exponent `m`.
    pub fn new(m: T, scale_c: T, poly_coeffs: Vec<T>, root_power: Ratio<i64>) -> Result<Self> {
        let degree = poly_coeffs.len().saturating_sub(1);
        if degree == 0 || poly_coeffs[degree] != T::one() {
            return Err(Error::Precondition(
                "energy polynomial must be monic of degree >= 1".into(),
            ));
        }
        if !(scale_c > T::zero()) {
            return Err(Error::Precondition(format!("scale must be positive, got {scale_c}")));
        }
        let growth = from_usize::<T>(degree) * ratio_value::<T>(root_power);
        let want = (m.recip() + lit(0.5)).recip();
        if (growth - want).abs() > T::epsilon() * lit(16.0) {
            return Err(Error::Precondition(format!(
                "degree {degree} with power {root_power} grows like N^{growth}, expected N^{want}"
            )));
        }
        Ok(Self {
            scale_c,
            poly_coeffs,
            root_power,
        })
    }

    /// The power `r = 1/(d·M)` as a rational with small denominator.
    pub fn power_for(m: T, degree: usize) -> Ratio<i64> {
        let r = (from_usize::<T>(degree) * (m.recip() + lit(0.5))).recip();
        Ratio::approximate_float(r.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(|| Ratio::from_integer(0))
    }

    pub fn degree(&self) -> usize {
        self.poly_coeffs.len() - 1
    }

    pub fn eval(&self, n: T) -> Result<T> {
        let p = polyval(&self.poly_coeffs, n);
        if !(p > T::zero()) {
            return Err(domain("eval_energy_fit", format!("polynomial is {p} at N = {n}")));
        }
        Ok(self.scale_c * p.powf(ratio_value(self.root_power)))
    }
}

pub(crate) fn ratio_value<T: Real>(r: Ratio<i64>) -> T {
    T::from_i64(*r.numer()).expect("small integer") / T::from_i64(*r.denom()).expect("small integer")
}

/// `γ(N) = P_n(N) / sqrt(Q_{2n+2}(N))` with monic `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSqrtModel<T> {
    /// Ascending coefficients of `P` (any sign printed in front of the
    /// fraction is folded in).
    pub num_coeffs: Vec<T>,
    /// Ascending coefficients of `Q`; the last one is 1.
    pub den_coeffs: Vec<T>,
    pub parity_scope: ParityScope,
}

impl<T: Real> RationalSqrtModel<T> {
    pub fn new(num_coeffs: Vec<T>, den_coeffs: Vec<T>, parity_scope: ParityScope) -> Result<Self> {
        let n = num_coeffs
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::Precondition("empty numerator".into()))?;
        if den_coeffs.len() != 2 * n + 3 {
            return Err(Error::Precondition(format!(
                "denominator of a degree-{n} numerator must have degree {}, got {}",
                2 * n + 2,
                den_coeffs.len() as isize - 1
            )));
        }
        if den_coeffs[2 * n + 2] != T::one() {
            return Err(Error::Precondition("denominator must be monic".into()));
        }
        Ok(Self {
            num_coeffs,
            den_coeffs,
            parity_scope,
        })
    }

    pub fn numerator_degree(&self) -> usize {
        self.num_coeffs.len() - 1
    }

    /// Evaluation at real `N` without the parity check.
    pub fn eval_real(&self, n: T) -> Result<T> {
        let q = polyval(&self.den_coeffs, n);
        if !(q > T::zero()) {
            return Err(domain("eval_gamma_fit", format!("denominator is {q} at N = {n}")));
        }
        Ok(polyval(&self.num_coeffs, n) / q.sqrt())
    }

    pub fn eval(&self, n: usize) -> Result<T> {
        if !self.parity_scope.contains(Parity::of(n)) {
            return Err(domain(
                "eval_gamma_fit",
                format!(
                    "model covers {:?} levels, N = {n} has the other parity",
                    self.parity_scope
                ),
            ));
        }
        self.eval_real(from_usize(n))
    }

    /// Smallest value of `Q` over integer `N` in `[0, n_max]` and 1000
    /// evenly spaced real points (cell midpoints) of the same interval.
    pub fn min_denominator(&self, n_max: usize) -> T {
        min_denominator(&self.den_coeffs, n_max)
    }
}

pub(crate) fn min_denominator<T: Real>(den: &[T], n_max: usize) -> T {
    let top = from_usize::<T>(n_max);
    let integers = (0..=n_max).map(|k| polyval(den, from_usize(k)));
    let samples = (0..1000).map(|k| polyval(den, (from_usize::<T>(k) + lit(0.5)) * top / lit(1000.0)));
    integers.chain(samples).fold(T::infinity(), T::min)
}

/// γ(m, 0) as a rational function of `μ = m - 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gamma0Model<T> {
    pub num_coeffs: Vec<T>,
    pub den_coeffs: Vec<T>,
}

impl<T: Real> Gamma0Model<T> {
    pub fn eval(&self, m: T) -> Result<T> {
        if !(m > T::zero()) {
            return Err(domain("eval_gamma0_vs_m", format!("m must be positive, got {m}")));
        }
        let mu = m - lit(2.0);
        Ok(mu / (lit::<T>(2.0) * m) * polyval(&self.num_coeffs, mu) / polyval(&self.den_coeffs, mu))
    }
}

/// Any of the stored models.
#[derive(Debug, Clone, PartialEq)]
pub enum FitModel<T> {
    PolyRoot(PolyRootModel<T>),
    RationalSqrt(RationalSqrtModel<T>),
    Gamma0(Gamma0Model<T>),
}

pub fn eval_energy_fit<T: Real>(model: &PolyRootModel<T>, n: usize) -> Result<T> {
    model.eval(from_usize(n))
}

pub fn eval_gamma_fit<T: Real>(model: &RationalSqrtModel<T>, n: usize) -> Result<T> {
    model.eval(n)
}

/// The first built-in energy model for exponent `m`.
pub fn preset_energy_model<T: Real>(m: T) -> Result<Option<PolyRootModel<T>>> {
    Ok(builtin_presets::<T>()?.into_iter().find_map(|p| match p.model {
        FitModel::PolyRoot(model) if p.m == Some(m) => Some(model),
        _ => None,
    }))
}

/// The first built-in γ model for exponent `m` that covers levels of
/// parity `parity`.
pub fn preset_gamma_model<T: Real>(m: T, parity: Parity) -> Result<Option<RationalSqrtModel<T>>> {
    Ok(builtin_presets::<T>()?.into_iter().find_map(|p| match p.model {
        FitModel::RationalSqrt(model) if p.m == Some(m) && p.parity.contains(parity) => Some(model),
        _ => None,
    }))
}

/// The published fit of the ground-state correction as a function of `m`.
pub fn eval_gamma0_vs_m<T: Real>(m: T) -> Result<T> {
    let preset = builtin_presets::<T>()?
        .into_iter()
        .find(|p| p.kind == PresetKind::Gamma0)
        .expect("built-in presets include the ground-state model");
    match preset.model {
        FitModel::Gamma0(g) => g.eval(m),
        _ => unreachable!("kind and model agree"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn preset(id: &str) -> FitModel<f64> {
        builtin_presets::<f64>()
            .unwrap()
            .into_iter()
            .find(|p| p.id == id)
            .unwrap_or_else(|| panic!("no preset {id}"))
            .model
    }

    fn energy(id: &str) -> PolyRootModel<f64> {
        match preset(id) {
            FitModel::PolyRoot(m) => m,
            other => panic!("{other:?}"),
        }
    }

    fn gamma(id: &str) -> RationalSqrtModel<f64> {
        match preset(id) {
            FitModel::RationalSqrt(m) => m,
            other => panic!("{other:?}"),
        }
    }

    fn round4(x: f64) -> f64 {
        (x * 1e4).round() / 1e4
    }

    #[test]
    fn energy_presets() {
        assert_eq!(round4(eval_energy_fit(&energy("energy_m1"), 0).unwrap()), 1.0188);
        assert_eq!(round4(eval_energy_fit(&energy("energy_m4"), 10).unwrap()), 50.2570);
        assert_eq!(round4(eval_energy_fit(&energy("energy_m6"), 1).unwrap()), 4.3385);
        assert_eq!(energy("energy_m4").root_power, Ratio::new(1, 3));
    }

    #[test]
    fn gamma_presets() {
        let g = eval_gamma_fit(&gamma("gamma_m4_4d"), 0).unwrap();
        assert!((g - 0.0416 / 0.2616f64.sqrt()).abs() < 1e-15);
        assert!((g - 0.081334).abs() < 1e-6);
        let g = eval_gamma_fit(&gamma("gamma_m6_even_9d"), 0).unwrap();
        assert!((g - 0.134_497_8).abs() < 1e-7);
        let g = eval_gamma_fit(&gamma("gamma_m1_even"), 0).unwrap();
        assert!((g - (-0.0505 / 0.6321f64.sqrt())).abs() < 1e-15);
        assert!((g - (-0.06352)).abs() < 5e-6);
    }

    #[test]
    fn parity_is_enforced() {
        let even = gamma("gamma_m1_even");
        assert!(eval_gamma_fit(&even, 2).is_ok());
        assert!(eval_gamma_fit(&even, 3).is_err());
        let odd = gamma("gamma_m6_odd_9d");
        assert!(eval_gamma_fit(&odd, 0).is_err());
    }

    #[test]
    fn gamma0_examples() {
        assert_eq!(eval_gamma0_vs_m(2.0f64).unwrap(), 0.0);
        let g4 = eval_gamma0_vs_m(4.0f64).unwrap();
        assert!((g4 - 0.08107).abs() < 5e-6, "{g4}");
        let far = eval_gamma0_vs_m(1e9f64).unwrap();
        assert!((far - 0.5).abs() < 1e-6);
    }

    #[test]
    fn growth_exponent_is_checked() {
        let ok = PolyRootModel::new(4.0f64, 2.0, vec![1.0, 0.0, 0.0, 0.0, 1.0], Ratio::new(1, 3));
        assert!(ok.is_ok());
        let bad = PolyRootModel::new(4.0f64, 2.0, vec![1.0, 0.0, 0.0, 0.0, 1.0], Ratio::new(1, 4));
        assert!(bad.is_err());
        assert_eq!(PolyRootModel::<f64>::power_for(6.0, 6), Ratio::new(1, 4));
        assert_eq!(PolyRootModel::<f64>::power_for(1.0, 4), Ratio::new(1, 6));
    }

    #[test]
    fn denominators_stay_positive() {
        for id in [
            "gamma_m4_4d",
            "gamma_m6_4d",
            "gamma_m1_even",
            "gamma_m1_odd",
            "gamma_m4_8d",
        ] {
            assert!(gamma(id).min_denominator(100) > 0.0, "{id}");
        }
    }
}
