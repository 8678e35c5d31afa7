//! Closed-form Bohr–Sommerfeld energies, the modified (exact-WKB) spectrum,
//! extraction of the WKB correction γ, and deviation bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::{from_usize, lit, Real};
use crate::special_math::PotentialSpec;

/// Accuracy attached to closed-form records.
pub const CLOSED_FORM_ACCURACY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Parity `(-1)^N` of level `N`.
    pub fn of(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Bs,
    ModifiedBs,
    ExactDvr,
    ExactNumerov,
    Fit,
    Variational,
}

/// One energy value of the spectrum of `|x|^m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord<T> {
    pub m: T,
    pub n: usize,
    pub method: Method,
    pub energy: T,
    /// Estimated absolute uncertainty of `energy`.
    pub est_accuracy: T,
}

impl<T: Real> EnergyRecord<T> {
    pub fn parity(&self) -> Parity {
        Parity::of(self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GammaSource {
    Extracted,
    Fitted,
}

/// A value of the WKB correction γ(m, N).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaRecord<T> {
    pub m: T,
    pub n: usize,
    pub parity: Parity,
    pub gamma: T,
    pub source: GammaSource,
}

/// Absolute (`E_exact - E_BS`) and relative deviation of the
/// Bohr–Sommerfeld energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationRecord<T> {
    pub abs_dev: T,
    pub rel_dev: T,
}

/// `E_BS(N) = (hbar M B(1/2, M) (N + 1/2))^{1/M}`; `n` may be any real `≥ 0`.
pub fn bse_energy<T: Real>(spec: &PotentialSpec<T>, n: T) -> Result<T> {
    if !(n >= T::zero()) {
        return Err(domain("bse_energy", format!("quantum number must be >= 0, got {n}")));
    }
    modified_energy(spec, n + lit(0.5))
}

pub fn bse_record<T: Real>(spec: &PotentialSpec<T>, n: usize) -> Result<EnergyRecord<T>> {
    Ok(EnergyRecord {
        m: spec.m(),
        n,
        method: Method::Bs,
        energy: bse_energy(spec, from_usize(n))?,
        est_accuracy: lit(CLOSED_FORM_ACCURACY),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SquareWellLevel {
    Bs,
    Exact,
}

/// The `m → ∞` limit, a square well of width 2:
/// `hbar² π² (N + 1/2)² / 4` (Bohr–Sommerfeld) or `hbar² π² (N + 1)² / 4`.
pub fn square_well_energies<T: Real>(n: usize, which: SquareWellLevel, hbar: T) -> T {
    let q = match which {
        SquareWellLevel::Bs => from_usize::<T>(n) + lit(0.5),
        SquareWellLevel::Exact => from_usize::<T>(n) + T::one(),
    };
    hbar * hbar * T::PI() * T::PI() * q * q / lit(4.0)
}

fn modified_energy<T: Real>(spec: &PotentialSpec<T>, action_quanta: T) -> Result<T> {
    Ok((spec.quantization_constant() * action_quanta).powf(spec.big_m().recip()))
}

/// `(hbar M B(1/2, M) (N + 1/2 + γ))^{1/M}`.
pub fn modified_bse_energy<T: Real>(spec: &PotentialSpec<T>, n: usize, gamma: T) -> Result<T> {
    let quanta = from_usize::<T>(n) + lit(0.5) + gamma;
    if !(quanta > T::zero()) {
        return Err(domain(
            "modified_bse_energy",
            format!("N + 1/2 + gamma must be positive, got {quanta}"),
        ));
    }
    modified_energy(spec, quanta)
}

/// Inverts [`modified_bse_energy`]: `γ = E^M / (hbar M B(1/2, M)) - N - 1/2`.
pub fn gamma_from_energy<T: Real>(spec: &PotentialSpec<T>, n: usize, e_exact: T) -> Result<T> {
    if !(e_exact > T::zero()) {
        return Err(domain(
            "gamma_from_energy",
            format!("energy must be positive, got {e_exact}"),
        ));
    }
    Ok(e_exact.powf(spec.big_m()) / spec.quantization_constant() - from_usize::<T>(n) - lit(0.5))
}

pub fn extract_gamma<T: Real>(spec: &PotentialSpec<T>, record: &EnergyRecord<T>) -> Result<GammaRecord<T>> {
    Ok(GammaRecord {
        m: spec.m(),
        n: record.n,
        parity: record.parity(),
        gamma: gamma_from_energy(spec, record.n, record.energy)?,
        source: GammaSource::Extracted,
    })
}

/// Leading large-N coefficients of `E ≈ c_M N^{1/M} (1 + a/N + ...)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticCoeffs<T> {
    pub c_m: T,
    /// Bohr–Sommerfeld value of `a`, `m / (m + 2)`.
    pub a_bs: T,
}

pub fn asymptotic_coeffs<T: Real>(spec: &PotentialSpec<T>) -> AsymptoticCoeffs<T> {
    let m = spec.m();
    AsymptoticCoeffs {
        c_m: spec.quantization_constant().powf(spec.big_m().recip()),
        a_bs: m / (m + lit(2.0)),
    }
}

/// Numerically extracted coefficient `s` of `N^{1/M - 1}` in the large-N
/// expansion of [`bse_energy`].
///
/// `s(N) = (E_BS(N) - c_M N^{1/M}) N^{1 - 1/M}` is sampled at `N`, `10N`,
/// `100N` and extrapolated to `1/N → 0` with a quadratic through the three
/// points.
pub fn subleading_coefficient<T: Real>(spec: &PotentialSpec<T>, n_base: T) -> Result<T> {
    let c = asymptotic_coeffs(spec).c_m;
    let p = spec.big_m().recip();
    let ten: T = lit(10.0);
    let ns = [n_base, n_base * ten, n_base * ten * ten];
    let mut ts = [T::zero(); 3];
    let mut ss = [T::zero(); 3];
    for (i, &n) in ns.iter().enumerate() {
        let e = bse_energy(spec, n)?;
        ts[i] = n.recip();
        ss[i] = (e - c * n.powf(p)) * n.powf(T::one() - p);
    }
    // Lagrange interpolation evaluated at t = 0.
    let mut value = T::zero();
    for i in 0..3 {
        let mut w = T::one();
        for j in 0..3 {
            if i != j {
                w *= ts[j] / (ts[j] - ts[i]);
            }
        }
        value += w * ss[i];
    }
    Ok(value)
}

pub fn deviation<T: Real>(e_exact: T, e_bs: T) -> Result<DeviationRecord<T>> {
    if !(e_exact > T::zero()) {
        return Err(domain(
            "deviation",
            format!("exact energy must be positive, got {e_exact}"),
        ));
    }
    let abs_dev = e_exact - e_bs;
    Ok(DeviationRecord {
        abs_dev,
        rel_dev: abs_dev.abs() / e_exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(m: f64) -> PotentialSpec<f64> {
        PotentialSpec::new(m).unwrap()
    }

    fn round4(x: f64) -> f64 {
        (x * 1e4).round() / 1e4
    }

    #[test]
    fn bse_examples() {
        assert!((bse_energy(&spec(2.0), 5.0).unwrap() - 11.0).abs() < 1e-12);
        assert_eq!(round4(bse_energy(&spec(1.0), 0.0).unwrap()), 1.1155);
        assert_eq!(round4(bse_energy(&spec(4.0), 100.0).unwrap()), 1020.9864);
        assert_eq!(round4(bse_energy(&spec(6.0), 0.0).unwrap()), 0.8008);
        assert!(bse_energy(&spec(4.0), -0.5).is_err());
    }

    #[test]
    fn square_well_examples() {
        use std::f64::consts::PI;
        let bs: f64 = square_well_energies(0, SquareWellLevel::Bs, 1.0);
        let ex: f64 = square_well_energies(0, SquareWellLevel::Exact, 1.0);
        assert!((bs - PI * PI / 16.0).abs() < 1e-15);
        assert!((ex - PI * PI / 4.0).abs() < 1e-15);
        for n in 0..50usize {
            let r: f64 = square_well_energies(n, SquareWellLevel::Exact, 1.0)
                / square_well_energies(n, SquareWellLevel::Bs, 1.0);
            let want = ((n as f64 + 1.0) / (n as f64 + 0.5)).powi(2);
            assert!((r - want).abs() < 1e-14 * want);
        }
    }

    #[test]
    fn modified_examples() {
        assert_eq!(round4(modified_bse_energy(&spec(4.0), 0, 0.0).unwrap()), 0.8671);
        assert!((modified_bse_energy(&spec(2.0), 7, 0.0).unwrap() - 15.0).abs() < 1e-12);
        // γ extracted from the converged quartic ground state
        let e = modified_bse_energy(&spec(4.0), 0, 0.081_422_36).unwrap();
        assert!((e - 1.060_362_1).abs() < 1e-7, "{e}");
        assert!(modified_bse_energy(&spec(4.0), 0, -0.5).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert!(gamma_from_energy(&spec(2.0), 3, 7.0).unwrap().abs() < 1e-13);
        let g6 = gamma_from_energy(&spec(6.0), 0, 1.144_802_453_797).unwrap();
        assert!((g6 - 0.134_497_8).abs() < 1e-7, "{g6}");
        // the parity-split sextic fit at N = 0
        assert!((g6 - 0.134_497_83 / 1.000_000_11f64.sqrt()).abs() < 1e-8);
        let g1 = gamma_from_energy(&spec(1.0), 0, 1.0188).unwrap();
        assert!((g1 - (-0.0636)).abs() < 1e-4, "{g1}");
        assert!(gamma_from_energy(&spec(1.0), 0, 0.0).is_err());
    }

    #[test]
    fn asymptotic_examples() {
        let c1 = asymptotic_coeffs(&spec(1.0));
        assert!((c1.c_m - 1.770_683).abs() < 5e-7);
        assert!((c1.a_bs - 1.0 / 3.0).abs() < 1e-15);
        let c2 = asymptotic_coeffs(&spec(2.0));
        assert!((c2.c_m - 2.0).abs() < 1e-13 && (c2.a_bs - 0.5).abs() < 1e-15);
        assert!((asymptotic_coeffs(&spec(4.0)).c_m - 2.185_069).abs() < 5e-7);
        assert!((asymptotic_coeffs(&spec(6.0)).c_m - 2.265_089).abs() < 5e-7);
    }

    #[test]
    fn subleading_coefficients_match_large_n_expansion() {
        for (m, want) in [(1.0, 0.590_227), (4.0, 1.456_713), (6.0, 1.698_817)] {
            let s = subleading_coefficient(&spec(m), 1e3).unwrap();
            assert!((s - want).abs() < 5e-6, "m={m}: {s}");
            // s = c_M a_bs / ... reduces to c_M / (2M)
            let sp = spec(m);
            let c = asymptotic_coeffs(&sp);
            assert!((s - c.c_m / (2.0 * sp.big_m())).abs() < 1e-7);
        }
    }

    #[test]
    fn deviation_examples() {
        let d = deviation(1.0604, 0.8671).unwrap();
        assert_eq!(format!("{:.1e}", d.abs_dev), "1.9e-1");
        assert_eq!(format!("{:.1e}", d.rel_dev), "1.8e-1");
        let z = deviation(3.0, 3.0).unwrap();
        assert_eq!((z.abs_dev, z.rel_dev), (0.0, 0.0));
        let d1 = deviation(1.0188, 1.1155).unwrap();
        assert_eq!(format!("{:.1e}", d1.abs_dev), "-9.7e-2");
        assert_eq!(format!("{:.1e}", d1.rel_dev), "9.5e-2");
        assert!(deviation(0.0, 1.0).is_err());
    }

    #[test]
    fn bse_strictly_increasing_in_real_n() {
        for m in [0.3, 1.0, 2.0, 4.0, 6.0, 40.0] {
            let s = spec(m);
            let mut prev = bse_energy(&s, 0.0).unwrap();
            for i in 1..=400 {
                let e = bse_energy(&s, i as f64 * 0.25).unwrap();
                assert!(e > prev, "m={m}");
                prev = e;
            }
        }
    }

    #[test]
    fn single_precision_instantiation() {
        let s = PotentialSpec::new(2.0f32).unwrap();
        assert!((bse_energy(&s, 5.0).unwrap() - 11.0).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn gamma_round_trip(gamma in -0.4f64..0.5, n in 0usize..=100, mi in 0usize..5) {
            let m = [1.0, 2.0, 4.0, 6.0, 40.0][mi];
            let s = spec(m);
            let e = modified_bse_energy(&s, n, gamma).unwrap();
            let back = gamma_from_energy(&s, n, e).unwrap();
            prop_assert!((back - gamma).abs() < 1e-12);
            let again = modified_bse_energy(&s, n, back).unwrap();
            prop_assert!(((again - e) / e).abs() < 1e-12);
        }

        #[test]
        fn action_quantization_is_consistent(n in 0usize..60, m in 0.3f64..30.0) {
            // E_BS solves the quantization condition with the closed-form action
            let s = spec(m);
            let e = bse_energy(&s, n as f64).unwrap();
            let action = crate::special_math::action_integral(&s, e).unwrap();
            let want = std::f64::consts::PI * (n as f64 + 0.5);
            prop_assert!(((action - want) / want).abs() < 1e-12);
        }
    }
}
