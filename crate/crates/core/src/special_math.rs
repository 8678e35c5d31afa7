//! Special functions and the classical action of `|x|^m`.

use crate::error::{domain, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::scalar::{lit, Real};

/// The problem definition `H = -d²/dx² + |x|^m` (with `hbar` kept for the
/// closed forms; all reference values use `hbar = 1`).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PotentialSpec<T> {
    m: T,
    hbar: T,
}

impl<T: Real> PotentialSpec<T> {
    pub fn new(m: T) -> Result<Self> {
        Self::with_hbar(m, T::one())
    }

    pub fn with_hbar(m: T, hbar: T) -> Result<Self> {
        if !(m > T::zero()) || !m.is_finite() {
            return Err(domain(
                "PotentialSpec",
                format!("exponent m must be positive and finite, got {m}"),
            ));
        }
        if !(hbar > T::zero()) || !hbar.is_finite() {
            return Err(domain("PotentialSpec", format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { m, hbar })
    }

    #[inline]
    pub fn m(&self) -> T {
        self.m
    }

    #[inline]
    pub fn hbar(&self) -> T {
        self.hbar
    }

    /// `M = 1/m + 1/2`, the exponent conjugate to `m` in the closed forms.
    #[inline]
    pub fn big_m(&self) -> T {
        self.m.recip() + lit(0.5)
    }

    /// `|x|^m`.
    #[inline]
    pub fn potential(&self, x: T) -> T {
        x.abs().powf(self.m)
    }

    /// Turning point `E^{1/m}` of a classical orbit at energy `e`.
    #[inline]
    pub fn turning_point(&self, e: T) -> T {
        e.powf(self.m.recip())
    }

    /// `hbar · M · B(1/2, M)`: the constant with `E_BS^M = K·(N + 1/2)`.
    pub fn quantization_constant(&self) -> T {
        let big_m = self.big_m();
        self.hbar * big_m * beta(lit(0.5), big_m).expect("M > 1/2")
    }
}

// Bernoulli-number coefficients B_{2k} / (2k (2k-1)) of the Stirling series.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

/// `ln Γ(x)` for `x > 0`.
///
/// Arguments below 15 are shifted upward with the recurrence
/// `Γ(x+1) = x Γ(x)`; the Stirling series is then truncated after the
/// `x^{-13}` term, which is below `f64` resolution there.
pub fn log_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(domain("log_gamma", format!("argument must be positive, got {x}")));
    }
    let shift_to: T = lit(15.0);
    let mut z = x;
    let mut prod = T::one();
    while z < shift_to {
        prod *= z;
        z += T::one();
    }
    let inv = z.recip();
    let inv2 = inv * inv;
    let mut series = T::zero();
    let mut pow = inv;
    for &c in STIRLING.iter() {
        series += lit::<T>(c) * pow;
        pow *= inv2;
    }
    let half_ln_two_pi = (T::PI() + T::PI()).ln() * lit(0.5);
    let stirling = (z - lit(0.5)) * z.ln() - z + half_ln_two_pi + series;
    Ok(stirling - prod.ln())
}

/// Euler Beta function `B(a, b) = Γ(a)Γ(b)/Γ(a+b)`.
pub fn beta<T: Real>(a: T, b: T) -> Result<T> {
    if !(a > T::zero()) || !(b > T::zero()) {
        return Err(domain("beta", format!("arguments must be positive, got ({a}, {b})")));
    }
    Ok((log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?).exp())
}

/// `∫ sqrt(E - |x|^m) dx` between the turning points `±E^{1/m}`, in closed form
/// `2 E^M (1/m) B(1/m, 3/2)`.
pub fn action_integral<T: Real>(spec: &PotentialSpec<T>, e: T) -> Result<T> {
    if !(e > T::zero()) {
        return Err(domain("action_integral", format!("energy must be positive, got {e}")));
    }
    let inv_m = spec.m().recip();
    Ok(lit::<T>(2.0) * e.powf(spec.big_m()) * inv_m * beta(inv_m, lit(1.5))?)
}

/// The same action by adaptive quadrature.
///
/// With `x = a(1 - t²)`, `a = E^{1/m}`, the integrand becomes
/// `2 a sqrt(E) t sqrt(1 - (1 - t²)^m)`, which is smooth at the turning point
/// (`t = 0`).
pub fn action_integral_quadrature<T: Real>(spec: &PotentialSpec<T>, e: T) -> Result<T> {
    if !(e > T::zero()) {
        return Err(domain("action_integral", format!("energy must be positive, got {e}")));
    }
    let m = spec.m();
    let a = spec.turning_point(e);
    let integrand = |t: T| {
        // 1 - (1 - t²)^m without cancellation for small t.
        let gap = -(m * (-t * t).ln_1p()).exp_m1();
        lit::<T>(2.0) * t * gap.max(T::zero()).sqrt()
    };
    let r = integrate(integrand, T::zero(), T::one(), QuadOptions::rel(lit(1e-14)))?;
    Ok(lit::<T>(2.0) * a * e.sqrt() * r.value)
}

/// `M·B(1/2, M) − π m / (2 B(1/m, 3/2))`.
///
/// Vanishes identically; it is the identity that turns the quantization
/// condition with the closed-form action into the explicit Bohr–Sommerfeld
/// energies.
pub fn action_beta_identity_residual<T: Real>(m: T) -> Result<T> {
    if !(m > T::zero()) {
        return Err(domain(
            "action_beta_identity_residual",
            format!("m must be positive, got {m}"),
        ));
    }
    let big_m = m.recip() + lit(0.5);
    let lhs = big_m * beta(lit(0.5), big_m)?;
    let rhs = T::PI() * m / (lit::<T>(2.0) * beta(m.recip(), lit(1.5))?);
    Ok(lhs - rhs)
}
