//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Every panel is integrated with the 15-point Kronrod rule; the embedded
//! 7-point Gauss–Legendre rule supplies the error estimate. The panel with the
//! largest estimate is bisected until the summed estimate meets the requested
//! tolerance.

// nodes and weights are kept at their published length
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and subdivision budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_panels: usize,
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::zero(),
            rel_tol: lit(1e-13),
            max_panels: 2000,
        }
    }
}

impl<T: Real> QuadOptions<T> {
    pub fn rel(rel_tol: T) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_err: T,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    err: T,
}

fn kronrod_panel<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Panel<T> {
    let half = (b - a) * lit(0.5);
    let center = (a + b) * lit(0.5);
    let fc = f(center);
    let mut kronrod = fc * lit(WGK[7]);
    let mut gauss = fc * lit(WG[3]);
    for (j, (&x, &w)) in XGK[..7].iter().zip(WGK[..7].iter()).enumerate() {
        let dx = half * lit(x);
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * lit(w);
        if j % 2 == 1 {
            gauss += pair * lit(WG[j / 2]);
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    Panel { a, b, value, err }
}

/// Integrates `f` over `[a, b]`.
///
/// Fails with [`Error::NotConverged`] when the panel budget is exhausted; the
/// payload carries the best estimate and its error bound.
pub fn integrate<T, F>(mut f: F, a: T, b: T, opts: QuadOptions<T>) -> Result<QuadResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if a == b {
        return Ok(QuadResult {
            value: T::zero(),
            abs_err: T::zero(),
            panels: 0,
        });
    }
    let mut panels = vec![kronrod_panel(&mut f, a, b)];
    let eps = T::epsilon();
    loop {
        let total: T = panels.iter().map(|p| p.value).sum();
        let err: T = panels.iter().map(|p| p.err).sum();
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        // Roundoff floor: panels cannot be resolved below a few ulps of their
        // own magnitude.
        let floor: T = panels.iter().map(|p| p.value.abs() * eps * lit(50.0)).sum();
        if err <= target || err <= floor {
            return Ok(QuadResult {
                value: total,
                abs_err: err,
                panels: panels.len(),
            });
        }
        if panels.len() >= opts.max_panels {
            return Err(Error::NotConverged {
                what: "adaptive quadrature".into(),
                best: to_f64(total),
                bound: to_f64(err),
            });
        }
        let (worst, _) =
            panels.iter().enumerate().fold(
                (0, T::neg_infinity()),
                |acc, (i, p)| {
                    if p.err > acc.1 {
                        (i, p.err)
                    } else {
                        acc
                    }
                },
            );
        let p = panels.swap_remove(worst);
        let mid = (p.a + p.b) * lit(0.5);
        if mid <= p.a || mid >= p.b {
            // Panel narrower than the scalar resolution; keep it as is.
            panels.push(Panel { err: T::zero(), ..p });
            continue;
        }
        panels.push(kronrod_panel(&mut f, p.a, mid));
        panels.push(kronrod_panel(&mut f, mid, p.b));
    }
}

/// Integrates over consecutive intervals `[breaks[i], breaks[i+1]]`, sharing
/// the relative tolerance across the pieces.
pub fn integrate_pieces<T, F>(mut f: F, breaks: &[T], opts: QuadOptions<T>) -> Result<QuadResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let mut out = QuadResult {
        value: T::zero(),
        abs_err: T::zero(),
        panels: 0,
    };
    for w in breaks.windows(2) {
        let r = integrate(&mut f, w[0], w[1], opts)?;
        out.value += r.value;
        out.abs_err += r.abs_err;
        out.panels += r.panels;
    }
    Ok(out)
}
