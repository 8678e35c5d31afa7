//! Spectra of `H = -d²/dx² + |x|^m`: Bohr–Sommerfeld energies, exact
//! energies from two independent grid engines, the exact-WKB correction γ
//! that reconciles them, closed-form fits of γ and of the spectrum, and
//! variational trial functions for the quartic and sextic cases.
//!
//! The kernels are generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which every accuracy target
//! assumes. The report layer and the CLI run in `f64` only.
//!
//! ```
//! use exactwkb::{bohr_sommerfeld::bse_energy, PotentialSpecF64};
//!
//! let quartic = PotentialSpecF64::new(4.0).unwrap();
//! let e0 = bse_energy(&quartic, 0.0).unwrap();
//! assert!((e0 - 0.8671).abs() < 1e-4);
//! ```

// `!(x > 0)` is the NaN-rejecting form used for every domain check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bohr_sommerfeld;
pub mod error;
pub mod fitting;
pub mod linalg;
pub mod optimize;
pub mod quadrature;
pub mod reports;
pub mod scalar;
pub mod special_math;
pub mod spectral;
pub mod variational;

pub use error::{Error, Result};

pub type PotentialSpecF64 = special_math::PotentialSpec<f64>;
pub type EnergyRecordF64 = bohr_sommerfeld::EnergyRecord<f64>;
pub type GammaRecordF64 = bohr_sommerfeld::GammaRecord<f64>;
pub type SpectralConfigF64 = spectral::SpectralConfig<f64>;
pub type SpectrumResultF64 = spectral::SpectrumResult<f64>;
pub type PolyRootModelF64 = fitting::PolyRootModel<f64>;
pub type RationalSqrtModelF64 = fitting::RationalSqrtModel<f64>;
pub type TrialParamsF64 = variational::TrialParams<f64>;

pub type PotentialSpecF32 = special_math::PotentialSpec<f32>;
