//! Numerical laboratory for the semilinear polyharmonic heat equation
//!
//! ```text
//! ∂ₜu + (−Δ)^d u = f(u),   f(u) = ±|u|^{m−1} u e^{λu²}
//! ```
//!
//! on a periodic box standing in for ℝ^N. The crate evaluates the
//! polyharmonic heat kernel, applies the semigroup spectrally, computes
//! Luxemburg norms in `exp L²` and related Orlicz spaces, solves the Duhamel
//! integral equation by Picard iteration, and fits decay exponents.
//!
//! Modules are layered bottom-up:
//!
//! * [`specfun`], [`quadrature`]: Γ, ℬ and adaptive quadrature.
//! * [`grid`], [`spectral`]: periodic grids, sampled fields, Lebesgue norms, FFT plumbing.
//! * [`orlicz`]: Luxemburg norms, rearrangements, embedding inequalities, witness functions.
//! * [`kernel`]: radial kernel profile `E_d(1,·)` and its stretched-exponential majorant.
//! * [`semigroup`]: `e^{−t(−Δ)^d}` and the smoothing estimates.
//! * [`solver`]: nonlinearity, Picard/Duhamel solver, initial-data splitting.
//! * [`decay`]: exponent formulas, admissibility windows, log-log fits.

pub mod decay;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod orlicz;
pub mod quadrature;
pub mod semigroup;
pub mod solver;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{GridField, GridSpec};
