//! Estimation of small time and frequency separations between incoherent
//! pulsed sources via mode-selective photon measurement.
//!
//! The crate models three measurement chains on the same Gaussian source
//! mixture and compares their precision against the relevant Cramér-Rao
//! bounds:
//!
//! * direct spectral (or temporal) intensity detection, which suffers a
//!   diverging bound as the separation shrinks below the source width,
//! * ideal projections onto low-order Hermite-Gauss modes, which keep the
//!   quantum-limited variance `4σ²/N` at every separation,
//! * a realistic quantum pulse gate, where a shaped pump upconverts the
//!   signal inside a waveguide with finite phasematching bandwidth, leaving
//!   a small leakage floor between the projection channels.
//!
//! Modules follow that structure: [`modes`] holds the mode functions and
//! ideal projection probabilities, [`fisher`] the information bounds,
//! [`pulsegate`] the upconversion physics and ratio estimators,
//! [`tomography`] the calibration and maximum-likelihood estimation, and
//! [`montecarlo`] the seeded photon-counting experiment harness.
//!
//! Frequencies and times are expected in reciprocal unit pairs (THz with
//! ps); the core math is otherwise unit-agnostic and most routines are
//! happiest with widths normalized to σ = 1.

pub mod error;
pub mod fisher;
pub mod modes;
pub mod montecarlo;
mod optimize;
pub mod pulsegate;
pub(crate) mod quadrature;
pub mod tomography;

pub use error::{CoreError, Result};
