//! Cooperative scattering of scalar waves by `N` resonant point scatterers.
//!
//! All quantities are dimensionless: the wavenumber `k` and the single-scatterer
//! linewidth `γ` are fixed to one, so lengths are `k·x`, detunings and decay
//! rates are in units of `γ`, and cross sections are in units of the resonant
//! single-scatterer cross section `4π/k²`.
//!
//! The crate is `no_std` and only needs `alloc`. Enable `std` for
//! `std::error::Error` impls, `parallel` to run optimizer restarts and
//! Monte-Carlo samples on the rayon pool, and `serde` for serialization of the
//! public data types.
//!
//! Module map:
//! - [`scatter`]: Green matrix, Foldy-Lax solve, total/differential cross sections.
//! - [`resonance`]: eigen-decomposition of the Green matrix into scattering resonances.
//! - [`optimize`]: random-restart downhill simplex search over scatterer positions.
//! - [`stability`]: Monte-Carlo averages under random displacements.
//! - [`refdata`]: published reference configurations and the quadratic growth fit.

#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod error;
pub mod linalg;
mod math;
pub mod nelder_mead;
pub mod optimize;
mod par;
pub mod quadrature;
pub mod refdata;
pub mod resonance;
pub mod rng;
pub mod scatter;
pub mod stability;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use resonance::{decompose, min_decay_rate, Resonance, ResonanceSet};
pub use scatter::{
    build_green_matrix, total_cross_section, Configuration, GreenMatrix, IncidentWave,
    ScattererModel, Vec3,
};
