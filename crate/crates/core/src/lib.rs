//! Tunneling-mediated matter channels between bound bodies.
//!
//! A constituent that has to borrow a binding energy `E_b` to leave its body
//! crosses the gap `d` evanescently, so every coherent amplitude connecting
//! two bodies carries a factor `exp(-d/ℓ)` with `ℓ = ħ/√(2 m E_b)`. The
//! modules here compute that suppression from several independent angles:
//!
//! - [`physical_scales`]: closed-form κ, ℓ, shifted mass and decay rate.
//! - [`wkb`]: WKB action over arbitrary 1D barrier profiles.
//! - [`schrodinger`]: finite-difference spectra, double-well splittings and
//!   transfer-matrix scattering.
//! - [`correlator`]: the static shifted-pole propagator and its quadrature oracle.
//! - [`entanglement`]: hopping-only dynamics that create and relocate entanglement.
//! - [`harness`]: configuration, sweeps, exponential fits and report files.
//!
//! Amplitudes that cross module boundaries are natural logarithms.

pub mod correlator;
pub mod entanglement;
pub mod error;
pub mod harness;
pub mod physical_scales;
pub mod quadrature;
pub mod schrodinger;
pub mod wkb;

pub use error::{Error, Result};
pub use physical_scales::{PhysicalConstants, ScaleParams, CONSTANTS};
