//! Periodic-box Fourier representation and homogeneous Sobolev seminorms.
//!
//! Every field lives on a square periodic box [0, L)ⁿ, n ∈ {1, 2}, sampled at
//! N points per axis. Spectral coefficients follow the continuum-integral
//! convention
//!
//! ```text
//! û(ξ) = (L/N)ⁿ Σ_x u(x) e^{-iξ·x},      ξ = k·(2π/L), k ∈ [-N/2, N/2)ⁿ,
//! ```
//!
//! under which a single Parseval constant w = L⁻ⁿ relates all norms:
//!
//! ```text
//! ‖u‖²_{L²(box)} = (L/N)ⁿ Σ_x |u(x)|² = w Σ_ξ |û(ξ)|².
//! ```
//!
//! The same constant is exposed as [`GridSpec::parseval_weight`] and every
//! norm, inner product, and shell integral in the crate routes through it.
//! With this convention û(ξ) also approximates the Fourier transform on ℝⁿ,
//! so spectral densities compare directly against continuum formulas with the
//! usual (2π)⁻ⁿ Plancherel factor.

mod field;
mod grid;
mod snapshot;
mod transform;

pub use field::{PhysicalField, SpectralField};
pub use grid::GridSpec;
pub use snapshot::{read_snapshot, write_snapshot, SNAPSHOT_VERSION};
pub use transform::{forward_transform, inverse_transform};

#[cfg(test)]
mod tests;
