//! Pseudo-spectral laboratory for decay rates of dissipative parabolic PDEs.
//!
//! The crate simulates advection–diffusion and 2D incompressible MHD on a
//! periodic box, evolves the linear diffusion semigroup as a box-artifact-free
//! reference, and fits power-law decay exponents of homogeneous Sobolev
//! seminorms ‖Dᵐu(t)‖_{L²} against the rates predicted by the decay character
//! of the initial data.
//!
//! Module map:
//! - [`spectral`]: periodic-box Fourier fields, differentiation, dealiasing,
//!   seminorms, and the snapshot format. One normalization constant rules all
//!   norms, see [`spectral::GridSpec::parseval_weight`].
//! - [`initial_data`]: synthesis of initial data with a prescribed decay
//!   character r* and estimation of r* from spectral shell masses.
//! - [`heat_oracle`]: radial-quadrature evolution of ‖Dᵐ e^{νt∆}u₀‖²_{L²},
//!   exact in rate, used as the reference for every exponent check.
//! - [`models`]: time integration (integrating-factor RK3) of the nonlinear
//!   systems with in-run measurement of norms, energy balance, and the
//!   nonlinearity/dissipation ratios g_m(t).
//! - [`analysis`]: log-log exponent fits, fit windows, hypothesis ledger
//!   (H1–H4), theorem checks (upper/lower/reverse), and the z_m monotonicity
//!   detector.

pub mod analysis;
pub mod error;
pub mod heat_oracle;
pub mod initial_data;
pub mod models;
pub mod spectral;

pub use error::{Error, Result};
