//! Time integration of the example systems — advection–diffusion and 2D
//! incompressible MHD — with in-run measurement of every hypothesis quantity.
//!
//! The stiff diffusion term is integrated exactly by per-mode multipliers
//! e^{-κ|ξ|²δ}; the nonlinearity and forcing ride on an explicit third-order
//! low-storage Runge–Kutta (see `stepper`). Pseudo-spectral products are
//! dealiased according to the flux degree, which keeps the transport energy
//! pairings ⟨u, G(u)⟩ exact to rounding on the retained band.

mod adv_diff;
mod forcing;
mod mhd;
mod run;
mod stepper;

pub use adv_diff::{nonlinear_term_adv_diff, AdvDiff};
pub use forcing::{make_forcing, ForcingSpec};
pub use mhd::{nonlinear_term_mhd, Mhd};
pub use run::{run_adv_diff, run_mhd};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::GridSpec;

/// Per-axis polynomial coefficients of the advecting flux b_ℓ(u), ascending
/// powers, degree ≤ 4.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxCoeffs(Vec<Vec<f64>>);

impl FluxCoeffs {
    pub const MAX_DEGREE: usize = 4;

    pub fn new(per_axis: Vec<Vec<f64>>) -> Result<Self> {
        if per_axis.is_empty() || per_axis.len() > 2 {
            return Err(Error::InvalidConfig(format!(
                "flux needs 1 or 2 axes, got {}",
                per_axis.len()
            )));
        }
        let flux = Self(per_axis);
        if flux.degree() > Self::MAX_DEGREE {
            return Err(Error::FluxDegreeOverflow(flux.degree()));
        }
        Ok(flux)
    }

    /// Burgers flux b(u) = (u, 0).
    pub fn burgers() -> Self {
        Self(vec![vec![0.0, 1.0], vec![]])
    }

    /// Constant advection velocity b(u) = c.
    pub fn constant(c: [f64; 2]) -> Self {
        Self(vec![vec![c[0]], vec![c[1]]])
    }

    /// Highest power of u with a nonzero coefficient on any axis.
    pub fn degree(&self) -> usize {
        self.0
            .iter()
            .filter_map(|coeffs| coeffs.iter().rposition(|&c| c != 0.0))
            .max()
            .unwrap_or(0)
    }

    pub fn axes(&self) -> usize {
        self.0.len()
    }

    /// Horner evaluation of b_axis at the value v.
    #[inline]
    pub fn eval_axis(&self, axis: usize, v: f64) -> f64 {
        self.0[axis].iter().rev().fold(0.0, |acc, &c| acc * v + c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|a| a.iter().all(|&c| c == 0.0))
    }
}

/// Retained fraction of the Nyquist band that keeps polynomial products of
/// the given flux degree alias-free; 2/3 covers quadratic products.
pub fn required_dealias_fraction(degree: usize) -> f64 {
    if degree <= 2 {
        GridSpec::DEFAULT_DEALIAS
    } else {
        2.0 / (degree as f64 + 2.0)
    }
}

/// Step-size policy: fixed cap, optionally tightened by the advective CFL
/// limit 0.5·Δx/max|b(u)| at the start of each sample interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtPolicy {
    pub max_dt: f64,
    pub cfl_limited: bool,
}

impl DtPolicy {
    pub fn fixed(dt: f64) -> Self {
        Self {
            max_dt: dt,
            cfl_limited: false,
        }
    }

    pub fn cfl(max_dt: f64) -> Self {
        Self {
            max_dt,
            cfl_limited: true,
        }
    }
}

pub const CFL_SAFETY: f64 = 0.5;

/// Fraction of the box horizon considered trustworthy for algebraic decay:
/// t_box = 0.1 (L/2π)²/ν. Beyond it the lowest lattice mode's exponential
/// decay contaminates fitted slopes, so runs warn when t_end exceeds it.
pub fn box_horizon(box_length: f64, nu: f64) -> f64 {
    let l0 = box_length / std::f64::consts::TAU;
    0.1 * l0 * l0 / nu
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvDiffConfig {
    pub nu: f64,
    pub flux_coeffs: FluxCoeffs,
    pub grid: GridSpec,
    pub dt: DtPolicy,
    pub t_end: f64,
    pub sample_times: Vec<f64>,
    /// Highest seminorm order measured; g_m is recorded for m < m_hat.
    pub m_hat: u32,
}

impl AdvDiffConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "nu must be positive, got {}",
                self.nu
            )));
        }
        validate_schedule(&self.dt, self.t_end, &self.sample_times)?;
        let required = required_dealias_fraction(self.flux_coeffs.degree());
        if self.grid.dealias_fraction() > required + 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "flux degree {} needs dealias_fraction <= {:.4}, grid retains {:.4}",
                self.flux_coeffs.degree(),
                required,
                self.grid.dealias_fraction()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MhdConfig {
    /// Fluid viscosity μ.
    pub mu: f64,
    /// Magnetic diffusivity ν.
    pub nu: f64,
    pub grid: GridSpec,
    pub dt: DtPolicy,
    pub t_end: f64,
    pub sample_times: Vec<f64>,
    pub m_hat: u32,
}

impl MhdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.nu > 0.0) {
            return Err(Error::InvalidConfig(
                "mu and nu must both be positive".into(),
            ));
        }
        if self.grid.dim() != 2 {
            return Err(Error::InvalidConfig(
                "the MHD model is restricted to n = 2".into(),
            ));
        }
        validate_schedule(&self.dt, self.t_end, &self.sample_times)
    }
}

fn validate_schedule(dt: &DtPolicy, t_end: f64, sample_times: &[f64]) -> Result<()> {
    if !(dt.max_dt > 0.0) {
        return Err(Error::InvalidConfig("dt.max_dt must be positive".into()));
    }
    if !(t_end > 0.0) {
        return Err(Error::InvalidConfig("t_end must be positive".into()));
    }
    if sample_times.is_empty() {
        return Err(Error::InvalidConfig("sample_times must be nonempty".into()));
    }
    if sample_times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidConfig(
            "sample_times must be strictly increasing".into(),
        ));
    }
    if sample_times[0] < 0.0 || *sample_times.last().unwrap() > t_end + 1e-12 {
        return Err(Error::InvalidConfig(
            "sample_times must lie within [0, t_end]".into(),
        ));
    }
    Ok(())
}

/// One measured instant of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub t: f64,
    /// ‖Dᵐu‖ for m = 0..=m̂.
    pub u_norms: Vec<f64>,
    /// ‖Dᵐb‖ for MHD runs.
    pub b_norms: Option<Vec<f64>>,
    /// g_m(t) = |Σ ⟨Dᵐ·, Dᵐ G⟩| / ‖D^{m+1}·‖² for m = 0..m̂-1; `None` marks a
    /// flagged sample (zero denominator), excluded from trend statistics.
    pub g_ratios: Vec<Option<f64>>,
    /// |⟨state, G⟩| normalized by ‖state‖·‖G‖ — the m = 0 cancellation.
    pub energy_orthogonality: f64,
    /// Largest per-step energy-balance residual since the previous sample,
    /// relative to the current energy.
    pub energy_residual: f64,
    /// max|ξ·û|/(|ξ||û|) for MHD runs.
    pub leray_residual: Option<f64>,
    /// ‖Dᵐf(t)‖ for m = 0..=m̂ when forcing is active.
    pub forcing_norms: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RunStatus {
    Ok,
    Aborted { reason: String },
}

/// Timing metadata, kept out of the deterministic record.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub wall_seconds: f64,
    pub steps: u64,
}

/// Complete measured output of one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub model: String,
    pub m_hat: u32,
    pub samples: Vec<SampleRow>,
    pub warnings: Vec<String>,
    #[serde(flatten)]
    pub status: RunStatus,
    /// Echo of the configuration that produced this record.
    pub config: serde_json::Value,
    #[serde(skip)]
    pub meta: RunMeta,
}

impl RunRecord {
    pub fn is_ok(&self) -> bool {
        matches!(self.status, RunStatus::Ok)
    }

    /// (t, ‖Dᵐu‖) pairs for one order.
    pub fn u_norm_series(&self, m: u32) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .map(|s| (s.t, s.u_norms[m as usize]))
            .collect()
    }

    pub fn b_norm_series(&self, m: u32) -> Option<Vec<(f64, f64)>> {
        if self.samples.iter().any(|s| s.b_norms.is_none()) {
            return None;
        }
        Some(
            self.samples
                .iter()
                .map(|s| (s.t, s.b_norms.as_ref().unwrap()[m as usize]))
                .collect(),
        )
    }

    /// (t, g_m(t)) pairs, flagged samples skipped.
    pub fn g_ratio_series(&self, m: u32) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .filter_map(|s| s.g_ratios[m as usize].map(|g| (s.t, g)))
            .collect()
    }

    /// (t, ‖Dᵐf‖) pairs when forcing was recorded.
    pub fn forcing_norm_series(&self, m: u32) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .filter_map(|s| s.forcing_norms.as_ref().map(|f| (s.t, f[m as usize])))
            .collect()
    }
}
