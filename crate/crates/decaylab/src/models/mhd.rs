//! 2D incompressible MHD with pressure eliminated by Leray projection:
//!
//! ```text
//! u_t + (u·∇)u + ∇p = μ∆u + (b·∇)b,    ∇·u = 0,
//! b_t + (u·∇)b      = ν∆b + (b·∇)u,    ∇·b = 0.
//! ```

use crate::error::{Error, Result};
use crate::initial_data::leray_project;
use crate::spectral::{forward_transform, inverse_transform, PhysicalField, SpectralField};

use super::stepper::{lsrk3_if_step, StepWorkspace};
use super::MhdConfig;

const SOLENOIDAL_TOL: f64 = 1e-8;

/// The coupled nonlinearity written as the pair (f, g):
///
/// ```text
/// f = P[(u·∇)u - (b·∇)b]      (P = Leray projection, absorbs ∇p)
/// g = (u·∇)b - (b·∇)u          (mean-free)
/// ```
///
/// Inputs must be divergence-free 2-vectors; the quadratic products are
/// alias-free on the retained 2/3 band, which makes the total-energy
/// cancellation ⟨u, f⟩ + ⟨b, g⟩ = 0 hold to rounding.
pub fn nonlinear_term_mhd(
    u: &SpectralField,
    b: &SpectralField,
) -> Result<(SpectralField, SpectralField)> {
    let grid = *u.grid();
    if grid.dim() != 2 {
        return Err(Error::InvalidConfig("MHD nonlinearity needs n = 2".into()));
    }
    if b.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    for field in [u, b] {
        let residual = field.divergence_residual().ok_or(Error::NotVectorField {
            expected: 2,
            got: field.num_components(),
        })?;
        if residual > SOLENOIDAL_TOL {
            return Err(Error::NotSolenoidal(residual));
        }
    }

    let u_phys = inverse_transform(u);
    let b_phys = inverse_transform(b);
    // ∂_axis of component j, for both fields
    let mut du = Vec::with_capacity(4);
    let mut db = Vec::with_capacity(4);
    for axis in 0..2 {
        du.push(inverse_transform(&u.derivative(axis)?));
        db.push(inverse_transform(&b.derivative(axis)?));
    }

    let len = grid.lattice_len();
    let mut f_phys = vec![vec![0.0; len]; 2];
    let mut g_phys = vec![vec![0.0; len]; 2];
    for j in 0..2 {
        for i in 0..len {
            let (u1, u2) = (u_phys.component(0)[i], u_phys.component(1)[i]);
            let (b1, b2) = (b_phys.component(0)[i], b_phys.component(1)[i]);
            let du_j = (du[0].component(j)[i], du[1].component(j)[i]);
            let db_j = (db[0].component(j)[i], db[1].component(j)[i]);
            f_phys[j][i] = u1 * du_j.0 + u2 * du_j.1 - (b1 * db_j.0 + b2 * db_j.1);
            g_phys[j][i] = u1 * db_j.0 + u2 * db_j.1 - (b1 * du_j.0 + b2 * du_j.1);
        }
    }

    let f = leray_project(&forward_transform(&PhysicalField::new(grid, f_phys)?).dealias())?;
    let mut g = forward_transform(&PhysicalField::new(grid, g_phys)?).dealias();
    for c in 0..2 {
        g.component_mut(c)[0] = num_complex::Complex64::ZERO;
    }
    Ok((f, g))
}

/// MHD state (u, b) with its stepper workspace.
pub struct Mhd {
    config: MhdConfig,
    /// parts[0] = u, parts[1] = b.
    parts: Vec<SpectralField>,
    ws: StepWorkspace,
}

impl Mhd {
    pub fn new(config: MhdConfig, initial_u: &SpectralField, initial_b: &SpectralField) -> Result<Self> {
        config.validate()?;
        for field in [initial_u, initial_b] {
            if field.grid() != &config.grid {
                return Err(Error::GridMismatch);
            }
            let residual = field.divergence_residual().ok_or(Error::NotVectorField {
                expected: 2,
                got: field.num_components(),
            })?;
            if residual > SOLENOIDAL_TOL {
                return Err(Error::NotSolenoidal(residual));
            }
        }
        Ok(Self {
            config,
            parts: vec![initial_u.dealias(), initial_b.dealias()],
            ws: StepWorkspace::new(),
        })
    }

    pub fn config(&self) -> &MhdConfig {
        &self.config
    }

    pub fn velocity(&self) -> &SpectralField {
        &self.parts[0]
    }

    pub fn magnetic(&self) -> &SpectralField {
        &self.parts[1]
    }

    pub fn nonlinear_term(&self) -> Result<(SpectralField, SpectralField)> {
        nonlinear_term_mhd(self.velocity(), self.magnetic())
    }

    /// Measured H2 ratio of the coupled system,
    /// g_m = |Σ ⟨Dᵐu, Dᵐf⟩ + ⟨Dᵐb, Dᵐg⟩| / ‖D^{m+1}(u, b)‖²; `None` flags a
    /// zero denominator.
    pub fn h2_ratio(&self, m: u32) -> Result<Option<f64>> {
        let (f, g) = self.nonlinear_term()?;
        let num = (self.velocity().weighted_inner_product(&f, m)?
            + self.magnetic().weighted_inner_product(&g, m)?)
        .abs();
        let den = self.velocity().sobolev_seminorm(m + 1).powi(2)
            + self.magnetic().sobolev_seminorm(m + 1).powi(2);
        Ok((den > 0.0).then(|| num / den))
    }

    /// One integrating-factor RK3 step from t to t + dt.
    pub fn step(&mut self, t: f64, dt: f64) -> Result<()> {
        let Self { config, parts, ws } = self;
        lsrk3_if_step(
            parts,
            &[config.mu, config.nu],
            t,
            dt,
            ws,
            &mut |p, _ts| {
                let (mut f, mut g) = nonlinear_term_mhd(&p[0], &p[1])?;
                f.scale(-1.0);
                g.scale(-1.0);
                Ok(vec![f, g])
            },
        )
    }

    /// Max pointwise |u| or |b| component for the CFL limit.
    pub fn max_speed(&self) -> f64 {
        let mut speed = 0.0f64;
        for part in &self.parts {
            speed = speed.max(inverse_transform(part).max_abs());
        }
        speed
    }

    /// Worst per-mode divergence residual of u and b.
    pub fn leray_residual(&self) -> f64 {
        self.parts
            .iter()
            .filter_map(|p| p.divergence_residual())
            .fold(0.0, f64::max)
    }
}
