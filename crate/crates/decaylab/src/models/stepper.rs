//! Integrating-factor low-storage RK3.
//!
//! For û_t = -κ|ξ|²û + N̂(u, t) the diffusion factor is applied exactly and
//! the Williamson three-stage scheme advances the nonlinear part:
//!
//! ```text
//! q ← A_i E(δ_{i-1}) q + dt N(u, t + c_i dt)
//! u ← E(δ_i) (u + B_i q)
//! ```
//!
//! with E(τ) the diagonal multiplier e^{-κ|ξ|²τ} and δ_i the gaps between
//! consecutive stage times (all nonnegative, so only decaying exponentials
//! ever appear). With N ≡ 0 a step multiplies each mode by exactly
//! e^{-κ|ξ|²dt}.

use crate::error::Result;
use crate::spectral::{GridSpec, SpectralField};

/// Non-stiff right-hand side of every part at a given stage time.
pub(crate) type StageRhs<'a> = &'a mut dyn FnMut(&[SpectralField], f64) -> Result<Vec<SpectralField>>;

const A: [f64; 3] = [0.0, -5.0 / 9.0, -153.0 / 128.0];
const B: [f64; 3] = [1.0 / 3.0, 15.0 / 16.0, 8.0 / 15.0];
const C: [f64; 3] = [0.0, 1.0 / 3.0, 3.0 / 4.0];
// gaps between stage times (0, 1/3, 3/4) and the step end at 1
const D: [f64; 3] = [1.0 / 3.0, 5.0 / 12.0, 1.0 / 4.0];

/// Cached per-mode decay factors for one (dt, diffusivities) pair.
pub(crate) struct StepWorkspace {
    dt: f64,
    kappas: Vec<f64>,
    /// factors[part][stage][lattice] = e^{-κ_part |ξ|² D[stage] dt}
    factors: Vec<[Vec<f64>; 3]>,
}

impl StepWorkspace {
    pub fn new() -> Self {
        Self {
            dt: f64::NAN,
            kappas: Vec::new(),
            factors: Vec::new(),
        }
    }

    fn ensure(&mut self, grid: &GridSpec, kappas: &[f64], dt: f64) {
        if self.dt == dt && self.kappas == kappas && !self.factors.is_empty() {
            return;
        }
        self.dt = dt;
        self.kappas = kappas.to_vec();
        self.factors = kappas
            .iter()
            .map(|&kappa| {
                std::array::from_fn(|stage| {
                    (0..grid.lattice_len())
                        .map(|i| (-kappa * grid.wavenumber_sq_at(i) * D[stage] * dt).exp())
                        .collect()
                })
            })
            .collect();
    }
}

/// Advance all parts from t to t + dt. `rhs` returns the non-stiff term N̂ of
/// every part at the given stage time.
pub(crate) fn lsrk3_if_step(
    parts: &mut [SpectralField],
    kappas: &[f64],
    t: f64,
    dt: f64,
    ws: &mut StepWorkspace,
    rhs: StageRhs,
) -> Result<()> {
    debug_assert_eq!(parts.len(), kappas.len());
    let grid = *parts[0].grid();
    ws.ensure(&grid, kappas, dt);

    let mut q: Vec<SpectralField> = Vec::new();
    for stage in 0..3 {
        let n = rhs(parts, t + C[stage] * dt)?;
        if stage == 0 {
            q = n;
            for qp in q.iter_mut() {
                qp.scale(dt);
            }
        } else {
            for (p, qp) in q.iter_mut().enumerate() {
                qp.mul_pointwise(&ws.factors[p][stage - 1]);
                qp.scale(A[stage]);
                qp.add_scaled(dt, &n[p]);
            }
        }
        for (p, part) in parts.iter_mut().enumerate() {
            part.add_scaled(B[stage], &q[p]);
            part.mul_pointwise(&ws.factors[p][stage]);
        }
    }
    Ok(())
}
