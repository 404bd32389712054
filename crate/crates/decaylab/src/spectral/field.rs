use num_complex::Complex64;

use crate::error::{Error, Result};

use super::grid::GridSpec;

/// Real-valued field on the collocation lattice, one value array per component.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: GridSpec,
    components: Vec<Vec<f64>>,
}

impl PhysicalField {
    pub fn new(grid: GridSpec, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::DimensionMismatch("field needs >= 1 component".into()));
        }
        for c in &components {
            if c.len() != grid.lattice_len() {
                return Err(Error::DimensionMismatch(format!(
                    "component holds {} values, grid has {} lattice points",
                    c.len(),
                    grid.lattice_len()
                )));
            }
        }
        Ok(Self { grid, components })
    }

    pub fn zeros(grid: GridSpec, components: usize) -> Self {
        Self {
            grid,
            components: vec![vec![0.0; grid.lattice_len()]; components],
        }
    }

    /// Sample a function of the collocation point, one closure per call per component.
    pub fn from_fn(grid: GridSpec, components: usize, mut f: impl FnMut(usize, [f64; 2]) -> f64) -> Self {
        let data = (0..components)
            .map(|c| (0..grid.lattice_len()).map(|i| f(c, grid.position_at(i))).collect())
            .collect();
        Self { grid, components: data }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.components[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.components[c]
    }

    /// Collocation-quadrature L² norm, ((L/N)ⁿ Σ_x |u(x)|²)^{1/2}.
    ///
    /// This is the physical-side half of the Parseval contract; the spectral
    /// side is [`SpectralField::sobolev_seminorm`] with m = 0.
    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.collocation_weight();
        let sum: f64 = self
            .components
            .iter()
            .map(|c| c.iter().map(|v| v * v).sum::<f64>())
            .sum();
        (w * sum).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Complex Fourier coefficients of a real field over the wavenumber lattice.
///
/// Hermitian symmetry û(-ξ) = conj(û(ξ)) is an invariant of every constructor
/// and operation in the crate; [`Self::hermitian_residual`] measures it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    components: Vec<Vec<Complex64>>,
}

impl SpectralField {
    pub fn new(grid: GridSpec, components: Vec<Vec<Complex64>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::DimensionMismatch("field needs >= 1 component".into()));
        }
        for c in &components {
            if c.len() != grid.lattice_len() {
                return Err(Error::DimensionMismatch(format!(
                    "component holds {} coefficients, grid has {} lattice points",
                    c.len(),
                    grid.lattice_len()
                )));
            }
        }
        Ok(Self { grid, components })
    }

    pub fn zeros(grid: GridSpec, components: usize) -> Self {
        Self {
            grid,
            components: vec![vec![Complex64::ZERO; grid.lattice_len()]; components],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.components[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.components[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.components
    }

    /// Spectral derivative along `axis`: coefficient at ξ multiplied by iξ_axis.
    ///
    /// The Nyquist mode on that axis is zeroed so the result stays the
    /// transform of a real field.
    pub fn derivative(&self, axis: usize) -> Result<Self> {
        let dim = self.grid.dim();
        if axis >= dim {
            return Err(Error::AxisOutOfRange { axis, dim });
        }
        let n = self.grid.points_per_axis() as i64;
        let dk = self.grid.wavenumber_step();
        let mut out = self.clone();
        for comp in &mut out.components {
            for (i, v) in comp.iter_mut().enumerate() {
                let k = self.grid.modes_at(i)[axis];
                if k == -n / 2 {
                    *v = Complex64::ZERO;
                } else {
                    *v *= Complex64::new(0.0, k as f64 * dk);
                }
            }
        }
        Ok(out)
    }

    /// Zero every coefficient with |k_axis| beyond the retained band on any axis.
    /// Idempotent.
    pub fn dealias(&self) -> Self {
        let kmax = self.grid.dealias_kmax();
        let mut out = self.clone();
        for comp in &mut out.components {
            for (i, v) in comp.iter_mut().enumerate() {
                let k = self.grid.modes_at(i);
                if k[0].abs() > kmax || k[1].abs() > kmax {
                    *v = Complex64::ZERO;
                }
            }
        }
        out
    }

    /// Homogeneous Sobolev seminorm ‖Dᵐu‖_{L²} = (w Σ_ξ |ξ|^{2m} |û(ξ)|²)^{1/2}.
    ///
    /// The sum over derivative tuples Σ ξ_{ℓ₁}²⋯ξ_{ℓ_m}² collapses to |ξ|^{2m}
    /// by the multinomial identity; m = 0 gives the L² norm.
    pub fn sobolev_seminorm(&self, m: u32) -> f64 {
        (self.grid.parseval_weight() * self.weighted_energy(m)).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_seminorm(0)
    }

    /// Σ_ξ |ξ|^{2m} |û(ξ)|² over all components, without the Parseval weight.
    pub(crate) fn weighted_energy(&self, m: u32) -> f64 {
        let mut sum = 0.0;
        for comp in &self.components {
            for (i, v) in comp.iter().enumerate() {
                let xi_sq = self.grid.wavenumber_sq_at(i);
                sum += xi_sq.powi(m as i32) * v.norm_sqr();
            }
        }
        sum
    }

    /// Real L² inner product ∫ a·b dx = w Σ_ξ Re(conj(â)·b̂).
    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid || self.num_components() != other.num_components() {
            return Err(Error::GridMismatch);
        }
        let mut sum = 0.0;
        for (a, b) in self.components.iter().zip(&other.components) {
            for (x, y) in a.iter().zip(b) {
                sum += x.re * y.re + x.im * y.im; // Re(conj(x)·y)
            }
        }
        Ok(self.grid.parseval_weight() * sum)
    }

    /// |ξ|^{2m}-weighted pairing w Σ_ξ |ξ|^{2m} Re(conj(â)·b̂): the collapsed
    /// sum over all order-m derivative tuples ⟨D_{ℓ₁}⋯D_{ℓ_m}a, D_{ℓ₁}⋯D_{ℓ_m}b⟩.
    pub fn weighted_inner_product(&self, other: &Self, m: u32) -> Result<f64> {
        if self.grid != other.grid || self.num_components() != other.num_components() {
            return Err(Error::GridMismatch);
        }
        let mut sum = 0.0;
        for (a, b) in self.components.iter().zip(&other.components) {
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                let xi_sq = self.grid.wavenumber_sq_at(i);
                sum += xi_sq.powi(m as i32) * (x.re * y.re + x.im * y.im);
            }
        }
        Ok(self.grid.parseval_weight() * sum)
    }

    /// Max |û(-ξ) - conj(û(ξ))| over the lattice; zero for a real field.
    pub fn hermitian_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for comp in &self.components {
            for (i, v) in comp.iter().enumerate() {
                let m = self.grid.mirror_index(i);
                worst = worst.max((comp[m] - v.conj()).norm());
            }
        }
        worst
    }

    /// Max_ξ |ξ·û(ξ)| / (|ξ||û(ξ)|) over the lattice; `None` for scalar
    /// fields. The denominator amplitude is floored at 1e-3 of the peak:
    /// a mode the projection nearly annihilated holds only rounding noise,
    /// and its raw ratio would measure the conditioning of that noise rather
    /// than any energy-bearing divergence.
    pub fn divergence_residual(&self) -> Option<f64> {
        let dim = self.grid.dim();
        if self.num_components() != dim || dim < 2 {
            return None;
        }
        let peak = self
            .components
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.norm()));
        if peak == 0.0 {
            return Some(0.0);
        }
        let floor = 1e-3 * peak;
        let mut worst = 0.0f64;
        for i in 0..self.grid.lattice_len() {
            let xi = self.grid.wavenumber_at(i);
            let xi_len = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            if xi_len == 0.0 {
                continue;
            }
            let u0 = self.components[0][i];
            let u1 = self.components[1][i];
            let amp = (u0.norm_sqr() + u1.norm_sqr()).sqrt().max(floor);
            let div = u0 * xi[0] + u1 * xi[1];
            worst = worst.max(div.norm() / (xi_len * amp));
        }
        Some(worst)
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }

    // -- in-place arithmetic used by the time steppers --

    pub fn scale(&mut self, factor: f64) {
        for comp in &mut self.components {
            for v in comp.iter_mut() {
                *v *= factor;
            }
        }
    }

    /// self += factor * other
    pub fn add_scaled(&mut self, factor: f64, other: &Self) {
        debug_assert_eq!(self.num_components(), other.num_components());
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += factor * y;
            }
        }
    }

    /// Multiply every component pointwise by a per-lattice-point real factor.
    pub fn mul_pointwise(&mut self, factors: &[f64]) {
        debug_assert_eq!(factors.len(), self.grid.lattice_len());
        for comp in &mut self.components {
            for (v, &f) in comp.iter_mut().zip(factors) {
                *v *= f;
            }
        }
    }
}
