use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discretization of a square periodic box [0, L)ⁿ with N points per axis.
///
/// Wavenumbers on axis `a` are ξ_a = k_a·(2π/L) with integer k_a ∈ [-N/2, N/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    points_per_axis: usize,
    box_length: f64,
    dealias_fraction: f64,
}

impl GridSpec {
    pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;

    /// Grid with the standard 2/3 dealias rule.
    pub fn new(dim: usize, points_per_axis: usize, box_length: f64) -> Result<Self> {
        Self::with_dealias(dim, points_per_axis, box_length, Self::DEFAULT_DEALIAS)
    }

    pub fn with_dealias(
        dim: usize,
        points_per_axis: usize,
        box_length: f64,
        dealias_fraction: f64,
    ) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        if points_per_axis < 8 || !points_per_axis.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "points_per_axis must be even and >= 8, got {points_per_axis}"
            )));
        }
        if !(box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box_length must be positive, got {box_length}"
            )));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "dealias_fraction must lie in (0, 1], got {dealias_fraction}"
            )));
        }
        Ok(Self {
            dim,
            points_per_axis,
            box_length,
            dealias_fraction,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Total number of lattice points, Nⁿ.
    pub fn lattice_len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    /// Collocation spacing Δx = L/N.
    pub fn spacing(&self) -> f64 {
        self.box_length / self.points_per_axis as f64
    }

    /// Wavenumber spacing Δξ = 2π/L.
    pub fn wavenumber_step(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Largest representable wavenumber magnitude per axis, (N/2)·(2π/L).
    pub fn nyquist_wavenumber(&self) -> f64 {
        self.points_per_axis as f64 / 2.0 * self.wavenumber_step()
    }

    /// Largest retained integer mode per axis under the dealias rule.
    pub fn dealias_kmax(&self) -> i64 {
        (self.dealias_fraction * self.points_per_axis as f64 / 2.0 + 1e-9).floor() as i64
    }

    /// Dealias band edge in physical wavenumber units.
    pub fn dealias_edge(&self) -> f64 {
        self.dealias_kmax() as f64 * self.wavenumber_step()
    }

    /// The one Parseval constant of the crate: w = L⁻ⁿ, so that
    /// ‖u‖²_{L²} = w Σ_ξ |û(ξ)|². All norms route through this value.
    pub fn parseval_weight(&self) -> f64 {
        self.box_length.powi(-(self.dim as i32))
    }

    /// Frequency-space cell volume (2π/L)ⁿ, the quadrature weight of lattice
    /// sums that approximate ∫ ... dξ (shell masses, decay-character integrals).
    pub fn frequency_cell_volume(&self) -> f64 {
        self.wavenumber_step().powi(self.dim as i32)
    }

    /// Physical quadrature weight (L/N)ⁿ of collocation sums.
    pub fn collocation_weight(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Signed integer mode index for a one-axis FFT position.
    #[inline]
    pub fn mode_of_index(&self, i: usize) -> i64 {
        let n = self.points_per_axis;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Integer modes (k₀, k₁) at a flat lattice position; k₁ = 0 in 1D.
    #[inline]
    pub fn modes_at(&self, flat: usize) -> [i64; 2] {
        match self.dim {
            1 => [self.mode_of_index(flat), 0],
            _ => {
                let n = self.points_per_axis;
                [self.mode_of_index(flat / n), self.mode_of_index(flat % n)]
            }
        }
    }

    /// Physical wavenumber vector at a flat lattice position.
    #[inline]
    pub fn wavenumber_at(&self, flat: usize) -> [f64; 2] {
        let dk = self.wavenumber_step();
        let k = self.modes_at(flat);
        [k[0] as f64 * dk, k[1] as f64 * dk]
    }

    /// |ξ|² at a flat lattice position.
    #[inline]
    pub fn wavenumber_sq_at(&self, flat: usize) -> f64 {
        let xi = self.wavenumber_at(flat);
        xi[0] * xi[0] + xi[1] * xi[1]
    }

    /// Flat index of the Hermitian mirror -ξ of the given lattice position.
    #[inline]
    pub fn mirror_index(&self, flat: usize) -> usize {
        let n = self.points_per_axis;
        match self.dim {
            1 => (n - flat % n) % n,
            _ => {
                let (i0, i1) = (flat / n, flat % n);
                ((n - i0) % n) * n + (n - i1) % n
            }
        }
    }

    /// Collocation point coordinates at a flat lattice position.
    #[inline]
    pub fn position_at(&self, flat: usize) -> [f64; 2] {
        let dx = self.spacing();
        match self.dim {
            1 => [flat as f64 * dx, 0.0],
            _ => {
                let n = self.points_per_axis;
                [(flat / n) as f64 * dx, (flat % n) as f64 * dx]
            }
        }
    }
}
