use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::field::{PhysicalField, SpectralField};
use super::grid::GridSpec;

// One process-wide planner; the plans it hands out are Send + Sync and shared
// read-only across threads.
fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    let mut planner = PLANNER
        .get_or_init(|| Mutex::new(FftPlanner::new()))
        .lock()
        .expect("FFT planner poisoned");
    match direction {
        FftDirection::Forward => planner.plan_fft_forward(len),
        FftDirection::Inverse => planner.plan_fft_inverse(len),
    }
}

/// Unnormalized in-place FFT of one lattice component (rows, then columns in 2D).
fn fft_lattice(grid: &GridSpec, data: &mut [Complex64], direction: FftDirection) {
    let n = grid.points_per_axis();
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::ZERO; fft.get_inplace_scratch_len()];
    match grid.dim() {
        1 => fft.process_with_scratch(data, &mut scratch),
        _ => {
            for row in data.chunks_exact_mut(n) {
                fft.process_with_scratch(row, &mut scratch);
            }
            transpose_square(data, n);
            for row in data.chunks_exact_mut(n) {
                fft.process_with_scratch(row, &mut scratch);
            }
            transpose_square(data, n);
        }
    }
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Discrete Fourier coefficients û(ξ) = (L/N)ⁿ Σ_x u(x) e^{-iξ·x}.
pub fn forward_transform(p: &PhysicalField) -> SpectralField {
    let grid = *p.grid();
    let scale = grid.collocation_weight();
    let components = (0..p.num_components())
        .map(|c| {
            let mut buf: Vec<Complex64> = p
                .component(c)
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect();
            fft_lattice(&grid, &mut buf, FftDirection::Forward);
            for v in &mut buf {
                *v *= scale;
            }
            buf
        })
        .collect();
    SpectralField::new(grid, components).expect("shapes by construction")
}

/// Collocation values u(x) = L⁻ⁿ Σ_ξ û(ξ) e^{iξ·x}; the imaginary residue of a
/// Hermitian input is rounding noise and is dropped.
pub fn inverse_transform(s: &SpectralField) -> PhysicalField {
    let grid = *s.grid();
    let scale = grid.box_length().powi(-(grid.dim() as i32));
    let components = (0..s.num_components())
        .map(|c| {
            let mut buf = s.component(c).to_vec();
            fft_lattice(&grid, &mut buf, FftDirection::Inverse);
            buf.iter().map(|v| v.re * scale).collect()
        })
        .collect();
    PhysicalField::new(grid, components).expect("shapes by construction")
}
