use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;

use super::*;

fn random_physical(grid: GridSpec, components: usize, seed: u64) -> PhysicalField {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let data = (0..components)
        .map(|_| {
            (0..grid.lattice_len())
                .map(|_| rng.random::<f64>() * 2.0 - 1.0)
                .collect()
        })
        .collect();
    PhysicalField::new(grid, data).unwrap()
}

#[test]
fn cosine_mode_has_exactly_two_coefficients() {
    let l = 5.0;
    let grid = GridSpec::new(2, 16, l).unwrap();
    let p = PhysicalField::from_fn(grid, 1, |_, x| (2.0 * PI * x[0] / l).cos());
    let s = forward_transform(&p);

    let mut nonzero = Vec::new();
    for (i, v) in s.component(0).iter().enumerate() {
        if v.norm() > 1e-10 {
            nonzero.push((grid.modes_at(i), v.norm()));
        }
    }
    assert_eq!(nonzero.len(), 2);
    let modes: Vec<[i64; 2]> = nonzero.iter().map(|(k, _)| *k).collect();
    assert!(modes.contains(&[1, 0]) && modes.contains(&[-1, 0]));
    assert!((nonzero[0].1 - nonzero[1].1).abs() < 1e-12 * nonzero[0].1);
}

#[test]
fn zero_field_transforms_to_zero() {
    let grid = GridSpec::new(1, 16, 1.0).unwrap();
    let s = forward_transform(&PhysicalField::zeros(grid, 1));
    assert_eq!(s.max_coeff_norm(), 0.0);
}

#[test]
fn transform_round_trip_is_identity() {
    for &n in &[16usize, 32] {
        let grid = GridSpec::new(2, n, 3.7).unwrap();
        let p = random_physical(grid, 2, 42);
        let back = inverse_transform(&forward_transform(&p));
        let mut worst = 0.0f64;
        for c in 0..2 {
            for (a, b) in p.component(c).iter().zip(back.component(c)) {
                worst = worst.max((a - b).abs());
            }
        }
        assert!(worst < 1e-12, "round trip error {worst} at N = {n}");
    }
}

#[test]
fn derivative_of_single_mode_is_eigenvalue_multiplication() {
    let l = 4.0;
    let grid = GridSpec::new(2, 16, l).unwrap();
    let mut s = SpectralField::zeros(grid, 1);
    // place e^{iξ·x} with k = (3, -2), plus the Hermitian mirror
    let n = grid.points_per_axis();
    let idx = 3 * n + (n - 2);
    let mirror = grid.mirror_index(idx);
    s.component_mut(0)[idx] = Complex64::new(0.7, 0.2);
    s.component_mut(0)[mirror] = Complex64::new(0.7, -0.2);

    let d = s.derivative(0).unwrap();
    let xi0 = 3.0 * grid.wavenumber_step();
    let expected = Complex64::new(0.0, xi0) * Complex64::new(0.7, 0.2);
    assert!((d.component(0)[idx] - expected).norm() < 1e-14);
}

#[test]
fn derivative_of_constant_is_zero() {
    let grid = GridSpec::new(2, 16, 2.0).unwrap();
    let p = PhysicalField::from_fn(grid, 1, |_, _| 3.25);
    let d = forward_transform(&p).derivative(1).unwrap();
    assert!(d.max_coeff_norm() < 1e-13);
}

#[test]
fn derivative_of_sine_scales_norm_by_wavenumber() {
    let l = 7.0;
    let grid = GridSpec::new(2, 32, l).unwrap();
    let p = PhysicalField::from_fn(grid, 1, |_, x| (2.0 * PI * x[0] / l).sin());
    let s = forward_transform(&p);
    let d = s.derivative(0).unwrap();
    let expected = (2.0 * PI / l) * s.l2_norm();
    assert!((d.l2_norm() - expected).abs() < 1e-12 * expected);
}

#[test]
fn seminorm_of_single_mode_is_amplitude_times_k_to_m() {
    let l = 2.0 * PI; // unit wavenumber spacing
    let grid = GridSpec::new(2, 16, l).unwrap();
    let mut s = SpectralField::zeros(grid, 1);
    let n = grid.points_per_axis();
    let idx = 2 * n + 1; // k = (2, 1), |k|² = 5
    let mirror = grid.mirror_index(idx);
    s.component_mut(0)[idx] = Complex64::new(0.5, 0.0);
    s.component_mut(0)[mirror] = Complex64::new(0.5, 0.0);

    let base = s.l2_norm();
    for m in 0..=3u32 {
        let expected = base * 5.0f64.powf(m as f64 / 2.0);
        let got = s.sobolev_seminorm(m);
        assert!(
            (got - expected).abs() < 1e-12 * expected,
            "m = {m}: {got} vs {expected}"
        );
    }
}

#[test]
fn parseval_matches_collocation_norm() {
    for &n in &[16usize, 64, 256] {
        let grid = GridSpec::new(2, n, 11.0).unwrap();
        let p = random_physical(grid, 1, 7 + n as u64);
        let phys = p.l2_norm();
        let spec = forward_transform(&p).l2_norm();
        assert!(
            (phys - spec).abs() <= 1e-12 * phys,
            "Parseval mismatch at N = {n}: {phys} vs {spec}"
        );
    }
}

#[test]
fn seminorm_of_order_m_plus_one_matches_derivative_quadrature() {
    let grid = GridSpec::new(2, 32, 3.0).unwrap();
    let s = forward_transform(&random_physical(grid, 1, 11)).dealias();
    for m in 0..=2u32 {
        let direct = s.sobolev_seminorm(m + 1);
        let mut sum_sq = 0.0;
        for axis in 0..2 {
            let d = s.derivative(axis).unwrap();
            sum_sq += d.sobolev_seminorm(m).powi(2);
        }
        let via_axes = sum_sq.sqrt();
        assert!(
            (direct - via_axes).abs() < 1e-12 * direct.max(1.0),
            "m = {m}: {direct} vs {via_axes}"
        );
    }
}

#[test]
fn dealias_keeps_retained_band_and_is_idempotent() {
    let grid = GridSpec::new(2, 24, 1.0).unwrap();
    let kmax = grid.dealias_kmax();

    let mut inside = SpectralField::zeros(grid, 1);
    let n = grid.points_per_axis();
    let idx = (kmax as usize - 1) * n + 1;
    inside.component_mut(0)[idx] = Complex64::new(1.0, 0.5);
    inside.component_mut(0)[grid.mirror_index(idx)] = Complex64::new(1.0, -0.5);
    assert_eq!(inside.dealias(), inside);

    let s = forward_transform(&random_physical(grid, 1, 3));
    assert_eq!(s.dealias().dealias(), s.dealias());
}

#[test]
fn dealias_kills_nyquist_only_field() {
    let grid = GridSpec::new(2, 16, 1.0).unwrap();
    let mut s = SpectralField::zeros(grid, 1);
    let n = grid.points_per_axis();
    s.component_mut(0)[(n / 2) * n] = Complex64::new(1.0, 0.0); // k = (-N/2, 0)
    assert_eq!(s.dealias().max_coeff_norm(), 0.0);
}

#[test]
fn inner_product_with_self_is_norm_squared() {
    let grid = GridSpec::new(2, 16, 2.5).unwrap();
    let s = forward_transform(&random_physical(grid, 2, 5));
    let ip = s.inner_product(&s).unwrap();
    let norm_sq = s.l2_norm().powi(2);
    assert!((ip - norm_sq).abs() < 1e-12 * norm_sq);
}

#[test]
fn orthogonal_modes_have_zero_inner_product() {
    let l = 3.0;
    let grid = GridSpec::new(2, 16, l).unwrap();
    let a = PhysicalField::from_fn(grid, 1, |_, x| (2.0 * PI * x[0] / l).cos());
    let b = PhysicalField::from_fn(grid, 1, |_, x| (4.0 * PI * x[0] / l).cos());
    let ip = forward_transform(&a)
        .inner_product(&forward_transform(&b))
        .unwrap();
    assert!(ip.abs() < 1e-13);
}

#[test]
fn inner_product_matches_collocation_sum() {
    let grid = GridSpec::new(2, 32, 9.0).unwrap();
    let pa = random_physical(grid, 1, 21);
    let pb = random_physical(grid, 1, 22);
    let spectral = forward_transform(&pa)
        .inner_product(&forward_transform(&pb))
        .unwrap();
    let colloc: f64 = grid.collocation_weight()
        * pa.component(0)
            .iter()
            .zip(pb.component(0))
            .map(|(x, y)| x * y)
            .sum::<f64>();
    assert!((spectral - colloc).abs() < 1e-12 * colloc.abs().max(1.0));
}

#[test]
fn derivative_and_dealias_preserve_hermitian_symmetry() {
    let grid = GridSpec::new(2, 16, 4.0).unwrap();
    let s = forward_transform(&random_physical(grid, 1, 9));
    assert!(s.hermitian_residual() < 1e-13);
    assert!(s.derivative(0).unwrap().hermitian_residual() < 1e-12);
    assert!(s.dealias().hermitian_residual() < 1e-13);
}

#[test]
fn grid_rejects_bad_parameters() {
    assert!(GridSpec::new(3, 16, 1.0).is_err());
    assert!(GridSpec::new(2, 6, 1.0).is_err());
    assert!(GridSpec::new(2, 15, 1.0).is_err());
    assert!(GridSpec::new(2, 16, 0.0).is_err());
    assert!(GridSpec::with_dealias(2, 16, 1.0, 0.0).is_err());
    assert!(GridSpec::with_dealias(2, 16, 1.0, 1.2).is_err());
}

#[test]
fn derivative_rejects_axis_out_of_range() {
    let grid = GridSpec::new(1, 16, 1.0).unwrap();
    let s = SpectralField::zeros(grid, 1);
    assert!(matches!(
        s.derivative(1),
        Err(crate::Error::AxisOutOfRange { .. })
    ));
}

mod snapshot_props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn snapshot_round_trip_is_exact(seed in 0u64..1000, two_components in proptest::bool::ANY) {
            let grid = GridSpec::new(2, 16, 2.75).unwrap();
            let c = if two_components { 2 } else { 1 };
            let field = forward_transform(&random_physical(grid, c, seed));

            let mut buf = Vec::new();
            write_snapshot(&field, &mut buf).unwrap();
            let back = read_snapshot(buf.as_slice()).unwrap();
            prop_assert_eq!(field, back);
        }
    }
}
