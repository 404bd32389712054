//! Run orchestration: step scheduling that lands exactly on sample times,
//! per-step energy accounting, and the per-sample measurement block.

use std::time::Instant;

use crate::error::Result;
use crate::spectral::SpectralField;

use super::adv_diff::AdvDiff;
use super::forcing::{make_forcing, ForcingSpec};
use super::mhd::Mhd;
use super::{
    box_horizon, AdvDiffConfig, DtPolicy, MhdConfig, RunMeta, RunRecord, RunStatus, SampleRow,
    CFL_SAFETY,
};

/// Simulate advection–diffusion, sampling every hypothesis quantity at the
/// configured times. Instability aborts keep the partial record and carry the
/// failure reason in the status.
pub fn run_adv_diff(
    config: &AdvDiffConfig,
    initial: &SpectralField,
    forcing: Option<&ForcingSpec>,
) -> Result<RunRecord> {
    let model = AdvDiff::new(config.clone(), initial, forcing.copied())?;
    let mut warnings = Vec::new();
    horizon_warning(
        &mut warnings,
        config.t_end,
        config.grid.box_length(),
        config.nu,
    );
    let echo = serde_json::json!({
        "model": "adv-diff",
        "config": config,
        "forcing": forcing,
    });
    run_loop(
        Driver::AdvDiff(model),
        "adv-diff",
        config.m_hat,
        config.dt,
        &config.sample_times,
        echo,
        warnings,
    )
}

/// Simulate 2D incompressible MHD (unforced).
pub fn run_mhd(
    config: &MhdConfig,
    initial_u: &SpectralField,
    initial_b: &SpectralField,
) -> Result<RunRecord> {
    let model = Mhd::new(config.clone(), initial_u, initial_b)?;
    let mut warnings = Vec::new();
    horizon_warning(
        &mut warnings,
        config.t_end,
        config.grid.box_length(),
        config.mu.max(config.nu),
    );
    let echo = serde_json::json!({
        "model": "mhd",
        "config": config,
    });
    run_loop(
        Driver::Mhd(model),
        "mhd",
        config.m_hat,
        config.dt,
        &config.sample_times,
        echo,
        warnings,
    )
}

fn horizon_warning(warnings: &mut Vec<String>, t_end: f64, box_length: f64, nu: f64) {
    let horizon = box_horizon(box_length, nu);
    if t_end > horizon {
        warnings.push(format!(
            "t_end = {t_end} exceeds the box horizon t_box = {horizon:.3}; \
             algebraic decay beyond it is contaminated by the box's lowest mode"
        ));
    }
}

enum Driver {
    AdvDiff(AdvDiff),
    Mhd(Mhd),
}

impl Driver {
    fn step(&mut self, t: f64, dt: f64) -> Result<()> {
        match self {
            Driver::AdvDiff(m) => m.step(t, dt),
            Driver::Mhd(m) => m.step(t, dt),
        }
    }

    fn max_speed(&self) -> f64 {
        match self {
            Driver::AdvDiff(m) => m.max_speed(),
            Driver::Mhd(m) => m.max_speed(),
        }
    }

    fn spacing(&self) -> f64 {
        match self {
            Driver::AdvDiff(m) => m.config().grid.spacing(),
            Driver::Mhd(m) => m.config().grid.spacing(),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Driver::AdvDiff(m) => m.field().is_finite(),
            Driver::Mhd(m) => m.velocity().is_finite() && m.magnetic().is_finite(),
        }
    }

    /// (Σ ‖part‖², Σ κ_part ‖∇part‖²) for the discrete energy law.
    fn energy_and_dissipation(&self) -> (f64, f64) {
        match self {
            Driver::AdvDiff(m) => {
                let u = m.field();
                (
                    u.l2_norm().powi(2),
                    m.config().nu * u.sobolev_seminorm(1).powi(2),
                )
            }
            Driver::Mhd(m) => {
                let e = m.velocity().l2_norm().powi(2) + m.magnetic().l2_norm().powi(2);
                let d = m.config().mu * m.velocity().sobolev_seminorm(1).powi(2)
                    + m.config().nu * m.magnetic().sobolev_seminorm(1).powi(2);
                (e, d)
            }
        }
    }

    /// Forcing work rate ⟨u, f(t)⟩; zero when unforced or inactive.
    fn work(&self, t: f64) -> Result<f64> {
        match self {
            Driver::AdvDiff(m) => match m.forcing() {
                Some(f) if t >= f.t_on => {
                    let fhat = make_forcing(f, t, m.field().grid())?;
                    m.field().inner_product(&fhat)
                }
                _ => Ok(0.0),
            },
            Driver::Mhd(_) => Ok(0.0),
        }
    }

    fn measure(&self, t: f64, m_hat: u32, energy_residual: f64) -> Result<SampleRow> {
        match self {
            Driver::AdvDiff(model) => {
                let u = model.field();
                let g = model.nonlinear_term()?;
                let u_norms: Vec<f64> = (0..=m_hat).map(|m| u.sobolev_seminorm(m)).collect();
                let mut g_ratios = Vec::new();
                for m in 0..m_hat {
                    let num = u.weighted_inner_product(&g, m)?.abs();
                    let den = u.sobolev_seminorm(m + 1).powi(2);
                    g_ratios.push((den > 0.0).then(|| num / den));
                }
                let scale = u.l2_norm() * g.l2_norm();
                let ortho = if scale > 0.0 {
                    u.inner_product(&g)?.abs() / scale
                } else {
                    0.0
                };
                let forcing_norms = match model.forcing() {
                    Some(f) if t >= f.t_on => {
                        let fhat = make_forcing(f, t, u.grid())?;
                        Some((0..=m_hat).map(|m| fhat.sobolev_seminorm(m)).collect())
                    }
                    _ => None,
                };
                Ok(SampleRow {
                    t,
                    u_norms,
                    b_norms: None,
                    g_ratios,
                    energy_orthogonality: ortho,
                    energy_residual,
                    leray_residual: None,
                    forcing_norms,
                })
            }
            Driver::Mhd(model) => {
                let (u, b) = (model.velocity(), model.magnetic());
                let (f, g) = model.nonlinear_term()?;
                let u_norms: Vec<f64> = (0..=m_hat).map(|m| u.sobolev_seminorm(m)).collect();
                let b_norms: Vec<f64> = (0..=m_hat).map(|m| b.sobolev_seminorm(m)).collect();
                let mut g_ratios = Vec::new();
                for m in 0..m_hat {
                    let num = (u.weighted_inner_product(&f, m)?
                        + b.weighted_inner_product(&g, m)?)
                    .abs();
                    let den =
                        u.sobolev_seminorm(m + 1).powi(2) + b.sobolev_seminorm(m + 1).powi(2);
                    g_ratios.push((den > 0.0).then(|| num / den));
                }
                let state_norm = (u.l2_norm().powi(2) + b.l2_norm().powi(2)).sqrt();
                let nonlin_norm = (f.l2_norm().powi(2) + g.l2_norm().powi(2)).sqrt();
                let ortho = if state_norm * nonlin_norm > 0.0 {
                    (u.inner_product(&f)? + b.inner_product(&g)?).abs()
                        / (state_norm * nonlin_norm)
                } else {
                    0.0
                };
                Ok(SampleRow {
                    t,
                    u_norms,
                    b_norms: Some(b_norms),
                    g_ratios,
                    energy_orthogonality: ortho,
                    energy_residual,
                    leray_residual: Some(model.leray_residual()),
                    forcing_norms: None,
                })
            }
        }
    }
}

fn run_loop(
    mut driver: Driver,
    model_name: &str,
    m_hat: u32,
    dt_policy: DtPolicy,
    sample_times: &[f64],
    config_echo: serde_json::Value,
    warnings: Vec<String>,
) -> Result<RunRecord> {
    let started = Instant::now();
    let mut samples = Vec::with_capacity(sample_times.len());
    let mut status = RunStatus::Ok;
    let mut steps: u64 = 0;
    let mut t = 0.0f64;

    'schedule: for &ts in sample_times {
        let mut max_residual = 0.0f64;
        if ts > t {
            let mut dt_eff = dt_policy.max_dt;
            if dt_policy.cfl_limited {
                let speed = driver.max_speed();
                if speed > 0.0 {
                    dt_eff = dt_eff.min(CFL_SAFETY * driver.spacing() / speed);
                }
            }
            let span = ts - t;
            let n_sub = (span / dt_eff).ceil().max(1.0) as u64;
            let dt_step = span / n_sub as f64;

            let (mut e_prev, mut d_prev) = driver.energy_and_dissipation();
            let mut w_prev = driver.work(t)?;
            let t_base = t;
            for k in 0..n_sub {
                let t_step = t_base + k as f64 * dt_step;
                if let Err(e) = driver.step(t_step, dt_step) {
                    status = RunStatus::Aborted {
                        reason: format!("step failed at t = {t_step:.6}: {e}"),
                    };
                    break 'schedule;
                }
                steps += 1;
                if !driver.is_finite() {
                    status = RunStatus::Aborted {
                        reason: format!("non-finite state at t = {:.6}", t_step + dt_step),
                    };
                    break 'schedule;
                }
                let (e_new, d_new) = driver.energy_and_dissipation();
                let w_new = driver.work(t_step + dt_step)?;
                let balance =
                    e_new - e_prev + dt_step * (d_prev + d_new) - dt_step * (w_prev + w_new);
                max_residual = max_residual.max(balance.abs() / e_prev.max(e_new).max(1e-300));
                (e_prev, d_prev, w_prev) = (e_new, d_new, w_new);
            }
            t = ts;
        }
        match driver.measure(ts, m_hat, max_residual) {
            Ok(row) => samples.push(row),
            Err(e) => {
                status = RunStatus::Aborted {
                    reason: format!("measurement failed at t = {ts:.6}: {e}"),
                };
                break;
            }
        }
    }

    Ok(RunRecord {
        model: model_name.to_string(),
        m_hat,
        samples,
        warnings,
        status,
        config: config_echo,
        meta: RunMeta {
            wall_seconds: started.elapsed().as_secs_f64(),
            steps,
        },
    })
}
