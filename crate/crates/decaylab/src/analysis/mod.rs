//! Exponent fits, fit windows, hypothesis ledgers, and theorem checks.
//!
//! Everything here reduces to least squares on (log t, log y): a
//! [`DecayFit`] is the slope/intercept pair of that line, reported with its
//! window and RMS log-residual. Upper-bound hypotheses are fitted on the
//! full series; lower-bound hypotheses on the per-decade minima (the lower
//! envelope), so oscillatory transients cannot bias the envelope rate.
//!
//! The proof-time bookkeeping of the estimates (the various per-order
//! transient times) is not observable; it collapses here into two configured
//! times: a fit-window start and a monotonicity start, see
//! [`TransientPolicy`].

mod checks;
mod ledger;

pub use checks::{
    check_monotone_zm, check_reverse, check_theorem_lower, check_theorem_upper, CheckKind,
    LowerMode, MonotonicityReport, SideCondition, TheoremCheck, Verdict,
    MONOTONICITY_REL_TOL,
};
pub use ledger::{hypothesis_ledger, ForcingReport, H2Trend, HypothesisReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::box_horizon;

/// Default exponent tolerance for oracle (linear) curves.
pub const ORACLE_TOLERANCE: f64 = 0.05;
/// Default exponent tolerance for nonlinear runs, where torus-window and
/// fit-window noise dominate.
pub const RUN_TOLERANCE: f64 = 0.1;

/// Sampled (t, value) pairs of a norm or ratio along a simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    t: Vec<f64>,
    y: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if t.is_empty() || t.len() != y.len() {
            return Err(Error::EmptySeries);
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::NonMonotoneTimes);
        }
        Ok(Self { t, y })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t.iter().copied().zip(self.y.iter().copied())
    }

    /// Pairs with t inside the closed window.
    pub fn in_window(&self, window: [f64; 2]) -> Vec<(f64, f64)> {
        self.pairs()
            .filter(|&(t, _)| t >= window[0] && t <= window[1])
            .collect()
    }

    /// Pointwise map of the values (e.g. squared norms to norms).
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            t: self.t.clone(),
            y: self.y.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Fitted power law y ≈ C t^p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// p, the log-log slope.
    pub exponent: f64,
    /// C, from the log-log intercept.
    pub prefactor: f64,
    pub window: [f64; 2],
    /// RMS of log-residuals over the fitted points.
    pub residual: f64,
    pub n_points: usize,
}

/// Least-squares power-law fit over the samples inside `window`.
///
/// Requires at least 5 strictly positive values at strictly positive times.
pub fn fit_exponent(series: &TimeSeries, window: [f64; 2]) -> Result<DecayFit> {
    const MIN_POINTS: usize = 5;
    if !(window[0] > 0.0) || !(window[1] > window[0]) {
        return Err(Error::InvalidConfig(format!(
            "fit window [{}, {}] must satisfy 0 < t0 < t1",
            window[0], window[1]
        )));
    }
    let pts = series.in_window(window);
    if pts.len() < MIN_POINTS {
        return Err(Error::ShortWindow {
            found: pts.len(),
            needed: MIN_POINTS,
        });
    }
    for &(t, y) in &pts {
        if !(y > 0.0) {
            return Err(Error::NonpositiveValue { t, value: y });
        }
    }

    let logs: Vec<(f64, f64)> = pts.iter().map(|&(t, y)| (t.ln(), y.ln())).collect();
    let (slope, intercept) = crate::initial_data::linear_fit(&logs);
    let residual = (logs
        .iter()
        .map(|&(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / logs.len() as f64)
        .sqrt();
    Ok(DecayFit {
        exponent: slope,
        prefactor: intercept.exp(),
        window,
        residual,
        n_points: logs.len(),
    })
}

/// The two configured transient times that stand in for the per-order
/// transient bookkeeping of the estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransientPolicy {
    /// Earliest time admitted into fit windows.
    pub fit_start: f64,
    /// a_m of the monotonicity checks.
    pub monotonicity_start: f64,
}

impl Default for TransientPolicy {
    fn default() -> Self {
        Self {
            fit_start: 0.0,
            monotonicity_start: 5.0,
        }
    }
}

/// Box geometry needed for the horizon cut; `None` for oracle curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxInfo {
    pub box_length: f64,
    pub nu: f64,
}

/// Fit window selection: the end is capped at the box horizon
/// t_box = 0.1 (L/2π)²/ν, the start skips the configured transient and the
/// data's first decade. Oracle curves (no box) keep the full requested range.
pub fn auto_window(
    series: &TimeSeries,
    box_info: Option<BoxInfo>,
    policy: &TransientPolicy,
) -> Result<[f64; 2]> {
    let t_first = series
        .times()
        .iter()
        .copied()
        .find(|&t| t > 0.0)
        .ok_or(Error::EmptySeries)?;
    let t_last = *series.times().last().unwrap();

    let (t0, t1) = match box_info {
        Some(info) => {
            let horizon = box_horizon(info.box_length, info.nu);
            (
                policy.fit_start.max(10.0 * t_first),
                t_last.min(horizon),
            )
        }
        None => (policy.fit_start.max(t_first), t_last),
    };
    if t0 >= t1 {
        return Err(Error::WindowCollapsed { t0, t1 });
    }
    Ok([t0, t1])
}

/// Per-decade minima of the series inside `window`, for lower-bound fits.
///
/// Decade bins are refined to width 10^(1/k) when fewer than `min_bins`
/// whole decades fit in the window, so the envelope always carries enough
/// points for a fit.
pub fn lower_envelope(
    series: &TimeSeries,
    window: [f64; 2],
    min_bins: usize,
) -> Result<TimeSeries> {
    if !(window[0] > 0.0) || !(window[1] > window[0]) {
        return Err(Error::InvalidConfig(format!(
            "envelope window [{}, {}] must satisfy 0 < t0 < t1",
            window[0], window[1]
        )));
    }
    let span_decades = (window[1] / window[0]).log10();
    let mut refine = 1usize;
    while (span_decades * refine as f64).ceil() < min_bins as f64 {
        refine += 1;
    }
    let bin_width = 1.0 / refine as f64; // decades per bin

    let mut minima: Vec<(f64, f64)> = Vec::new();
    let mut current_bin = usize::MAX;
    for (t, y) in series.in_window(window) {
        let bin = ((t / window[0]).log10() / bin_width).floor() as usize;
        if bin != current_bin {
            minima.push((t, y));
            current_bin = bin;
        } else if y < minima.last().unwrap().1 {
            *minima.last_mut().unwrap() = (t, y);
        }
    }
    if minima.is_empty() {
        return Err(Error::EmptySeries);
    }
    TimeSeries::from_pairs(&minima)
}

#[cfg(test)]
mod tests;
