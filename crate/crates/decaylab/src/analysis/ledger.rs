//! The hypothesis ledger: fitted (C₀, α), measured g_m trends, fitted
//! (F_m, β), and the lower-envelope (D₀, η), assembled from a run record.

use serde::{Deserialize, Serialize};

use crate::models::RunRecord;

use super::{fit_exponent, lower_envelope, DecayFit, TimeSeries};

/// Ratios g_m below this are reported as negligible (machine-zero pairing).
const NEGLIGIBLE_RATIO: f64 = 1e-10;

/// Trend summary of one measured g_m(t) curve. The paper gives no
/// constructive g_m; only the measured trend is reported, never asserted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H2Trend {
    pub m: u32,
    pub n_samples: usize,
    /// (#decreasing - #increasing) consecutive pairs over #pairs, in [-1, 1];
    /// negative means a decaying trend. `None` with fewer than two samples.
    pub trend_statistic: Option<f64>,
    pub first: Option<(f64, f64)>,
    pub last: Option<(f64, f64)>,
    /// All sampled ratios sit below 1e-10.
    pub negligible: bool,
}

/// Fitted forcing decay. An unforced run reports F_m = 0 with β absent
/// (the β = ∞ sentinel: every forcing premise is vacuous).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcingReport {
    pub forced: bool,
    /// β̂ from the m = 0 fit; `None` means unforced (β = ∞).
    pub beta_hat: Option<f64>,
    /// Empirical F_m prefactors, zero when unforced.
    pub f_m_hat: Vec<f64>,
    pub fits: Vec<Option<DecayFit>>,
}

/// Fitted empirical content of the four hypotheses for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub window: [f64; 2],
    /// Full-series fit of ‖u(t)‖: prefactor C₀, exponent -α̂.
    pub h1_upper: Option<DecayFit>,
    pub alpha_hat: Option<f64>,
    pub h2_trends: Vec<H2Trend>,
    pub h3_forcing: ForcingReport,
    /// Lower-envelope fit of ‖u(t)‖: prefactor D₀, exponent -η̂.
    pub h4_lower: Option<DecayFit>,
    pub eta_hat: Option<f64>,
    /// Why a field was not estimable, when it wasn't.
    pub notes: Vec<String>,
}

/// Assemble the ledger from a record over the given fit window. Fields that
/// cannot be estimated are `None` with a note; this function does not fail.
pub fn hypothesis_ledger(record: &RunRecord, window: [f64; 2]) -> HypothesisReport {
    let m_hat = record.m_hat;
    let mut notes = Vec::new();

    let u_series = TimeSeries::from_pairs(&record.u_norm_series(0)).ok();

    let h1_upper = match &u_series {
        Some(series) => match fit_exponent(series, window) {
            Ok(fit) => Some(fit),
            Err(e) => {
                notes.push(format!("H1 not estimable: {e}"));
                None
            }
        },
        None => {
            notes.push("H1 not estimable: empty norm series".into());
            None
        }
    };
    let alpha_hat = h1_upper.as_ref().map(|f| -f.exponent);

    let h2_trends = (0..m_hat)
        .map(|m| h2_trend(record, m, window))
        .collect();

    let h3_forcing = forcing_report(record, window, &mut notes);

    let h4_lower = match &u_series {
        Some(series) => lower_envelope(series, window, 5)
            .and_then(|env| fit_exponent(&env, window))
            .map_err(|e| notes.push(format!("H4 not estimable: {e}")))
            .ok(),
        None => None,
    };
    let eta_hat = h4_lower.as_ref().map(|f| -f.exponent);

    HypothesisReport {
        window,
        h1_upper,
        alpha_hat,
        h2_trends,
        h3_forcing,
        h4_lower,
        eta_hat,
        notes,
    }
}

fn h2_trend(record: &RunRecord, m: u32, window: [f64; 2]) -> H2Trend {
    let pts: Vec<(f64, f64)> = record
        .g_ratio_series(m)
        .into_iter()
        .filter(|&(t, _)| t >= window[0] && t <= window[1])
        .collect();
    let n_samples = pts.len();
    let trend_statistic = (n_samples >= 2).then(|| {
        let (mut dec, mut inc) = (0i64, 0i64);
        for w in pts.windows(2) {
            if w[1].1 < w[0].1 {
                dec += 1;
            } else if w[1].1 > w[0].1 {
                inc += 1;
            }
        }
        (inc - dec) as f64 / (n_samples - 1) as f64
    });
    let negligible =
        n_samples > 0 && pts.iter().all(|&(_, g)| g <= NEGLIGIBLE_RATIO);
    H2Trend {
        m,
        n_samples,
        trend_statistic,
        first: pts.first().copied(),
        last: pts.last().copied(),
        negligible,
    }
}

fn forcing_report(record: &RunRecord, window: [f64; 2], notes: &mut Vec<String>) -> ForcingReport {
    let m_hat = record.m_hat;
    let forced = record
        .samples
        .iter()
        .any(|s| s.forcing_norms.is_some());
    if !forced {
        return ForcingReport {
            forced: false,
            beta_hat: None,
            f_m_hat: vec![0.0; (m_hat + 1) as usize],
            fits: vec![None; (m_hat + 1) as usize],
        };
    }

    let mut fits = Vec::new();
    for m in 0..=m_hat {
        let series = TimeSeries::from_pairs(&record.forcing_norm_series(m)).ok();
        let fit = series.and_then(|s| match fit_exponent(&s, window) {
            Ok(f) => Some(f),
            Err(e) => {
                notes.push(format!("H3 fit for m = {m} not estimable: {e}"));
                None
            }
        });
        fits.push(fit);
    }
    // ‖Dᵐf‖ = F_m t^{-β-m/2}: β̂ from the m = 0 exponent, F̂_m from prefactors
    let beta_hat = fits[0].as_ref().map(|f| -f.exponent);
    let f_m_hat = fits
        .iter()
        .map(|f| f.as_ref().map_or(0.0, |fit| fit.prefactor))
        .collect();
    ForcingReport {
        forced: true,
        beta_hat,
        f_m_hat,
        fits,
    }
}
