//! Verdicts comparing fitted exponents against predicted decay rates, and
//! the z_m monotonicity detector.
//!
//! A check never reports `Pass` while any stated premise fails: premise
//! evaluation happens first and short-circuits the verdict to
//! `PremisesUnmet` regardless of exponent agreement. Upper-bound checks are
//! one-sided (faster measured decay than predicted is fine), lower-bound
//! checks one-sided the other way, and the reverse-rate check is two-sided
//! since the rate is pinned from both sides.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{DecayFit, TimeSeries};

/// Relative increase beyond which a sample-to-sample rise of z_m counts as a
/// monotonicity violation.
pub const MONOTONICITY_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// ‖Dᵐu‖ ≤ C_m ν^{-m/2} t^{-α-m/2} bootstrapped from the L² rate.
    DerivativeUpper,
    /// ‖Dᵐu‖ ≥ D_m ν^{-m/2} t^{-α-m/2}, lower rate matching the upper (η = α).
    DerivativeLowerMatched,
    /// ‖Dᵐu‖ ≥ D_m ν^{-m/2} t^{-η-mq/2} with q = η/α (η > α).
    DerivativeLowerStretched,
    /// ‖u‖ rate deduced from the ‖Du‖ rate, pinned two-sided at -α₁ + 1/2.
    ReverseRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    PremisesUnmet,
}

/// One evaluated premise of a check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideCondition {
    pub name: String,
    pub satisfied: bool,
    pub detail: String,
}

impl SideCondition {
    fn met(name: &str, detail: String) -> Self {
        Self {
            name: name.into(),
            satisfied: true,
            detail,
        }
    }

    fn check(name: &str, satisfied: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            satisfied,
            detail,
        }
    }
}

/// Structured verdict for one derivative order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheck {
    pub kind: CheckKind,
    pub m: u32,
    pub predicted_exponent: f64,
    pub fitted_exponent: f64,
    pub tolerance: f64,
    pub side_conditions: Vec<SideCondition>,
    pub verdict: Verdict,
}

impl TheoremCheck {
    fn build(
        kind: CheckKind,
        m: u32,
        predicted: f64,
        fitted: f64,
        tolerance: f64,
        side_conditions: Vec<SideCondition>,
        exponent_ok: bool,
    ) -> Self {
        let premises_ok = side_conditions.iter().all(|c| c.satisfied);
        let verdict = if !premises_ok {
            Verdict::PremisesUnmet
        } else if exponent_ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            kind,
            m,
            predicted_exponent: predicted,
            fitted_exponent: fitted,
            tolerance,
            side_conditions,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn forcing_condition(beta: Option<f64>, bound_name: &str, bound: f64) -> SideCondition {
    match beta {
        Some(b) => SideCondition::check(
            bound_name,
            b >= bound - 1e-12,
            format!("beta = {b}, bound = {bound}"),
        ),
        None => SideCondition::met(bound_name, "unforced (F_m = 0): vacuous".into()),
    }
}

fn forcing_condition_strict(beta: Option<f64>, bound_name: &str, bound: f64) -> SideCondition {
    match beta {
        Some(b) => SideCondition::check(
            bound_name,
            b > bound,
            format!("beta = {b}, bound = {bound}"),
        ),
        None => SideCondition::met(bound_name, "unforced (F_m = 0): vacuous".into()),
    }
}

/// Upper-bound checks for m = 0..=m̂ from norm fits indexed by order.
///
/// The base rate is α̂ = -fits[0].exponent; order m must not decay slower
/// than t^{-(α̂+m/2)} beyond tolerance. Faster decay passes (these are upper
/// bounds). Forcing premise: β ≥ α + 1.
pub fn check_theorem_upper(
    fits: &[DecayFit],
    beta: Option<f64>,
    tolerance: f64,
) -> Result<Vec<TheoremCheck>> {
    if fits.is_empty() {
        return Err(Error::MissingFit(0));
    }
    let alpha = -fits[0].exponent;
    let premise = forcing_condition(beta, "beta >= alpha + 1", alpha + 1.0);
    Ok(fits
        .iter()
        .enumerate()
        .map(|(m, fit)| {
            let predicted = -(alpha + m as f64 / 2.0);
            TheoremCheck::build(
                CheckKind::DerivativeUpper,
                m as u32,
                predicted,
                fit.exponent,
                tolerance,
                vec![premise.clone()],
                fit.exponent <= predicted + tolerance,
            )
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerMode {
    /// η = α: lower rate matches the upper rate.
    EtaEqualsAlpha,
    /// η > α: lower rate stretched by q = η/α per derivative.
    EtaGreater,
}

/// Lower-bound checks for m = 0..=m̂ from lower-envelope fits.
///
/// α̂ comes from the full-series L² fit, η̂ from the envelope L² fit. The
/// measured envelope exponent must not be more negative than the prediction
/// beyond tolerance. Premises: η consistency with the chosen mode, and the
/// forcing bound (β > α + 1 for the matched mode,
/// β > 2η - α + (η/α - 1)·m̂ + 1 for the stretched mode).
pub fn check_theorem_lower(
    envelope_fits: &[DecayFit],
    alpha_fit: &DecayFit,
    eta_fit: &DecayFit,
    beta: Option<f64>,
    mode: LowerMode,
    tolerance: f64,
) -> Result<Vec<TheoremCheck>> {
    if envelope_fits.is_empty() {
        return Err(Error::MissingFit(0));
    }
    let alpha = -alpha_fit.exponent;
    let eta = -eta_fit.exponent;
    let m_hat = (envelope_fits.len() - 1) as f64;

    let (kind, rate_condition, beta_condition) = match mode {
        LowerMode::EtaEqualsAlpha => (
            CheckKind::DerivativeLowerMatched,
            SideCondition::check(
                "eta = alpha",
                (eta - alpha).abs() <= tolerance,
                format!("eta_hat = {eta:.6}, alpha_hat = {alpha:.6}"),
            ),
            forcing_condition_strict(beta, "beta > alpha + 1", alpha + 1.0),
        ),
        LowerMode::EtaGreater => (
            CheckKind::DerivativeLowerStretched,
            SideCondition::check(
                "eta > alpha",
                eta > alpha,
                format!("eta_hat = {eta:.6}, alpha_hat = {alpha:.6}"),
            ),
            forcing_condition_strict(
                beta,
                "beta > 2 eta - alpha + (eta/alpha - 1) m_hat + 1",
                2.0 * eta - alpha + (eta / alpha - 1.0) * m_hat + 1.0,
            ),
        ),
    };

    Ok(envelope_fits
        .iter()
        .enumerate()
        .map(|(m, fit)| {
            let predicted = match mode {
                LowerMode::EtaEqualsAlpha => -(alpha + m as f64 / 2.0),
                LowerMode::EtaGreater => -(eta + m as f64 * (eta / alpha) / 2.0),
            };
            TheoremCheck::build(
                kind,
                m as u32,
                predicted,
                fit.exponent,
                tolerance,
                vec![rate_condition.clone(), beta_condition.clone()],
                fit.exponent >= predicted - tolerance,
            )
        })
        .collect())
}

/// Reverse estimate: from ‖Du‖ ~ t^{-α₁} deduce ‖u‖ ~ t^{-α₁+1/2}, pinned
/// from above and below, hence a two-sided comparison.
///
/// Premises: α₁ > 1/2 always; with forcing, β > α₁ + 1/2 gives the clean
/// rate while β = α₁ + 1/2 (borderline) adds an ε loss to the prediction.
pub fn check_reverse(
    du_fit: &DecayFit,
    u_fit: &DecayFit,
    beta: Option<f64>,
    epsilon: Option<f64>,
    tolerance: f64,
) -> TheoremCheck {
    const BOUNDARY: f64 = 1e-9;
    let alpha1 = -du_fit.exponent;
    let mut conditions = vec![SideCondition::check(
        "alpha1 > 1/2",
        alpha1 > 0.5,
        format!("alpha1_hat = {alpha1:.6}"),
    )];

    let mut predicted = -alpha1 + 0.5;
    match beta {
        None => conditions.push(SideCondition::met(
            "beta > alpha1 + 1/2",
            "unforced: vacuous".into(),
        )),
        Some(b) => {
            let bound = alpha1 + 0.5;
            if (b - bound).abs() <= BOUNDARY {
                let eps = epsilon.unwrap_or(0.01);
                predicted += eps;
                conditions.push(SideCondition::met(
                    "beta = alpha1 + 1/2 (borderline)",
                    format!("prediction relaxed by epsilon = {eps}"),
                ));
            } else {
                conditions.push(SideCondition::check(
                    "beta > alpha1 + 1/2",
                    b > bound,
                    format!("beta = {b}, bound = {bound}"),
                ));
            }
        }
    }

    let ok = (u_fit.exponent - predicted).abs() <= tolerance;
    TheoremCheck::build(
        CheckKind::ReverseRate,
        0,
        predicted,
        u_fit.exponent,
        tolerance,
        conditions,
        ok,
    )
}

/// Monotonicity report for z_m(t) = ‖Dᵐu(t)‖² + K t^{-α-β-m+1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub m: u32,
    /// K = 2 C_m F_m / (α + β + m - 1); zero when unforced.
    pub k_constant: f64,
    /// Start time of the checked interval.
    pub a_m: f64,
    /// (t, relative increase) for every sample-to-sample rise beyond
    /// [`MONOTONICITY_REL_TOL`].
    pub violations: Vec<(f64, f64)>,
    pub max_violation: f64,
    pub n_checked: usize,
}

/// Detect increases of z_m over the samples with t > a_m.
///
/// `series_sq` holds squared seminorms. With F_m = 0 the constant K vanishes
/// and this is plain monotonicity of ‖Dᵐu‖². C_m and F_m are the empirical
/// prefactors (the theoretical constants are existential, not computable).
pub fn check_monotone_zm(
    series_sq: &TimeSeries,
    m: u32,
    alpha: f64,
    beta: Option<f64>,
    c_m: f64,
    f_m: f64,
    a_m: f64,
) -> Result<MonotonicityReport> {
    let k_constant = if f_m == 0.0 {
        0.0
    } else {
        let b = beta.ok_or_else(|| {
            Error::InvalidConfig("forced monotonicity check needs a beta estimate".into())
        })?;
        let denom = alpha + b + m as f64 - 1.0;
        if denom <= 0.0 {
            return Err(Error::InvalidMonotonicityConstant(denom));
        }
        2.0 * c_m * f_m / denom
    };

    let z = |t: f64, y_sq: f64| {
        if k_constant == 0.0 {
            y_sq
        } else {
            let b = beta.expect("checked above");
            y_sq + k_constant * t.powf(-(alpha + b + m as f64 - 1.0))
        }
    };

    let pts: Vec<(f64, f64)> = series_sq
        .pairs()
        .filter(|&(t, _)| t > a_m)
        .map(|(t, y)| (t, z(t, y)))
        .collect();
    let mut violations = Vec::new();
    for w in pts.windows(2) {
        let (t1, z1) = w[1];
        let z0 = w[0].1;
        let rel = (z1 - z0) / z0.max(1e-300);
        if rel > MONOTONICITY_REL_TOL {
            violations.push((t1, rel));
        }
    }
    let max_violation = violations.iter().map(|v| v.1).fold(0.0, f64::max);
    Ok(MonotonicityReport {
        m,
        k_constant,
        a_m,
        violations,
        max_violation,
        n_checked: pts.len(),
    })
}
