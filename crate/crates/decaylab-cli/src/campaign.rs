//! Campaign execution: run each configured job (in parallel up to the
//! requested degree), persist series and records, fit exponents, evaluate
//! theorem checks, and assemble the cross-run report.
//!
//! Determinism contract: a campaign re-run with the same config and seed
//! produces byte-identical series CSVs and report JSON. Wall-clock metadata
//! is segregated into `meta.json` files and never enters the report.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, Context, Result};
use serde::{Deserialize, Serialize};

use decaylab::analysis::{
    auto_window, check_monotone_zm, check_reverse, check_theorem_lower, check_theorem_upper,
    fit_exponent, hypothesis_ledger, lower_envelope, BoxInfo, DecayFit, HypothesisReport,
    LowerMode, MonotonicityReport, TheoremCheck, TimeSeries, TransientPolicy, Verdict,
    ORACLE_TOLERANCE, RUN_TOLERANCE,
};
use decaylab::heat_oracle::{
    evolve_curve, log_spaced_times, radialize, synthetic_radial_spectrum, OracleCurve,
};
use decaylab::initial_data::{make_decay_character_data, DecaySpec};
use decaylab::models::{run_adv_diff, run_mhd, RunRecord, RunStatus, SampleRow};
use decaylab::spectral::{read_snapshot, SpectralField};

use crate::config::{
    resolve, AnalysisPolicy, CampaignConfig, InitialSection, ModelSection, OracleSection,
    RunConfig, SCHEMA_VERSION,
};
use crate::plot;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReportEntry {
    pub name: String,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abort_reason: Option<String>,
    pub seed: u64,
    pub window: Option<[f64; 2]>,
    pub tolerance: f64,
    pub hypothesis: Option<HypothesisReport>,
    /// Full-series fit per order m (None where not estimable).
    pub fits: Vec<Option<DecayFit>>,
    /// Lower-envelope fit per order m.
    pub envelope_fits: Vec<Option<DecayFit>>,
    pub upper_checks: Vec<TheoremCheck>,
    pub lower_checks: Vec<TheoremCheck>,
    pub reverse_check: Option<TheoremCheck>,
    pub monotonicity: Vec<MonotonicityReport>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryRow {
    pub run: String,
    pub m: u32,
    pub fitted_exponent: Option<f64>,
    pub predicted_exponent: Option<f64>,
    pub verdict: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignReport {
    pub schema_version: u32,
    pub crate_version: String,
    pub global_seed: Option<u64>,
    pub runs: Vec<RunReportEntry>,
    pub summary: Vec<SummaryRow>,
}

impl CampaignReport {
    /// True when no run aborted and every check passed or was premises-unmet.
    pub fn all_green(&self) -> bool {
        self.runs.iter().all(|r| r.status == "ok") && !self.any_check_failed()
    }

    pub fn any_check_failed(&self) -> bool {
        self.runs.iter().any(|r| {
            r.upper_checks
                .iter()
                .chain(&r.lower_checks)
                .chain(r.reverse_check.as_ref())
                .any(|c| c.verdict == Verdict::Fail)
        })
    }
}

/// Execute every run of the campaign, up to `jobs` in parallel, writing
/// outputs under `out_dir/<run name>/`. Per-run failures are isolated: the
/// failing run is reported as aborted and its siblings continue.
pub fn run_campaign(
    config: &CampaignConfig,
    base_dir: &Path,
    out_dir: &Path,
    jobs: usize,
) -> Result<CampaignReport> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output dir {}", out_dir.display()))?;

    let n = config.runs.len();
    let entries: Vec<Mutex<Option<RunReportEntry>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = jobs.max(1).min(n.max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= n {
                    break;
                }
                let run = &config.runs[idx];
                let seed = config.seed_for(idx);
                let entry = process_run(run, seed, &config.analysis, base_dir, out_dir)
                    .unwrap_or_else(|e| aborted_entry(run, seed, e.to_string()));
                *entries[idx].lock().expect("entry lock") = Some(entry);
            });
        }
    });

    let runs: Vec<RunReportEntry> = entries
        .into_iter()
        .map(|m| m.into_inner().expect("entry lock").expect("entry filled"))
        .collect();
    let summary = build_summary(&runs);
    let report = CampaignReport {
        schema_version: SCHEMA_VERSION,
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        global_seed: config.global_seed,
        runs,
        summary,
    };

    write_json(&out_dir.join("campaign_report.json"), &report)?;
    let _ = plot::emit_plots(&report, out_dir)?;
    Ok(report)
}

fn aborted_entry(run: &RunConfig, seed: u64, reason: String) -> RunReportEntry {
    RunReportEntry {
        name: run.name.clone(),
        status: "aborted".into(),
        abort_reason: Some(reason),
        seed,
        window: None,
        tolerance: f64::NAN,
        hypothesis: None,
        fits: vec![],
        envelope_fits: vec![],
        upper_checks: vec![],
        lower_checks: vec![],
        reverse_check: None,
        monotonicity: vec![],
        warnings: vec![],
        notes: vec![],
    }
}

fn build_summary(runs: &[RunReportEntry]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for entry in runs {
        if entry.upper_checks.is_empty() {
            rows.push(SummaryRow {
                run: entry.name.clone(),
                m: 0,
                fitted_exponent: None,
                predicted_exponent: None,
                verdict: entry.status.clone(),
            });
            continue;
        }
        for check in &entry.upper_checks {
            rows.push(SummaryRow {
                run: entry.name.clone(),
                m: check.m,
                fitted_exponent: Some(check.fitted_exponent),
                predicted_exponent: Some(check.predicted_exponent),
                verdict: format!("{:?}", check.verdict).to_lowercase(),
            });
        }
    }
    rows
}

fn process_run(
    run: &RunConfig,
    seed: u64,
    campaign_policy: &AnalysisPolicy,
    base_dir: &Path,
    out_dir: &Path,
) -> Result<RunReportEntry> {
    let run_dir = out_dir.join(&run.name);
    fs::create_dir_all(&run_dir)?;

    let (record, oracle_curves, default_tol, box_info) =
        execute_run(run, seed, base_dir)?;

    write_series_csv(&run_dir.join("series.csv"), &record)?;
    write_json(&run_dir.join("record.json"), &record)?;
    write_json(&run_dir.join("meta.json"), &record.meta)?;
    if let Some(curves) = &oracle_curves {
        write_oracle_csv(&run_dir.join("oracle_sq.csv"), curves)?;
    }

    let policy = run.analysis.as_ref().unwrap_or(campaign_policy);
    let tolerance = policy.tolerance.unwrap_or(default_tol);
    let mut entry = analyze_record(&record, policy, tolerance, box_info);
    entry.name = run.name.clone();
    entry.seed = seed;
    write_json(&run_dir.join("analysis.json"), &entry)?;
    Ok(entry)
}

type Executed = (RunRecord, Option<Vec<OracleCurve>>, f64, Option<BoxInfo>);

fn execute_run(run: &RunConfig, seed: u64, base_dir: &Path) -> Result<Executed> {
    match &run.model {
        ModelSection::Oracle(section) => {
            let (record, curves) = execute_oracle(section, base_dir)?;
            Ok((record, Some(curves), ORACLE_TOLERANCE, None))
        }
        ModelSection::AdvDiff(section) => {
            let config = section.build()?;
            let initial = load_initial(&section.initial, &config.grid, 1, false, seed, base_dir)?;
            let forcing = section.forcing.as_ref().map(|f| f.to_spec());
            let record = run_adv_diff(&config, &initial, forcing.as_ref())?;
            let box_info = BoxInfo {
                box_length: config.grid.box_length(),
                nu: config.nu,
            };
            Ok((record, None, RUN_TOLERANCE, Some(box_info)))
        }
        ModelSection::Mhd(section) => {
            let config = section.build()?;
            let (u0, b0) = match &section.initial {
                InitialSection::Snapshot { field_path } => {
                    let u = read_field(&resolve(base_dir, field_path))?;
                    let b_path = section
                        .field_path_b
                        .as_ref()
                        .ok_or_else(|| anyhow!("snapshot-based MHD runs need field_path_b"))?;
                    (u, read_field(&resolve(base_dir, b_path))?)
                }
                spec @ InitialSection::DecaySpec { .. } => {
                    let u = load_initial(spec, &config.grid, 2, true, seed, base_dir)?;
                    let b = load_initial(spec, &config.grid, 2, true, seed.wrapping_add(1), base_dir)?;
                    (u, b)
                }
            };
            let record = run_mhd(&config, &u0, &b0)?;
            let box_info = BoxInfo {
                box_length: config.grid.box_length(),
                nu: config.mu.max(config.nu),
            };
            Ok((record, None, RUN_TOLERANCE, Some(box_info)))
        }
    }
}

fn load_initial(
    section: &InitialSection,
    grid: &decaylab::spectral::GridSpec,
    components: usize,
    divergence_free: bool,
    seed: u64,
    base_dir: &Path,
) -> Result<SpectralField> {
    match section {
        InitialSection::DecaySpec {
            r_star,
            amplitude,
            cutoff_radius,
            randomize_phases,
        } => {
            let spec = DecaySpec {
                r_star: *r_star,
                amplitude: *amplitude,
                cutoff_radius: *cutoff_radius,
                randomize_phases: *randomize_phases,
                seed,
            };
            Ok(make_decay_character_data(grid, &spec, components, divergence_free)?)
        }
        InitialSection::Snapshot { field_path } => read_field(&resolve(base_dir, field_path)),
    }
}

fn read_field(path: &Path) -> Result<SpectralField> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(read_snapshot(std::io::BufReader::new(file))?)
}

/// Oracle "runs" are packaged as a RunRecord so the analysis and persistence
/// paths are uniform: u_norms hold ‖Dᵐu(t)‖ (square roots of the evolved
/// squared seminorms) and every g sample is flagged absent.
fn execute_oracle(
    section: &OracleSection,
    base_dir: &Path,
) -> Result<(RunRecord, Vec<OracleCurve>)> {
    let spectrum = match &section.field_path {
        Some(p) => radialize(&read_field(&resolve(base_dir, p))?)?,
        None => synthetic_radial_spectrum(
            2,
            section.r_star,
            section.amplitude,
            section.cutoff_radius,
            512,
        )?,
    };
    let times = log_spaced_times(section.t_first, section.t_last, section.samples);
    let curves: Vec<OracleCurve> = (0..=section.m_hat)
        .map(|m| evolve_curve(&spectrum, m, section.nu, &times))
        .collect::<decaylab::Result<_>>()?;

    let samples = times
        .iter()
        .enumerate()
        .map(|(i, &t)| SampleRow {
            t,
            u_norms: curves.iter().map(|c| c.values[i].sqrt()).collect(),
            b_norms: None,
            g_ratios: vec![None; section.m_hat as usize],
            energy_orthogonality: 0.0,
            energy_residual: 0.0,
            leray_residual: None,
            forcing_norms: None,
        })
        .collect();
    let record = RunRecord {
        model: "oracle".into(),
        m_hat: section.m_hat,
        samples,
        warnings: vec![],
        status: RunStatus::Ok,
        config: serde_json::json!({ "model": "oracle", "config": section }),
        meta: Default::default(),
    };
    Ok((record, curves))
}

/// MHD hypotheses concern the stacked pair (u, b); fold b into the u norms
/// (quadrature sum) before fitting. Other models pass through unchanged.
pub fn analysis_view(record: &RunRecord) -> RunRecord {
    if record.model != "mhd" {
        return record.clone();
    }
    let mut view = record.clone();
    for row in &mut view.samples {
        if let Some(b) = &row.b_norms {
            for (u, bm) in row.u_norms.iter_mut().zip(b) {
                *u = (*u * *u + bm * bm).sqrt();
            }
        }
    }
    view
}

/// Fit, ledger, and checks for one record. Never fails: anything that cannot
/// be estimated turns into a note.
pub fn analyze_record(
    record: &RunRecord,
    policy: &AnalysisPolicy,
    tolerance: f64,
    box_info: Option<BoxInfo>,
) -> RunReportEntry {
    let mut notes = Vec::new();
    let view = analysis_view(record);
    let transient = TransientPolicy {
        fit_start: policy.fit_start,
        monotonicity_start: policy.monotonicity_start,
    };

    let (status, abort_reason) = match &record.status {
        RunStatus::Ok => ("ok".to_string(), None),
        RunStatus::Aborted { reason } => ("aborted".to_string(), Some(reason.clone())),
    };

    let mut entry = RunReportEntry {
        name: String::new(),
        status,
        abort_reason,
        seed: 0,
        window: None,
        tolerance,
        hypothesis: None,
        fits: vec![],
        envelope_fits: vec![],
        upper_checks: vec![],
        lower_checks: vec![],
        reverse_check: None,
        monotonicity: vec![],
        warnings: record.warnings.clone(),
        notes: vec![],
    };

    let series0 = match TimeSeries::from_pairs(&view.u_norm_series(0)) {
        Ok(s) => s,
        Err(e) => {
            entry.notes.push(format!("no usable samples: {e}"));
            return entry;
        }
    };
    let window = match policy.fit_window {
        Some(w) => w,
        None => match auto_window(&series0, box_info, &transient) {
            Ok(w) => w,
            Err(e) => {
                entry.notes.push(format!("window selection failed: {e}"));
                return entry;
            }
        },
    };
    entry.window = Some(window);

    let ledger = hypothesis_ledger(&view, window);
    let beta = ledger.h3_forcing.beta_hat;

    // full-series fits per order
    let mut fits: Vec<DecayFit> = Vec::new();
    for m in 0..=view.m_hat {
        match TimeSeries::from_pairs(&view.u_norm_series(m))
            .and_then(|s| fit_exponent(&s, window))
        {
            Ok(fit) => fits.push(fit),
            Err(e) => {
                notes.push(format!("fit for m = {m} not available: {e}"));
                break;
            }
        }
    }

    if !fits.is_empty() {
        match check_theorem_upper(&fits, beta, tolerance) {
            Ok(checks) => entry.upper_checks = checks,
            Err(e) => notes.push(format!("upper checks skipped: {e}")),
        }
    }

    // lower-envelope fits per order
    let mut envelope_fits: Vec<DecayFit> = Vec::new();
    for m in 0..fits.len() as u32 {
        let result = TimeSeries::from_pairs(&view.u_norm_series(m))
            .and_then(|s| lower_envelope(&s, window, 5))
            .and_then(|env| fit_exponent(&env, window));
        match result {
            Ok(fit) => envelope_fits.push(fit),
            Err(e) => {
                notes.push(format!("envelope fit for m = {m} not available: {e}"));
                break;
            }
        }
    }

    if let (Some(alpha_fit), Some(eta_fit)) = (fits.first(), envelope_fits.first()) {
        let alpha = -alpha_fit.exponent;
        let eta = -eta_fit.exponent;
        let mode = if (eta - alpha).abs() <= tolerance || eta <= alpha {
            LowerMode::EtaEqualsAlpha
        } else {
            LowerMode::EtaGreater
        };
        match check_theorem_lower(&envelope_fits, alpha_fit, eta_fit, beta, mode, tolerance) {
            Ok(checks) => entry.lower_checks = checks,
            Err(e) => notes.push(format!("lower checks skipped: {e}")),
        }
    }

    if fits.len() >= 2 {
        entry.reverse_check = Some(check_reverse(&fits[1], &fits[0], beta, None, tolerance));
    }

    // monotonicity of the squared seminorms past the configured transient
    if let Some(alpha) = ledger.alpha_hat {
        for m in 0..=view.m_hat {
            let sq_pairs: Vec<(f64, f64)> = view
                .u_norm_series(m)
                .iter()
                .map(|&(t, v)| (t, v * v))
                .collect();
            let Ok(series_sq) = TimeSeries::from_pairs(&sq_pairs) else {
                continue;
            };
            let c_m = fits
                .get(m as usize)
                .map_or(f64::NAN, |f| f.prefactor);
            let f_m = ledger
                .h3_forcing
                .f_m_hat
                .get(m as usize)
                .copied()
                .unwrap_or(0.0);
            match check_monotone_zm(
                &series_sq,
                m,
                alpha,
                beta,
                c_m,
                f_m,
                transient.monotonicity_start,
            ) {
                Ok(report) => entry.monotonicity.push(report),
                Err(e) => notes.push(format!("monotonicity check for m = {m} skipped: {e}")),
            }
        }
    }

    entry.fits = (0..=view.m_hat as usize)
        .map(|m| fits.get(m).cloned())
        .collect();
    entry.envelope_fits = (0..=view.m_hat as usize)
        .map(|m| envelope_fits.get(m).cloned())
        .collect();
    entry.hypothesis = Some(ledger);
    entry.notes = notes;
    entry
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Unified time-series CSV: t, ‖Dᵐu‖ ascending m, then ‖Dᵐb‖ for MHD, then
/// g_m ratios, then diagnostics. Header row mandatory; flagged g samples are
/// written as nan.
pub fn write_series_csv(path: &Path, record: &RunRecord) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);

    let m_hat = record.m_hat;
    let has_b = record.samples.iter().any(|s| s.b_norms.is_some());
    let has_leray = record.samples.iter().any(|s| s.leray_residual.is_some());
    let has_forcing = record.samples.iter().any(|s| s.forcing_norms.is_some());

    let mut header = vec!["t".to_string()];
    header.extend((0..=m_hat).map(|m| format!("u_norm_{m}")));
    if has_b {
        header.extend((0..=m_hat).map(|m| format!("b_norm_{m}")));
    }
    header.extend((0..m_hat).map(|m| format!("g_{m}")));
    header.push("energy_orthogonality".into());
    header.push("energy_residual".into());
    if has_leray {
        header.push("leray_residual".into());
    }
    if has_forcing {
        header.extend((0..=m_hat).map(|m| format!("forcing_norm_{m}")));
    }
    writeln!(w, "{}", header.join(","))?;

    for row in &record.samples {
        let mut cells = vec![format!("{}", row.t)];
        cells.extend(row.u_norms.iter().map(|v| format!("{v}")));
        if has_b {
            match &row.b_norms {
                Some(b) => cells.extend(b.iter().map(|v| format!("{v}"))),
                None => cells.extend((0..=m_hat).map(|_| "nan".to_string())),
            }
        }
        cells.extend(
            row.g_ratios
                .iter()
                .map(|g| g.map_or("nan".to_string(), |v| format!("{v}"))),
        );
        cells.push(format!("{}", row.energy_orthogonality));
        cells.push(format!("{}", row.energy_residual));
        if has_leray {
            cells.push(
                row.leray_residual
                    .map_or("nan".to_string(), |v| format!("{v}")),
            );
        }
        if has_forcing {
            match &row.forcing_norms {
                Some(f) => cells.extend(f.iter().map(|v| format!("{v}"))),
                None => cells.extend((0..=m_hat).map(|_| "nan".to_string())),
            }
        }
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Oracle CSV: t followed by the squared seminorms ‖Dᵐu‖² ascending m.
pub fn write_oracle_csv(path: &Path, curves: &[OracleCurve]) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    let mut header = vec!["t".to_string()];
    header.extend(curves.iter().map(|c| format!("u_norm_sq_{}", c.order)));
    writeln!(w, "{}", header.join(","))?;
    let times = &curves[0].times;
    for (i, &t) in times.iter().enumerate() {
        let mut cells = vec![format!("{t}")];
        cells.extend(curves.iter().map(|c| format!("{}", c.values[i])));
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}
