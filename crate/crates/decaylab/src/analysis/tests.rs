use super::*;
use crate::models::{RunRecord, RunStatus, SampleRow};

fn power_series(c: f64, p: f64, t0: f64, t1: f64, n: usize) -> TimeSeries {
    let times = crate::heat_oracle::log_spaced_times(t0, t1, n);
    let values = times.iter().map(|&t| c * t.powf(p)).collect();
    TimeSeries::new(times, values).unwrap()
}

fn fit(exponent: f64) -> DecayFit {
    DecayFit {
        exponent,
        prefactor: 1.0,
        window: [1.0, 100.0],
        residual: 0.0,
        n_points: 10,
    }
}

mod fitting {
    use super::*;

    #[test]
    fn exact_power_law_is_recovered_to_machine_precision() {
        let series = power_series(7.0, -1.5, 1.0, 1000.0, 20);
        let fit = fit_exponent(&series, [1.0, 1000.0]).unwrap();
        assert!((fit.exponent + 1.5).abs() < 1e-10, "exponent {}", fit.exponent);
        assert!((fit.prefactor - 7.0).abs() < 1e-10 * 7.0);
        assert!(fit.residual < 1e-12);
        assert_eq!(fit.n_points, 20);
    }

    #[test]
    fn log_periodic_perturbation_stays_near_the_base_exponent() {
        let times = crate::heat_oracle::log_spaced_times(1.0, 1e4, 60);
        let values = times
            .iter()
            .map(|&t| t.powf(-1.0) * (1.0 + 0.01 * t.ln().sin()))
            .collect();
        let series = TimeSeries::new(times, values).unwrap();
        let fit = fit_exponent(&series, [1.0, 1e4]).unwrap();
        assert!(
            fit.exponent >= -1.02 && fit.exponent <= -0.98,
            "exponent {}",
            fit.exponent
        );
    }

    #[test]
    fn constant_series_has_zero_exponent() {
        let series = power_series(3.0, 0.0, 1.0, 100.0, 12);
        let fit = fit_exponent(&series, [1.0, 100.0]).unwrap();
        assert!(fit.exponent.abs() < 1e-12);
        assert!((fit.prefactor - 3.0).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_values_are_rejected() {
        let series = TimeSeries::new(vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![1.0, 0.5, 0.0, 0.2, 0.1])
            .unwrap();
        assert!(matches!(
            fit_exponent(&series, [1.0, 5.0]),
            Err(crate::Error::NonpositiveValue { .. })
        ));
    }

    #[test]
    fn short_windows_are_rejected() {
        let series = power_series(1.0, -1.0, 1.0, 100.0, 20);
        assert!(matches!(
            fit_exponent(&series, [1.0, 1.2]),
            Err(crate::Error::ShortWindow { .. })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            // fitting the fit's own reconstruction returns (C, p)
            #[test]
            fn fit_is_idempotent(
                c in 1e-3f64..1e3,
                p in -3.0f64..1.0,
            ) {
                let series = power_series(c, p, 0.5, 500.0, 24);
                let f = fit_exponent(&series, [0.5, 500.0]).unwrap();
                prop_assert!((f.exponent - p).abs() <= 1e-10);
                prop_assert!((f.prefactor - c).abs() <= 1e-10 * c);

                let rebuilt = power_series(f.prefactor, f.exponent, 0.5, 500.0, 24);
                let f2 = fit_exponent(&rebuilt, [0.5, 500.0]).unwrap();
                prop_assert!((f2.exponent - f.exponent).abs() <= 1e-10);
                prop_assert!((f2.prefactor - f.prefactor).abs() <= 1e-10 * f.prefactor);
            }
        }
    }
}

mod windows {
    use super::*;

    #[test]
    fn box_horizon_caps_the_window_end() {
        let series = power_series(1.0, -0.5, 0.1, 200.0, 40);
        let window = auto_window(
            &series,
            Some(BoxInfo {
                box_length: 200.0,
                nu: 1.0,
            }),
            &TransientPolicy::default(),
        )
        .unwrap();
        let expected = 0.1 * (200.0 / std::f64::consts::TAU).powi(2);
        assert!((window[1] - expected).abs() < 1e-9, "t1 = {}", window[1]);
        assert!((expected - 101.321).abs() < 1e-3);
        // first decade of the data is skipped
        assert!((window[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn window_collapse_reports_the_box_diagnostic() {
        let series = power_series(1.0, -0.5, 10.0, 2000.0, 30);
        // tiny box: horizon below the transient start
        let err = auto_window(
            &series,
            Some(BoxInfo {
                box_length: 10.0,
                nu: 1.0,
            }),
            &TransientPolicy::default(),
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("enlarge"), "diagnostic: {msg}");
    }

    #[test]
    fn oracle_curves_keep_the_full_range() {
        let series = power_series(1.0, -1.0, 100.0, 10_000.0, 25);
        let window = auto_window(&series, None, &TransientPolicy::default()).unwrap();
        assert_eq!(window, [100.0, 10_000.0]);
    }

    #[test]
    fn envelope_takes_per_decade_minima() {
        // one dip per decade well below the trend
        let times: Vec<f64> = (0..40).map(|i| 1.0 * 1.26f64.powi(i)).collect();
        let values: Vec<f64> = times
            .iter()
            .enumerate()
            .map(|(i, &t)| if i % 10 == 7 { 0.2 * t.powf(-1.0) } else { t.powf(-1.0) })
            .collect();
        let series = TimeSeries::new(times.clone(), values).unwrap();
        let window = [1.0, *times.last().unwrap()];
        let env = lower_envelope(&series, window, 4).unwrap();
        assert!(env.len() >= 4);
        // every envelope point is a dip
        for (t, y) in env.pairs() {
            assert!(y <= 0.2 * t.powf(-1.0) * (1.0 + 1e-12), "({t}, {y}) is not a dip");
        }
    }

    #[test]
    fn envelope_refines_bins_for_short_windows() {
        let series = power_series(1.0, -1.0, 100.0, 10_000.0, 30);
        // 2 decades but 5 bins requested: bins refine to 10^(1/3)
        let env = lower_envelope(&series, [100.0, 10_000.0], 5).unwrap();
        assert!(env.len() >= 5, "envelope has {} points", env.len());
    }
}

mod verdicts {
    use super::*;

    #[test]
    fn upper_checks_pass_on_the_exact_rate_ladder() {
        let fits = [fit(-0.5), fit(-1.0), fit(-1.5)];
        let checks = check_theorem_upper(&fits, None, 0.05).unwrap();
        assert_eq!(checks.len(), 3);
        assert!(checks.iter().all(|c| c.passed()));
        assert_eq!(checks[2].predicted_exponent, -1.5);
    }

    #[test]
    fn upper_checks_allow_faster_decay_but_not_slower() {
        let faster = [fit(-0.5), fit(-1.3)];
        assert!(check_theorem_upper(&faster, None, 0.05).unwrap()[1].passed());
        let slower = [fit(-0.5), fit(-0.8)];
        assert_eq!(
            check_theorem_upper(&slower, None, 0.05).unwrap()[1].verdict,
            Verdict::Fail
        );
    }

    #[test]
    fn forcing_premise_gates_the_upper_checks() {
        let fits = [fit(-0.5), fit(-1.0)];
        // beta = alpha + 0.5 < alpha + 1
        let checks = check_theorem_upper(&fits, Some(1.0), 0.05).unwrap();
        assert!(checks.iter().all(|c| c.verdict == Verdict::PremisesUnmet));
        // unforced: vacuous premise, checks proceed
        let checks = check_theorem_upper(&fits, None, 0.05).unwrap();
        assert!(checks.iter().all(|c| c.passed()));
    }

    #[test]
    fn matched_lower_checks_pass_on_exact_rates() {
        let envelope = [fit(-0.5), fit(-1.0), fit(-1.5)];
        let checks = check_theorem_lower(
            &envelope,
            &fit(-0.5),
            &fit(-0.5),
            None,
            LowerMode::EtaEqualsAlpha,
            0.05,
        )
        .unwrap();
        assert!(checks.iter().all(|c| c.passed()));
    }

    #[test]
    fn stretched_lower_checks_pass_on_the_constructed_rate() {
        // eta = 2 alpha = 1, q = 2: orders decay at -(eta + m q/2) = -(1 + m)
        let envelope = [fit(-1.0), fit(-2.0), fit(-3.0)];
        let checks = check_theorem_lower(
            &envelope,
            &fit(-0.5),
            &fit(-1.0),
            Some(100.0),
            LowerMode::EtaGreater,
            1e-6,
        )
        .unwrap();
        assert!(checks.iter().all(|c| c.passed()), "checks: {checks:#?}");
    }

    #[test]
    fn stretched_beta_premise_is_enforced() {
        let envelope = [fit(-1.0), fit(-2.0), fit(-3.0)];
        // bound = 2 eta - alpha + (q-1) m_hat + 1 = 2 - 0.5 + 2 + 1 = 4.5
        let checks = check_theorem_lower(
            &envelope,
            &fit(-0.5),
            &fit(-1.0),
            Some(4.0),
            LowerMode::EtaGreater,
            1e-6,
        )
        .unwrap();
        assert!(checks
            .iter()
            .all(|c| c.verdict == Verdict::PremisesUnmet));
    }

    #[test]
    fn inconsistent_eta_below_alpha_is_premises_unmet() {
        let envelope = [fit(-0.3), fit(-0.8)];
        let checks = check_theorem_lower(
            &envelope,
            &fit(-0.5),
            &fit(-0.3), // eta_hat = 0.3 < alpha_hat = 0.5
            None,
            LowerMode::EtaEqualsAlpha,
            0.05,
        )
        .unwrap();
        assert!(checks
            .iter()
            .all(|c| c.verdict == Verdict::PremisesUnmet));
    }

    #[test]
    fn reverse_check_recovers_the_half_shift() {
        let check = check_reverse(&fit(-1.0), &fit(-0.5), None, None, 1e-8);
        assert!(check.passed(), "{check:#?}");
        assert_eq!(check.predicted_exponent, -0.5);
    }

    #[test]
    fn reverse_check_rejects_alpha1_at_0_4() {
        let check = check_reverse(&fit(-0.4), &fit(0.1), None, None, 0.05);
        assert_eq!(check.verdict, Verdict::PremisesUnmet);
    }

    #[test]
    fn reverse_borderline_beta_relaxes_the_prediction() {
        let check = check_reverse(&fit(-1.0), &fit(-0.45), Some(1.5), Some(0.05), 1e-8);
        assert_eq!(check.predicted_exponent, -0.45);
        assert!(check.passed());
    }

    #[test]
    fn reverse_check_is_two_sided() {
        // measured decay faster than the pinned rate must fail too
        let check = check_reverse(&fit(-1.0), &fit(-0.8), None, None, 0.05);
        assert_eq!(check.verdict, Verdict::Fail);
    }
}

mod monotonicity {
    use super::*;

    #[test]
    fn heat_oracle_curves_have_no_violations() {
        let spec = crate::heat_oracle::synthetic_radial_spectrum(2, 0.0, 1.0, 1.0, 512).unwrap();
        let times: Vec<f64> = (1..=60).map(|i| i as f64).collect();
        for m in 0..=2u32 {
            let curve = crate::heat_oracle::evolve_curve(&spec, m, 1.0, &times).unwrap();
            let series = TimeSeries::new(curve.times.clone(), curve.values.clone()).unwrap();
            let report = check_monotone_zm(&series, m, 0.5, None, 1.0, 0.0, 0.0).unwrap();
            assert_eq!(report.k_constant, 0.0);
            assert!(report.violations.is_empty(), "m = {m}: {report:?}");
        }
    }

    #[test]
    fn injected_increase_is_reported_exactly_once() {
        let times: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let mut values: Vec<f64> = times.iter().map(|&t| t.powf(-1.0)).collect();
        values[10] = values[9] * (1.0 + 1e-9); // single rise above the 1e-10 gate
        let series = TimeSeries::new(times, values).unwrap();
        let report = check_monotone_zm(&series, 0, 1.0, None, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].0, 11.0);
        assert!(report.max_violation > 0.0);
    }

    #[test]
    fn forced_constant_requires_a_valid_denominator() {
        let series = power_series(1.0, -1.0, 1.0, 100.0, 10);
        // alpha + beta + m - 1 = 0.2 + 0.3 + 0 - 1 < 0
        assert!(matches!(
            check_monotone_zm(&series, 0, 0.2, Some(0.3), 1.0, 1.0, 0.0),
            Err(crate::Error::InvalidMonotonicityConstant(_))
        ));
        // unforced: F_m = 0 forces K = 0 even with a pathological beta
        let report = check_monotone_zm(&series, 0, 0.2, Some(0.3), 1.0, 0.0, 0.0).unwrap();
        assert_eq!(report.k_constant, 0.0);
    }

    #[test]
    fn samples_before_a_m_are_ignored() {
        let times: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let mut values: Vec<f64> = times.iter().map(|&t| t.powf(-1.0)).collect();
        values[2] *= 1.5; // bump inside the transient
        let series = TimeSeries::new(times, values).unwrap();
        let report = check_monotone_zm(&series, 0, 1.0, None, 1.0, 0.0, 5.0).unwrap();
        assert!(report.violations.is_empty());
    }
}

mod ledger_assembly {
    use super::*;

    fn synthetic_record(forced: bool) -> RunRecord {
        let times: Vec<f64> = (1..=40).map(|i| i as f64 * 2.5).collect();
        let samples = times
            .iter()
            .map(|&t| SampleRow {
                t,
                u_norms: vec![t.powf(-0.5), t.powf(-1.0), t.powf(-1.5)],
                b_norms: None,
                g_ratios: vec![Some(1e-13), Some(0.3 * t.powf(-0.5))],
                energy_orthogonality: 1e-14,
                energy_residual: 1e-12,
                leray_residual: None,
                forcing_norms: forced
                    .then(|| vec![t.powf(-2.0), 0.5 * t.powf(-2.5), 0.3 * t.powf(-3.0)]),
            })
            .collect();
        RunRecord {
            model: "adv-diff".into(),
            m_hat: 2,
            samples,
            warnings: vec![],
            status: RunStatus::Ok,
            config: serde_json::json!({}),
            meta: Default::default(),
        }
    }

    #[test]
    fn unforced_ledger_uses_the_infinite_beta_sentinel() {
        let report = hypothesis_ledger(&synthetic_record(false), [2.5, 100.0]);
        assert!(!report.h3_forcing.forced);
        assert!(report.h3_forcing.beta_hat.is_none());
        assert!(report.h3_forcing.f_m_hat.iter().all(|&f| f == 0.0));
        let alpha = report.alpha_hat.unwrap();
        assert!((alpha - 0.5).abs() < 1e-10);
        let eta = report.eta_hat.unwrap();
        assert!((eta - 0.5).abs() < 1e-10);
    }

    #[test]
    fn forced_ledger_fits_beta_and_prefactors() {
        let report = hypothesis_ledger(&synthetic_record(true), [2.5, 100.0]);
        assert!(report.h3_forcing.forced);
        let beta = report.h3_forcing.beta_hat.unwrap();
        assert!((beta - 2.0).abs() < 1e-9, "beta_hat = {beta}");
        assert!((report.h3_forcing.f_m_hat[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn g_trends_report_direction_and_negligibility() {
        let report = hypothesis_ledger(&synthetic_record(false), [2.5, 100.0]);
        assert_eq!(report.h2_trends.len(), 2);
        assert!(report.h2_trends[0].negligible);
        let g1 = &report.h2_trends[1];
        assert!(!g1.negligible);
        assert!(g1.trend_statistic.unwrap() < -0.9, "g1 should trend down");
    }
}
