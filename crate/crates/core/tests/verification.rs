use triality_core::measures::{EntropyBase, EvalPath};
use triality_core::model::ModelParams;
use triality_core::verification::{run_all, scan, ScanConfig};
use triality_core::Error;

const EXPECTED_CHECKS: [&str; 14] = [
    "appendix_fd_agreement",
    "appendix_ratio_positive",
    "appendix_width_bound",
    "choi_positivity",
    "closed_form_agreement",
    "fuchs_van_de_graaf",
    "isometry_residual",
    "kraus_completeness",
    "monotone_d_increasing",
    "monotone_s_increasing",
    "monotone_v0_decreasing",
    "monotone_v_decreasing",
    "triality",
    "vd_identity",
];

#[test]
fn default_report_passes_every_check() {
    let report = run_all(&ScanConfig::default()).unwrap();
    let names: Vec<&str> = report.checks().iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, EXPECTED_CHECKS);
    for c in report.checks() {
        assert!(c.passed, "{c:?}");
        assert!(c.worst_margin.is_finite());
    }
    assert!(report.all_passed());
}

#[test]
fn triality_margin_is_smallest_next_to_the_origin() {
    let report = run_all(&ScanConfig::default()).unwrap();
    let t = report.get("triality").unwrap();
    // first positive grid point, 4.79/999
    assert!((t.tau_at_worst - 4.79 / 999.0).abs() < 1e-15);
    assert!(t.worst_margin > 4e-3 && t.worst_margin < 5e-3, "{t:?}");
}

#[test]
fn verdicts_do_not_depend_on_grid_resolution() {
    let verdicts = |steps| {
        let report = run_all(&ScanConfig {
            steps,
            ..ScanConfig::default()
        })
        .unwrap();
        report
            .checks()
            .iter()
            .map(|c| (c.name.clone(), c.passed))
            .collect::<Vec<_>>()
    };
    assert_eq!(verdicts(10), verdicts(1000));
}

#[test]
fn worst_locations_are_stable_under_refinement() {
    let coarse = run_all(&ScanConfig {
        steps: 1000,
        ..ScanConfig::default()
    })
    .unwrap();
    let fine = run_all(&ScanConfig {
        steps: 10_000,
        ..ScanConfig::default()
    })
    .unwrap();
    let coarse_step = 4.79 / 999.0;
    for (c, f) in coarse.checks().iter().zip(fine.checks()) {
        assert_eq!(c.passed, f.passed, "{}", c.name);
        if c.name.starts_with("monotone") || c.name.starts_with("choi") || c.name.starts_with("kraus") || c.name.starts_with("isometry") {
            // step-size and sample dependent margins; locations are not comparable
            continue;
        }
        if c.name == "closed_form_agreement" || c.name == "vd_identity" || c.name == "appendix_fd_agreement" {
            // roundoff-noise maxima
            continue;
        }
        assert!(
            (c.tau_at_worst - f.tau_at_worst).abs() <= coarse_step,
            "{}: {} vs {}",
            c.name,
            c.tau_at_worst,
            f.tau_at_worst
        );
    }
}

#[test]
fn binary_entropy_breaks_the_triality_check_only() {
    let report = run_all(&ScanConfig {
        entropy_base: EntropyBase::Binary,
        ..ScanConfig::default()
    })
    .unwrap();
    assert!(!report.all_passed());
    let t = report.get("triality").unwrap();
    assert!(!t.passed);
    assert!(t.worst_margin < -0.2);
    for c in report.checks().iter().filter(|c| c.name != "triality") {
        assert!(c.passed, "{c:?}");
    }
}

#[test]
fn degenerate_widths_are_rejected() {
    let p = ModelParams::default().with_widths(1.0, 1.0);
    assert!(matches!(
        run_all(&ScanConfig::new(p)),
        Err(Error::DegenerateWidths { .. })
    ));
}

#[test]
fn parallel_and_serial_scans_are_bitwise_identical() {
    for path in [EvalPath::Matrix, EvalPath::ClosedForm] {
        let par = scan(&ScanConfig {
            path,
            parallel: true,
            ..ScanConfig::default()
        })
        .unwrap();
        let ser = scan(&ScanConfig {
            path,
            parallel: false,
            ..ScanConfig::default()
        })
        .unwrap();
        assert_eq!(par.len(), ser.len());
        for (a, b) in par.iter().zip(&ser) {
            assert_eq!(a.bundle.triality_sum.to_bits(), b.bundle.triality_sum.to_bits());
            assert_eq!(a, b);
        }
    }
}

#[test]
fn identical_configs_give_identical_reports() {
    let a = run_all(&ScanConfig::default()).unwrap();
    let b = run_all(&ScanConfig::default()).unwrap();
    assert_eq!(a.to_text(), b.to_text());
    assert_eq!(a.to_key_values(), b.to_key_values());
}

#[test]
fn slacks_are_recomputable_from_bundles() {
    for r in scan(&ScanConfig::default()).unwrap() {
        let b = r.bundle;
        assert_eq!(r.slack_triality, 1.0 - (b.v2() + b.d2() + b.s2()));
        assert!((b.triality_sum - (b.v2() + b.d2() + b.s2())).abs() <= 1e-14);
        assert_eq!(r.slack_fvg, (1.0 - b.d2()).sqrt() - b.visibility_v);
        assert!(r.slack_triality >= -1e-12 && r.slack_fvg >= -1e-12);
    }
}
