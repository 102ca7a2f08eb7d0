use kpsym::verify::{run, RunConfig, SUITES};

#[test]
fn every_suite_passes_with_defaults() {
    let cfg = RunConfig::default();
    for name in SUITES {
        let t = std::time::Instant::now();
        let report = run(name, &cfg).unwrap();
        eprintln!("{name}: {:?}", t.elapsed());
        assert!(report.passed, "{}", report.render_text());
    }
}

#[test]
fn unknown_suite_is_rejected() {
    assert!(run("nope", &RunConfig::default()).is_err());
}

#[test]
fn config_bounds() {
    let mut cfg = RunConfig {
        lambda_order: 7,
        ..RunConfig::default()
    };
    assert!(cfg.validate().is_err());
    cfg.lambda_order = 8;
    cfg.depth = 11;
    assert!(cfg.validate().is_err());
}

#[test]
fn json_report_round_trips() {
    let report = run("hirota", &RunConfig::default()).unwrap();
    let text = serde_json::to_string(&report).unwrap();
    let back: kpsym::verify::RunReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
}

#[test]
fn same_seed_same_report_different_seed_different_sample() {
    let mut cfg = RunConfig {
        seed: 7,
        ..RunConfig::default()
    };
    let a = run("dickey", &cfg).unwrap();
    assert_eq!(a, run("dickey", &cfg).unwrap());
    assert!(a.passed);
    cfg.seed = 8;
    assert_ne!(a.config, run("dickey", &cfg).unwrap().config);
}

#[test]
fn small_depths_do_not_fail_spuriously() {
    for depth in [1, 2, 3] {
        let cfg = RunConfig {
            depth,
            ..RunConfig::default()
        };
        for name in ["flows", "correspondence", "adjoint"] {
            let r = run(name, &cfg).unwrap();
            assert!(r.passed, "{}", r.render_text());
        }
    }
}
