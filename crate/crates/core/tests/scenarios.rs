use fiberwise::exact::{q, Mass};
use fiberwise::expansivity::Notion;
use fiberwise::scenario::{
    builtin, builtin_names, emit_report, load_config, parse_config, run_scenario, OutputFormat, RunReport, REPORT_SCHEMA,
};
use fiberwise::Error;

const GRID_ON_ROTATION: &str = r#"{
  "preset": "example2_isometry",
  "disintegration": {"rule": "grid", "weights": [0.4, 0.3, 0.2, 0.1]},
  "diagnostics": [
    {"construct_invariant": {"n_max": 4, "base_samples": 2, "seed": 1,
      "expansive": {"depth": 5, "base_samples": 2, "fiber_samples": 1, "seed": 2}}},
    {"expansive": {"depth": 5, "base_samples": 2, "fiber_samples": 1, "seed": 3}}
  ]
}"#;

fn json_without_timing(report: &RunReport) -> String {
    let mut v = serde_json::to_value(report).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    serde_json::to_string_pretty(&v).unwrap()
}

fn notion_of(diagnostic: &str, report: &RunReport) -> Option<Notion> {
    let v = serde_json::to_value(report.outcome(diagnostic)?.result.as_ref()?).ok()?;
    serde_json::from_value(v["notion"].clone()).ok()
}

#[test]
fn registry_holds_the_four_examples() {
    assert_eq!(
        builtin_names(),
        ["example1_random_shift", "example2_isometry", "example3_expanding", "example4_continuum_mix"]
    );
}

#[test]
fn builtins_reproduce_golden_verdicts() {
    for name in builtin_names() {
        let b = builtin(name).unwrap();
        let report = run_scenario(&b.config()).unwrap();
        assert!(!report.failed(), "{name}: {:?}", report.results.iter().filter_map(|r| r.error.as_ref()).collect::<Vec<_>>());
        for (notion, verdict) in b.expected {
            let diagnostic = match notion {
                Notion::RandomExpansive | Notion::PositivelyRandomExpansive => "expansive",
                Notion::CountablyExpansive => "countable",
                Notion::ContinuumWise => "continuum_wise",
            };
            let outcome = report.outcome(diagnostic).unwrap();
            assert_eq!(outcome.verdict, Some(*verdict), "{name} {diagnostic}");
            assert_eq!(notion_of(diagnostic, &report), Some(*notion), "{name} {diagnostic}");
        }
    }
}

#[test]
fn expanding_example_is_consistent_with_theorem_a() {
    let report = run_scenario(&builtin("example3_expanding").unwrap().config()).unwrap();
    let v = serde_json::to_value(report.outcome("theorem_a").unwrap().result.as_ref().unwrap()).unwrap();
    assert_eq!(v["consistent"], true);
    for clause in v["clauses"].as_array().unwrap() {
        assert_eq!(clause["status"], "pass", "{clause}");
    }
}

#[test]
fn runs_are_deterministic() {
    let cfg = builtin("example1_random_shift").unwrap().config();
    let a = run_scenario(&cfg).unwrap();
    let b = run_scenario(&cfg).unwrap();
    assert_eq!(json_without_timing(&a), json_without_timing(&b));
    let mut b = b;
    b.timing = a.timing.clone();
    assert_eq!(emit_report(&a, OutputFormat::Json), emit_report(&b, OutputFormat::Json));
    assert_eq!(emit_report(&a, OutputFormat::Csv), emit_report(&b, OutputFormat::Csv));
}

#[test]
fn seed_override_changes_samples() {
    let mut cfg = builtin("example2_isometry").unwrap().config();
    let a = run_scenario(&cfg).unwrap();
    cfg.override_seed(99);
    let b = run_scenario(&cfg).unwrap();
    assert_ne!(json_without_timing(&a), json_without_timing(&b));
}

#[test]
fn json_report_reparses() {
    let report = run_scenario(&builtin("example2_isometry").unwrap().config()).unwrap();
    let files = emit_report(&report, OutputFormat::Json);
    assert_eq!(files.len(), 1);
    let v: serde_json::Value = serde_json::from_str(&files[0].contents).unwrap();
    assert_eq!(v["schema"], REPORT_SCHEMA);
    assert_eq!(v, serde_json::to_value(&report).unwrap());
    assert_eq!(parse_config(&v["config"].to_string()).unwrap(), report.config);
}

#[test]
fn csv_defect_curve_has_declared_header() {
    let report = run_scenario(&builtin("example2_isometry").unwrap().config()).unwrap();
    let files = emit_report(&report, OutputFormat::Csv);
    let defect = files.iter().find(|f| f.name.contains("construct_invariant")).unwrap();
    assert_eq!(defect.contents.lines().next(), Some("w_id,n,depth,defect"));
    assert!(defect.contents.lines().count() > 1);
}

#[test]
fn exact_masses_are_fraction_strings() {
    assert_eq!(serde_json::to_string(&Mass::Exact(q(1, 8))).unwrap(), "\"1/8\"");
    let cfg = parse_config(
        r#"{"preset": "example1_random_shift",
            "diagnostics": [{"expansive": {"depth": 6, "base_samples": 2, "fiber_samples": 1, "seed": 4}}]}"#,
    )
    .unwrap();
    let report = run_scenario(&cfg).unwrap();
    let csv = emit_report(&report, OutputFormat::Csv);
    let table = &csv.iter().find(|f| f.name.contains("expansive")).unwrap().contents;
    let upper = table.lines().nth(1).unwrap().split(',').nth(5).unwrap();
    assert!(upper.contains('/') || upper == "0" || upper == "1", "{upper}");
}

#[test]
fn diagnostic_errors_are_captured() {
    let cfg = parse_config(GRID_ON_ROTATION).unwrap();
    let report = run_scenario(&cfg).unwrap();
    assert!(report.failed());
    assert_eq!(report.results[0].status, "error");
    assert!(report.results[0].error.as_ref().unwrap().contains("not closed"));
    assert_eq!(report.results[1].status, "ok");
}

#[test]
fn unknown_keys_and_bad_values_are_itemized() {
    let text = r#"{"preset": "example3_expanding", "delta": {"constant": "-1/2"},
        "diagnostics": [{"entropy": {"n_max": 1, "samples": 0, "seed": 1}}]}"#;
    let Err(Error::Config(errs)) = parse_config(text) else { panic!("accepted") };
    assert!(errs.len() >= 3, "{errs:?}");
    assert!(errs.iter().any(|e| e.starts_with("delta")), "{errs:?}");
    assert!(errs.iter().any(|e| e.contains("diagnostics[0].entropy.n_max")), "{errs:?}");
    assert!(errs.iter().any(|e| e.contains("diagnostics[0].entropy.samples")), "{errs:?}");
}

#[test]
fn missing_seed_is_rejected() {
    let text = r#"{"preset": "example1_random_shift",
        "diagnostics": [{"expansive": {"depth": 4, "base_samples": 1, "fiber_samples": 1}}]}"#;
    let Err(Error::Config(errs)) = parse_config(text) else { panic!("accepted") };
    assert!(errs[0].contains("seed"), "{errs:?}");
}

#[test]
fn config_files_load_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let cfg = builtin("example4_continuum_mix").unwrap().config();
    std::fs::write(&path, cfg.to_json()).unwrap();
    assert_eq!(load_config(path.to_str().unwrap()).unwrap(), cfg);
    assert!(matches!(load_config("/nonexistent/file.json"), Err(Error::Io(_))));
}
