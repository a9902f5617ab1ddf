use std::process::Command;

fn fiberwise() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fiberwise"));
    c.env_remove("FIBERWISE_OUT_DIR");
    c
}

#[test]
fn list_prints_builtins() {
    let out = fiberwise().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.contains("example4_continuum_mix"));
}

#[test]
fn run_writes_json_to_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let status = fiberwise().args(["run", "example2_isometry", "--out"]).arg(dir.path()).status().unwrap();
    assert_eq!(status.code(), Some(0), "a refuted verdict is still success");
    let text = std::fs::read_to_string(dir.path().join("example2_isometry.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["results"][0]["verdict"], "refuted");
}

#[test]
fn env_var_sets_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let status = fiberwise()
        .env("FIBERWISE_OUT_DIR", dir.path())
        .args(["run", "example4_continuum_mix", "--format", "csv"])
        .status()
        .unwrap();
    assert!(status.success());
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(names.len(), 3, "{names:?}");
    assert!(names.iter().all(|n| n.ends_with(".csv")));
}

#[test]
fn seed_flag_overrides_config() {
    let run = |seed: &str| {
        let out = fiberwise().args(["run", "example2_isometry", "--seed", seed]).output().unwrap();
        assert!(out.status.success());
        let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    let a = run("5");
    assert_eq!(a, run("5"));
    assert_ne!(a, run("6"));
    assert_eq!(a["config"]["diagnostics"][0]["expansive"]["seed"], 5);
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"preset": "example1_random_shift"}"#).unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"preset": "example1_random_shift", "diagnostics": [{"expansive": {"depth": -3, "base_samples": 1, "fiber_samples": 1, "seed": 1}}]}"#)
        .unwrap();

    assert_eq!(fiberwise().arg("validate").arg(&good).status().unwrap().code(), Some(0));
    let out = fiberwise().arg("validate").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diagnostics[0].expansive.depth"));
}

#[test]
fn diagnostic_failure_exits_two() {
    let cfg = r#"{"preset": "example2_isometry",
        "disintegration": {"rule": "grid", "weights": [0.4, 0.3, 0.2, 0.1]},
        "diagnostics": [{"construct_invariant": {"n_max": 2, "base_samples": 1, "seed": 1,
            "expansive": {"depth": 4, "base_samples": 1, "fiber_samples": 1, "seed": 2}}}]}"#;
    let out = fiberwise().args(["run", cfg]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"][0]["status"], "error");
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let status = fiberwise().args(["run", "example4_continuum_mix", "--out"]).arg(&blocker).status().unwrap();
    assert_eq!(status.code(), Some(2));
}
