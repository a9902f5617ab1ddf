use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use fiberwise_ffi::*;

fn last_error() -> String {
    let p = fw_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn builtins_are_listed() {
    assert_eq!(fw_builtin_count(), 4);
    let first = unsafe { CStr::from_ptr(fw_builtin_name(0)) };
    assert_eq!(first.to_str().unwrap(), "example1_random_shift");
    assert!(fw_builtin_name(4).is_null());
    assert!(!fw_version().is_null());
}

#[test]
fn isometry_runs_and_refutes() {
    let name = CString::new("example2_isometry").unwrap();
    let mut scenario = ptr::null_mut();
    assert_eq!(unsafe { fw_scenario_load(name.as_ptr(), &mut scenario) }, FwStatus::Ok);
    assert!(fw_last_error().is_null());

    let mut report = ptr::null_mut();
    assert_eq!(unsafe { fw_scenario_run(scenario, &mut report) }, FwStatus::Ok);
    assert_eq!(unsafe { fw_report_diagnostic_count(report) }, 5);
    assert_eq!(unsafe { fw_report_verdict(report, 0) }, FwVerdict::Refuted);
    assert_eq!(unsafe { fw_report_verdict(report, 3) }, FwVerdict::None);
    assert_eq!(unsafe { fw_report_verdict(report, 99) }, FwVerdict::None);

    let json = unsafe { fw_report_emit(report, FwFormat::Json) };
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["scenario"], "example2_isometry");

    let csv = unsafe { fw_report_emit(report, FwFormat::Csv) };
    let tables = unsafe { CStr::from_ptr(csv) }.to_str().unwrap().to_owned();
    assert!(tables.contains("w_id,n,depth,defect"));

    unsafe {
        fw_string_free(json);
        fw_string_free(csv);
        fw_report_free(report);
        fw_scenario_free(scenario);
    }
}

#[test]
fn bad_config_reports_every_problem() {
    let text = CString::new(
        r#"{"preset": "example1_random_shift", "diagnostics": [{"expansive": {"depth": 0, "base_samples": 0, "fiber_samples": 1, "seed": 1}}]}"#,
    )
    .unwrap();
    let mut scenario = ptr::null_mut();
    assert_eq!(unsafe { fw_scenario_load(text.as_ptr(), &mut scenario) }, FwStatus::InvalidConfig);
    assert!(scenario.is_null());
    let msg = last_error();
    assert!(msg.contains("diagnostics[0].expansive.depth"), "{msg}");
    assert!(msg.contains("diagnostics[0].expansive.base_samples"), "{msg}");
}

#[test]
fn null_arguments_are_rejected() {
    let mut scenario = ptr::null_mut();
    assert_eq!(unsafe { fw_scenario_load(ptr::null(), &mut scenario) }, FwStatus::NullPointer);
    let name = CString::new("example2_isometry").unwrap();
    assert_eq!(unsafe { fw_scenario_load(name.as_ptr(), ptr::null_mut()) }, FwStatus::NullPointer);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { fw_scenario_run(ptr::null(), &mut report) }, FwStatus::NullPointer);
    assert!(unsafe { fw_report_emit(ptr::null(), FwFormat::Json) }.is_null());
    unsafe {
        fw_report_free(ptr::null_mut());
        fw_scenario_free(ptr::null_mut());
        fw_string_free(ptr::null_mut());
    }
}

#[test]
fn invalid_utf8_is_rejected() {
    let bytes = CString::new(vec![0xffu8, 0xfe]).unwrap();
    let mut scenario = ptr::null_mut();
    assert_eq!(unsafe { fw_scenario_load(bytes.as_ptr(), &mut scenario) }, FwStatus::InvalidUtf8);
}

#[test]
fn seed_override_round_trips() {
    let name = CString::new("example1_random_shift").unwrap();
    let mut scenario = ptr::null_mut();
    assert_eq!(unsafe { fw_scenario_load(name.as_ptr(), &mut scenario) }, FwStatus::Ok);
    assert_eq!(unsafe { fw_scenario_set_seed(scenario, 77) }, FwStatus::Ok);
    let json = unsafe { fw_scenario_json(scenario) };
    let doc: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(json) }.to_str().unwrap()).unwrap();
    for d in doc["diagnostics"].as_array().unwrap() {
        let params = d.as_object().unwrap().values().next().unwrap();
        assert_eq!(params["seed"], 77);
    }
    unsafe {
        fw_string_free(json);
        fw_scenario_free(scenario);
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/fiberwise.h");
    let text = std::fs::read_to_string(header).unwrap();
    for f in ["fw_scenario_load", "fw_scenario_run", "fw_report_emit", "fw_last_error", "fw_string_free"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let status = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .status()
        .expect("a C compiler is on PATH");
    assert!(status.success());
}
