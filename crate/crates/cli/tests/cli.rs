use std::path::Path;
use std::process::{Command, Output};

fn addicone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_addicone")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn zero_var_json_lists_facets_and_rays() {
    let o = addicone(&["report", "zero-var", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let facets: Vec<&str> = v["facet_formulas"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert_eq!(facets, ["a_BE >= 0", "a_E + a_BE >= 0", "a_B + a_BE >= 0", "a_B + a_E + a_BE >= 0"]);
    let rays: Vec<&str> = v["rays"].as_array().unwrap().iter().map(|r| r["formula"].as_str().unwrap()).collect();
    assert_eq!(rays, ["H(E|B)", "H(B|E)", "H(E)", "H(B)"]);
    assert!(v["rays"].as_array().unwrap().iter().all(|r| r["verified"] == true));
}

#[test]
fn reports_are_byte_stable() {
    for target in ["one-var:ALL", "esv-tables", "decouplings"] {
        for format in ["json", "markdown", "csv"] {
            let a = addicone(&["report", target, "--format", format]);
            let b = addicone(&["report", target, "--format", format]);
            assert!(a.status.success(), "{target} {format}");
            assert_eq!(a.stdout, b.stdout, "{target} {format}");
        }
    }
}

#[test]
fn one_var_markdown_has_seven_rows() {
    let o = addicone(&["report", "one-var:ALL", "--format", "md"]);
    let text = stdout(&o);
    let table: Vec<&str> = text.lines().skip_while(|l| !l.starts_with("| Case")).take_while(|l| l.starts_with('|')).collect();
    assert_eq!(table.len(), 2 + 7);
    assert!(table[2].contains("| 1 | (3,3) |"));
    assert!(text.contains("±[H(BV) - H(EV)]"));
}

#[test]
fn decouplings_json_has_sixteen_codes() {
    let o = addicone(&["report", "decouplings", "--aux", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["codes"].as_array().unwrap().len(), 16);
    assert_eq!(v["cases"].as_array().unwrap().len(), 5);
}

#[test]
fn invalid_targets_exit_two() {
    assert_eq!(addicone(&["report", "nonsense"]).status.code(), Some(2));
    assert_eq!(addicone(&["report", "one-var:(4,4)"]).status.code(), Some(2));
    assert_eq!(addicone(&["report"]).status.code(), Some(2));
}

#[test]
fn thread_cap_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_addicone")).args(["report", "zero-var"]).env("ADDICONE_THREADS", "x").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_addicone")).args(["report", "zero-var"]).env("ADDICONE_THREADS", "1").output().unwrap();
    assert!(o.status.success());
}

#[test]
fn verify_suites_pass() {
    let o = addicone(&["verify", "all", "--samples", "10", "--seed", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["failed"], 0);
    assert!(v["total"].as_u64().unwrap() > 100);
    assert!(v["first_failure"].is_null());
}

#[test]
fn manifest_replays_identically() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = addicone(&["report", "multi-var:2,(1,2)(2,0)", "--format", "json", "--out", d]);
    assert!(o.status.success());
    let manifest = Path::new(d).join("multi-var-2-1-2_2-0.manifest.json");
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["outputs"][0]["path"], "multi-var-2-1-2_2-0.json");
    assert_eq!(addicone(&["replay", manifest.to_str().unwrap()]).status.code(), Some(0));

    let mut tampered = m.clone();
    tampered["outputs"][0]["sha256"] = "00".into();
    let bad = Path::new(d).join("bad.json");
    std::fs::write(&bad, tampered.to_string()).unwrap();
    assert_eq!(addicone(&["replay", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn lab_maximize_reports_a_reproducible_lower_bound() {
    let args = ["lab", "maximize", "--library", "identity:2", "--formula", "H(B) - H(E)", "--restarts", "2", "--iterations", "80"];
    let a = addicone(&args);
    let b = addicone(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert!((v["result"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-4);
}

#[test]
fn lab_degradability_flags_swap_channel() {
    let o = addicone(&["lab", "degradability", "--library", "swap:2", "--samples", "10", "--restarts", "2", "--iterations", "50"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["check"]["verdict"], "violated");
}

#[test]
fn lab_reads_kraus_channel_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dephasing.json");
    std::fs::write(&path, r#"{"kraus":[{"re":[[1,0],[0,0]]},{"re":[[0,0],[0,1]]}]}"#).unwrap();
    let o = addicone(&["lab", "degradability", "--channel", path.to_str().unwrap(), "--samples", "10", "--restarts", "2", "--iterations", "50"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["check"]["verdict"], "no_violation_found");
}
