use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn config(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "configs", name].iter().collect();
    p.to_str().unwrap().to_owned()
}

fn nctorus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nctorus")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

#[test]
fn q3_config_passes() {
    let out = nctorus(&["check-factor-system", "--config", &config("q3torus.json"), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["passed"], true);
    assert!(r["checked"].as_u64().unwrap() > 1000);
}

#[test]
fn corrupted_omega_exits_one_with_counterexample() {
    let out = nctorus(&["check-factor-system", "--config", &config("q3torus_corrupted.json"), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["passed"], false);
    assert!(r["counterexample"]["law"].as_str().unwrap().contains("omega"));
}

#[test]
fn malformed_input_exits_two() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_nctorus"))
        .args(["check-factor-system", "--config", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"{\"n\": 3, \"theta\": [").unwrap();
    assert_eq!(child.wait_with_output().unwrap().status.code(), Some(2));

    let out = nctorus(&["check-factor-system", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = nctorus(&["demo", "q3torus", "--theta", "1/4,x,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn automorphism_lifts() {
    for name in ["lift_identity.json", "lift_diagonal.json", "lift_inner.json"] {
        let out = nctorus(&["lift", "--config", &config(name), "--json"]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stdout));
        assert_eq!(json(&out)["passed"], true, "{name}");
    }
}

#[test]
fn synthetic_obstruction_exits_one() {
    let out = nctorus(&["lift", "--config", &config("lift_obstructed.json"), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["details"]["obstruction"]["certified"], true);
}

#[test]
fn derivation_lifts() {
    for name in ["derivation_delta1.json", "derivation_gauge.json"] {
        let out = nctorus(&["lift-derivation", "--config", &config(name), "--json"]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stdout));
    }
    let out = nctorus(&["lift-derivation", "--config", &config("derivation_wrong.json"), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["counterexample"]["law"].as_str().unwrap().contains("gamma"));
}

#[test]
fn curvature_vanishes_for_coordinate_derivations() {
    let out = nctorus(&["curvature", "--config", &config("curvature.json"), "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn reports_are_deterministic() {
    let args = ["lift", "--config", &config("lift_inner.json"), "--json", "--seed", "5"];
    let a = nctorus(&args);
    let b = nctorus(&args);
    assert_eq!(a.stdout, b.stdout);
    let a = nctorus(&["demo", "q3torus", "--range", "2", "--json"]);
    let b = nctorus(&["demo", "q3torus", "--range", "2", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
}

#[test]
fn text_demo_shows_phase_table() {
    let out = nctorus(&["demo", "q3torus", "--range", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("q13^-1*u1"), "{text}");
    assert_eq!(out.status.code(), Some(0));
}
