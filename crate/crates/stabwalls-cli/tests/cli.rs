use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabwalls"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(v["schema"], 1);
    v
}

#[test]
fn invariants_report_exact_values() {
    let v = json(&["invariants", "1,0,-1,1"]);
    assert_eq!(v["q_tilt"], "2");
    assert_eq!(v["q_quartic"], "-1");
    assert_eq!(v["chi"], "0");
    let v = json(&["invariants", "2,0,-1,0"]);
    assert_eq!(v["q_tilt"], "4");
    assert_eq!(v["q_quartic"], "16");
    assert_eq!(v["chi"], "0");
}

#[test]
fn zero_character_is_rejected() {
    let out = run(&["invariants", "0,0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero character"));
}

#[test]
fn decimal_s_is_rejected() {
    let out = run(&["wall", "--u", "1,-1,1/2,-1/6", "--v", "1,0,-1,1", "--s", "0.01", "--no-trace"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn proportional_wall_is_an_input_error() {
    let out = run(&["wall", "--u", "2,0,-2,2", "--v", "1,0,-1,1", "--s", "1/3", "--no-trace"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("proportional"));
}

#[test]
fn ideal_line_dossier() {
    let d = json(&["wall", "--u", "1,-1,1/2,-1/6", "--v", "1,0,-1,1", "--s", "1/3", "--no-trace"]);
    let theta = d["theta_crossings"].as_array().unwrap();
    assert!(theta
        .iter()
        .any(|c| c["beta"]["lo"] == "-3/2" && c["beta"]["hi"] == "-3/2" && c["alpha_sq"]["lo"] == "1/4"));
    let gamma = d["gamma_crossings"].as_array().unwrap();
    assert!(gamma
        .iter()
        .any(|c| c["beta"]["lo"] == "-2" && c["alpha_sq"]["lo"] == "1/3" && c["branch"] == "minus"));
    assert_eq!(d["nu_wall"]["center"], "-3/2");
    assert_eq!(d["trace"], Value::Null);
}

#[test]
fn wall_trace_component_counts_and_exports() {
    let dir = std::env::temp_dir().join(format!("stabwalls-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("trace.csv");
    let svg = dir.join("trace.svg");
    for (s, count) in [("1/100", 2), ("5/2", 1)] {
        let d = json(&[
            "wall",
            "--u",
            "0,0,-1,1",
            "--v",
            "2,0,-3,0",
            "--s",
            s,
            "--step",
            "1/32",
            "--csv",
            csv.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert_eq!(d["trace"]["component_count"], count, "s = {s}");
        assert_eq!(d["trace"]["certified"], true);
    }
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("component,beta,alpha\n"));
    let doc = fs::read_to_string(&svg).unwrap();
    assert!(doc.contains("viewBox=\"0 0 800 500\""));
    assert!(doc.contains("#000000"));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn enumerate_pseudo_instanton() {
    let d = json(&["enumerate", "pseudo", "--v", "2,0,-1,0", "--s", "1/3", "--beta", "-2"]);
    assert_eq!(d["candidate_count"], 4);
    assert_eq!(d["distinct_walls"], 3);
    assert_eq!(d["point"]["alpha_sq"], "1/3");
    let us: Vec<&str> = d["candidates"].as_array().unwrap().iter().map(|c| c["u"].as_str().unwrap()).collect();
    assert_eq!(us, ["1,-1,1/2,-1/6", "1,0,-1,1", "2,-1,-1/2,5/6", "2,0,-2,2"]);
    assert_eq!(d["candidates"][1]["class_id"], d["candidates"][3]["class_id"]);
}

#[test]
fn enumerate_pseudo_off_gamma_fails() {
    let out = run(&["enumerate", "pseudo", "--v", "2,0,-1,0", "--s", "1/3", "--beta", "-2", "--alpha-sq", "1/2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enumerate_nu_examples() {
    let d = json(&["enumerate", "nu", "--v", "2,0,-1,1"]);
    assert_eq!(d["class_count"], 0);
    let d = json(&["enumerate", "nu", "--v", "1,0,-1,1"]);
    assert_eq!(d["class_count"], 1);
    assert_eq!(d["classes"][0]["center"], "-3/2");
    assert_eq!(d["classes"][0]["radius_sq"], "1/4");
}

#[test]
fn sample_csv_has_flagged_rows() {
    let out = run(&["sample", "gamma", "--v", "1,0,-1,1", "--s", "1/3", "--step", "1/4", "--digits", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("beta,alpha,branch,exact"));
    assert!(text.contains("-2.000000,0.577350,minus,true"));
    let out = run(&["sample", "theta", "--v", "1,0,-1,1", "--step", "1/4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true") || l.ends_with(",false")));
    assert!(text.contains(",left,") && text.contains(",right,"));
}

#[test]
fn figure_presets_are_deterministic() {
    for preset in ["ideal-line", "theta-regions"] {
        let a = run(&["--threads", "1", "figure", "--preset", preset]);
        let b = run(&["--threads", "3", "figure", "--preset", preset]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{preset}");
        let doc = String::from_utf8(a.stdout).unwrap();
        assert!(doc.starts_with("<svg") && doc.contains("viewBox"));
        assert!(doc.contains("#1f4fd1"), "Theta drawn in blue");
    }
}

#[test]
fn figure_spec_file() {
    let dir = std::env::temp_dir().join(format!("stabwalls-fig-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let spec = dir.join("spec.json");
    fs::write(
        &spec,
        r#"{"window":{"beta_min":"-3","beta_max":"0","alpha_max":"1"},"step":"1/32",
            "layers":[{"kind":"gamma","v":"1,0,-1,1","s":"1/3","branches":["minus"]},
                      {"kind":"nu_wall","u":"1,-1,1/2,-1/6","v":"1,0,-1,1"}]}"#,
    )
    .unwrap();
    let out = run(&["figure", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = String::from_utf8(out.stdout).unwrap();
    assert!(doc.contains("#d62728") && doc.contains("#b0209f"));
    fs::write(&spec, r#"{"window":{"beta_min":"-3","beta_max":"0","alpha_max":"1"},"layers":[]}"#).unwrap();
    assert_eq!(run(&["figure", "--spec", spec.to_str().unwrap()]).status.code(), Some(2));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn json_output_is_deterministic_across_thread_counts() {
    let args = ["wall", "--u", "1,-1,1/2,-1/6", "--v", "1,0,-1,1", "--s", "1/3", "--step", "1/32"];
    let a = run(&[&["--threads", "1"], &args[..]].concat());
    let b = run(&[&["--threads", "4"], &args[..]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
