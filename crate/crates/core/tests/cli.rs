use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use maxent_toric::ratpoly::Polynomial;
use serde_json::Value;
use tempfile::TempDir;

const DICE: &str = r#"{"m":6,"constraints":[{"name":"mean","values":[1,2,3,4,5,6],"target":4.5}]}"#;
const THREE: &str = r#"{"m":3,"constraints":[{"values":[0,1,2],"target":"1/2"}]}"#;
const SAMPLES: &str = r#"{"m":2,"constraints":[{"values":[0,1]}],"samples":[1,2]}"#;
const INDEPENDENCE: &str = r#"{"m":4,"constraints":[{"values":[1,1,0,0]},{"values":[0,0,1,1]},{"values":[1,0,1,0]},{"values":[0,1,0,1]}]}"#;

fn maxent(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_maxent"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn spec(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn fit_dice_json() {
    let dir = TempDir::new().unwrap();
    let path = spec(&dir, "dice.json", DICE);
    let out = maxent(&["fit", s(&path)], b"");
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["solver"], "newton");
    let p: Vec<f64> = v["p"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(p.len(), 6);
    assert!((p[0] - 0.054_353_167_826_491_518).abs() < 1e-9);
    let mean = v["moments"][0].as_f64().unwrap();
    assert!((mean - 4.5).abs() < 1e-9);
}

#[test]
fn fit_text_format() {
    let dir = TempDir::new().unwrap();
    let path = spec(&dir, "dice.json", DICE);
    let out = maxent(
        &["fit", "--format", "text", "--solver", "gis", s(&path)],
        b"",
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("solver: gis\n"), "{text}");
    assert!(text.contains("\np: "));
}

#[test]
fn groebner_fit_reports_exact_distribution() {
    let dir = TempDir::new().unwrap();
    let path = spec(&dir, "samples.json", SAMPLES);
    let v = json(&maxent(&["fit", "--solver", "groebner", s(&path)], b""));
    assert_eq!(v["p_exact"], serde_json::json!(["1/2", "1/2"]));
    assert!(v["xi_tilde"].is_array());
}

#[test]
fn system_and_dual_text() {
    let dir = TempDir::new().unwrap();
    let three = spec(&dir, "three.json", THREE);
    let samples = spec(&dir, "samples.json", SAMPLES);
    assert_eq!(
        stdout(&maxent(&["system", s(&three)], b"")),
        "3/2*t1^2 + 1/2*t1 - 1/2\n"
    );
    assert_eq!(stdout(&maxent(&["dual", s(&samples)], b"")), "t1^2 - 1\n");
    let v = json(&maxent(&["dual", "--format", "json", s(&samples)], b""));
    assert_eq!(v["objective"], "t1 + t1^-1");
    assert_eq!(v["provenance"], "dual-empirical");
}

#[test]
fn ideal_of_independence_model() {
    let dir = TempDir::new().unwrap();
    let path = spec(&dir, "ind.json", INDEPENDENCE);
    assert_eq!(
        stdout(&maxent(&["ideal", s(&path)], b"")),
        "p1*p4 - p2*p3\n"
    );
}

#[test]
fn emitted_polynomials_reparse() {
    let dir = TempDir::new().unwrap();
    let three = spec(&dir, "three.json", THREE);
    let v = json(&maxent(&["system", "--format", "json", s(&three)], b""));
    let vars: Vec<String> = serde_json::from_value(v["vars"].clone()).unwrap();
    for key in ["equations", "cleared"] {
        for e in v[key].as_array().unwrap() {
            let text = e.as_str().unwrap();
            assert_eq!(Polynomial::parse(text, &vars).unwrap().to_string(), text);
        }
    }
}

#[test]
fn fit_then_check_through_a_pipe() {
    let dir = TempDir::new().unwrap();
    let path = spec(&dir, "dice.json", DICE);
    let fit = maxent(&["fit", s(&path)], b"");
    let check = maxent(&["check", s(&path), "--dist", "-"], &fit.stdout);
    assert_eq!(
        check.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&check.stderr)
    );
    assert_eq!(json(&check)["pass"], true);
}

#[test]
fn check_rejects_a_distribution_off_the_family() {
    let dir = TempDir::new().unwrap();
    let path = spec(&dir, "dice.json", DICE);
    let dist = spec(&dir, "p.json", "[0.5, 0, 0, 0, 0, 0.5]");
    let out = maxent(&["check", s(&path), "--dist", s(&dist)], b"");
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn entropy_of_uniform() {
    let dir = TempDir::new().unwrap();
    let path = spec(&dir, "dice.json", DICE);
    let out = maxent(
        &["entropy", s(&path), "--dist", "-"],
        b"[0.25, 0.25, 0.25, 0.25, 0, 0]",
    );
    assert_eq!(out.status.code(), Some(0));
    let h = json(&out)["entropy"].as_f64().unwrap();
    assert!((h - 4f64.ln()).abs() < 1e-15);
}

#[test]
fn infeasible_target_exits_one() {
    let dir = TempDir::new().unwrap();
    let path = spec(&dir, "bad.json", &DICE.replace("4.5", "6.5"));
    for solver in ["gis", "newton", "groebner"] {
        let out = maxent(&["fit", "--solver", solver, s(&path)], b"");
        assert_eq!(out.status.code(), Some(1), "{solver}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let fractional = spec(&dir, "frac.json", &DICE.replace("[1,2,3", "[0.5,2,3"));
    let out = maxent(&["fit", s(&fractional)], b"");
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("constraints[0].values[0]"), "{err}");
    assert_eq!(
        maxent(&["fit", "/nonexistent/spec.json"], b"")
            .status
            .code(),
        Some(2)
    );
    assert_eq!(maxent(&["fit", "-"], b"{not json").status.code(), Some(2));
}

#[test]
fn size_limit_exits_three() {
    let dir = TempDir::new().unwrap();
    let values: Vec<String> = (0..12).map(|j| (j % 3).to_string()).collect();
    let text = format!(
        r#"{{"m":12,"constraints":[{{"values":[{}]}}]}}"#,
        values.join(",")
    );
    let path = spec(&dir, "wide.json", &text);
    assert_eq!(maxent(&["ideal", s(&path)], b"").status.code(), Some(3));
}

#[test]
fn worst_exit_code_wins_across_files() {
    let dir = TempDir::new().unwrap();
    let good = spec(&dir, "good.json", DICE);
    let bad = spec(&dir, "bad.json", &DICE.replace("4.5", "6.5"));
    let out = maxent(&["fit", s(&good), s(&bad)], b"");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let dice = spec(&dir, "dice.json", DICE);
    let three = spec(&dir, "three.json", THREE);
    let args = ["fit", "--solver", "gis", s(&dice), s(&three)];
    let first = maxent(&args, b"");
    let second = maxent(&args, b"");
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}
