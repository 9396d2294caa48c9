use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn quartic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quartic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn family_special_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let surface = dir.path().join("special.json");
    let o = quartic(&[
        "family",
        "special",
        "--m",
        "3",
        "--seed",
        "7",
        "--surface-out",
        surface.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["verified"], true);
    assert_eq!(v["report"]["singular"]["count"], 14);

    let o = quartic(&["analyze", surface.to_str().unwrap(), "--lattice"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["singular"]["nu"], 14);
    assert_eq!(v["singular"]["b"], 0);
    assert_eq!(v["ledger"]["product"], 8);
    assert_eq!(v["kernel_dim"], 1);
    assert_eq!(v["configuration"]["four_collinear"], false);
    assert_eq!(v["lattice"]["exceptional_negative_definite"], true);
}

#[test]
fn family_a3_and_insep() {
    let o = quartic(&["family", "a3", "--m", "3", "--seed", "0"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["report"]["singular"]["count"], 7);
    assert_eq!(v["report"]["all_a3"], true);

    let o = quartic(&["family", "insep", "--m", "4", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["report"];
    let lengths: Vec<i64> = [
        "base_locus_length",
        "line_scheme_length",
        "hilbert_burch_length",
        "residual_length",
    ]
    .iter()
    .map(|k| r[*k].as_i64().unwrap())
    .collect();
    assert_eq!(lengths, vec![8, 4, 17, 13]);
}

#[test]
fn family_dualplane_with_lambda() {
    let o = quartic(&[
        "family",
        "dualplane",
        "--m",
        "3",
        "--seed",
        "2",
        "--lambda",
        "0",
    ]);
    assert_eq!(code(&o), 0);
    let r = &json(&o)["report"];
    assert_eq!(r["kernel_dim"], 1);
    assert_eq!(r["p_prime_multiplicity"], 4);
}

#[test]
fn unknown_family_is_usage_error() {
    let o = quartic(&["family", "cubic", "--m", "3"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown family"));
    let o = quartic(&["family", "a3", "--m", "3", "--lambda", "zz"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn malformed_and_missing_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(code(&quartic(&["analyze", &bad])), 1);
    assert_eq!(code(&quartic(&["fibration", &bad])), 1);
    assert_eq!(code(&quartic(&["analyze", "/nonexistent/surface.json"])), 1);
    assert_eq!(code(&quartic(&["frobnicate"])), 1);
}

#[test]
fn non_normal_surfaces_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // (x1^2 + x2 x3)^2
    let square = write(
        dir.path(),
        "square.json",
        r#"{"vars":4,"deg":4,"field":{"m":2},"terms":[{"exp":[4,0,0,0],"coef":"1"},{"exp":[0,2,2,0],"coef":"1"}]}"#,
    );
    let o = quartic(&["analyze", &square]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("non-normal"));
    // x1^4 + x2^3 x3 is singular along x1 = x2 = 0
    let cone = write(
        dir.path(),
        "cone.json",
        r#"{"vars":4,"deg":4,"field":{"m":2},"terms":[{"exp":[4,0,0,0],"coef":"1"},{"exp":[0,3,1,0],"coef":"1"}]}"#,
    );
    let o = quartic(&["analyze", &cone]);
    assert_eq!(code(&o), 2);
}

#[test]
fn certification_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let surface = dir.path().join("special.json");
    let s = surface.to_str().unwrap();
    assert_eq!(
        code(&quartic(&[
            "family",
            "special",
            "--m",
            "3",
            "--seed",
            "7",
            "--surface-out",
            s
        ])),
        0
    );
    // two of the orbits need a quadratic extension
    assert_eq!(code(&quartic(&["analyze", s, "--max-ext", "1"])), 3);
    assert_eq!(
        code(&quartic(&[
            "family",
            "special",
            "--m",
            "3",
            "--seed",
            "7",
            "--max-ext",
            "1"
        ])),
        3
    );
}

const RANDOM_MODEL: &str = r#"{"field":{"m":4},"a":[["3","7","1"],["2","9","4","c","1"],["5","1","0","e","2","b","7"],["1","0","f","2","3","6","d","8","1"],["6","2","a","1","0","3","9","e","4","5","7","2","b"]]}"#;

#[test]
fn fibration_census() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "w.json", RANDOM_MODEL);
    let o = quartic(&["fibration", &p]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["ledger"]["total"], 24);
    assert_eq!(v["disjoint"]["bound_ok"], true);
    let o = quartic(&["fibration", &p, "--format", "text"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("Euler total 24"));
    assert_eq!(code(&quartic(&["fibration", &p, "--max-ext", "1"])), 3);
}

#[test]
fn quasi_elliptic_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "q.json",
        r#"{"field":{"m":1},"a":[[],[],[],[],["0","0","0","0","0","0","0","0","0","1"]]}"#,
    );
    let o = quartic(&["fibration", &p, "--format", "text"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("II, III, I*2n, III*, II*"));
}

#[test]
fn degenerate_discriminant_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    // a1 = 1, everything else 0: Δ = 0 without being quasi-elliptic
    let p = write(
        dir.path(),
        "d.json",
        r#"{"field":{"m":1},"a":[["1"],[],[],[],[]]}"#,
    );
    assert_eq!(code(&quartic(&["fibration", &p])), 1);
}

#[test]
fn output_is_deterministic() {
    let args = ["family", "insep", "--m", "3", "--seed", "5"];
    let a = quartic(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_quartic"))
        .args(args)
        .env("CHAR2_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}
