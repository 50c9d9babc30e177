use std::path::Path;
use std::process::{Command, Output};

use autalg::constructions::split_etale;
use autalg::field::FiniteField;
use serde_json::Value;

fn autalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_autalg")).args(args).env_remove("AUTALG_WORKERS").output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn realize_c2_over_f7() {
    let dir = tempfile::tempdir().unwrap();
    let alg = dir.path().join("c2.json");
    let out = autalg(&["--json", "realize", "--group", "n=2; gens=(1 2)", "--field", "7", "--out", path(&alg)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json_of(&out);
    assert_eq!(report["dim"], 15);
    assert_eq!(report["aut_order"], 2);
    assert_eq!(report["simple"], true);
    assert_eq!(report["matched_form"], "wrap(permutation)");

    let verified = autalg(&["--json", "verify", "--algebra", path(&alg)]);
    assert_eq!(verified.status.code(), Some(0));
    let checks = json_of(&verified)["checks"].as_array().unwrap().clone();
    assert!(checks.iter().all(|c| c["status"] == "pass"), "{checks:?}");
    assert!(checks.iter().any(|c| c["claim"] == "aut_order"));
}

#[test]
fn small_field_names_the_mu_bound() {
    let out = autalg(&["realize", "--group", "n=2; gens=(1 2)", "--field", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("μ"));
}

#[test]
fn split_etale_is_not_simple() {
    let dir = tempfile::tempdir().unwrap();
    let e2 = dir.path().join("e2.json");
    let f = FiniteField::prime(5).unwrap();
    std::fs::write(&e2, split_etale(2, &f).unwrap().to_json()).unwrap();
    let out = autalg(&["--json", "simplicity", "--algebra", path(&e2), "--mode", "exhaustive"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json_of(&out);
    assert_eq!(report["simple"], false);
    assert_eq!(report["witness"]["value"]["ideal"], serde_json::json!(["e1"]));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let run = |p: &Path, workers: &str| {
        autalg(&["--json", "--workers", workers, "realize", "--group", "n=2; gens=(1 2)", "--field", "7", "--out", path(p)])
    };
    let (ra, rb) = (run(&a, "1"), run(&b, "2"));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let strip = |o: &Output| {
        let mut v = json_of(o);
        v.as_object_mut().unwrap().remove("algebra_file");
        v.to_string()
    };
    assert_eq!(strip(&ra), strip(&rb));

    let s1 = autalg(&["--json", "simplicity", "--algebra", path(&a), "--mode", "sampled", "--seed", "3", "--rounds", "50"]);
    let s2 = autalg(&["--json", "simplicity", "--algebra", path(&a), "--mode", "sampled", "--seed", "3", "--rounds", "50"]);
    assert_eq!(s1.stdout, s2.stdout);
}

#[test]
fn every_construction_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&str, &[&str])] = &[
        ("rigid", &["--field", "5"]),
        ("B", &["--field", "5"]),
        ("A", &["--field", "5", "--monomial", "1,2"]),
        ("C", &["--field", "5"]),
        ("D", &["--field", "7"]),
        ("E", &["--field", "7", "--group", "n=2; gens=(1 2)"]),
        ("wrap", &["--field", "5"]),
    ];
    for (kind, extra) in cases {
        let out_path = dir.path().join(format!("{kind}.json"));
        let mut args = vec!["construct", "--kind", kind, "--out", path(&out_path)];
        args.extend_from_slice(extra);
        let built = autalg(&args);
        assert_eq!(built.status.code(), Some(0), "{kind}: {}", String::from_utf8_lossy(&built.stderr));
        let verified = autalg(&["--json", "verify", "--algebra", path(&out_path)]);
        assert_eq!(verified.status.code(), Some(0), "{kind}: {}", String::from_utf8_lossy(&verified.stdout));
    }
}

#[test]
fn wrapping_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let (e, w) = (dir.path().join("e.json"), dir.path().join("w.json"));
    let built = autalg(&["construct", "--kind", "E", "--field", "7", "--group", "n=2; gens=(1 2)", "--out", path(&e)]);
    assert_eq!(built.status.code(), Some(0));
    let wrapped = autalg(&["construct", "--kind", "wrap", "--field", "7", "--inner", path(&e), "--out", path(&w)]);
    assert_eq!(wrapped.status.code(), Some(0));
    let report = json_of(&autalg(&["--json", "autgroup", "--algebra", path(&w)]));
    assert_eq!(report["order"], 2);
    assert_eq!(report["matched_form"], "wrap(permutation)");
    let mismatch = autalg(&["construct", "--kind", "wrap", "--field", "5", "--inner", path(&e)]);
    assert_eq!(mismatch.status.code(), Some(2));
}

#[test]
fn budget_refusal_and_force() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c.json");
    autalg(&["construct", "--kind", "C", "--field", "5", "--out", path(&c)]);
    let refused = autalg(&["autgroup", "--algebra", path(&c), "--budget", "10"]);
    assert_eq!(refused.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&refused.stderr).contains("--force"));
    let forced = autalg(&["--json", "autgroup", "--algebra", path(&c), "--budget", "10", "--force"]);
    assert_eq!(json_of(&forced)["order"], 120);
}

#[test]
fn normalizer_detects_extra_symmetry() {
    let good = autalg(&["--json", "normalizer", "--group", "n=3; gens=(1 2 3)", "--lambda", "1,2,5", "--field", "11"]);
    assert_eq!(good.status.code(), Some(0));
    assert_eq!(json_of(&good)["order"], 3);
    let bad = autalg(&["--json", "normalizer", "--group", "n=3; gens=(1 2 3)", "--lambda", "1,1,1", "--field", "11"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(json_of(&bad)["witness"]["value"].is_string());
    // order and degree differ
    let sub = autalg(&["--json", "normalizer", "--group", "n=3; gens=(1 2)", "--lambda", "1,2,3", "--field", "11"]);
    assert_eq!(json_of(&sub)["order"], 2, "{}", String::from_utf8_lossy(&sub.stdout));
}

#[test]
fn trace_forms_and_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("r.json");
    autalg(&["construct", "--kind", "rigid", "--field", "5", "--out", path(&r)]);
    let forms = json_of(&autalg(&["--json", "trace-forms", "--algebra", path(&r)]));
    assert_eq!(forms["lr_equals_rl_transpose"], true);
    assert_eq!(forms["forms"].as_object().unwrap().len(), 4);
    let tensor = json_of(&autalg(&["--json", "export-tensor", "--algebra", path(&r)]));
    assert_eq!(tensor["entries"], serde_json::json!([[0, 0, 0, "1"], [0, 1, 1, "1"], [1, 0, 1, "2"], [1, 1, 1, "1"]]));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(autalg(&["realize", "--group", "n=2; gens=(1 5)", "--field", "7"]).status.code(), Some(2));
    assert_eq!(autalg(&["realize", "--group", "n=2; gens=(1 2)", "--field", "6"]).status.code(), Some(2));
    assert_eq!(autalg(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(autalg(&["verify", "--algebra", "/nonexistent.json"]).status.code(), Some(2));
}
