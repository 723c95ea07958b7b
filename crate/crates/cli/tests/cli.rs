use std::fs;
use std::process::{Command, Output};

fn torsion(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torsion"))
        .args(args)
        .env_remove("TORSION_CACHE_DIR")
        .output()
        .expect("run torsion")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn pi_ratio_one() {
    let o = torsion(&["pi-ratio", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1 2 0.5\n");
}

#[test]
fn eval_constant_one() {
    let o = torsion(&["eval", "--group", "2^2", "--family", "all", "table:2^2;v=1,1,1,1"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["infimum"], "1/1");
    assert_eq!(v["values"].as_array().unwrap().len(), 6);
    for family in ["extreme", "subgroups"] {
        let o = torsion(&["eval", "--family", family, "table:2^2;v=1,1,1,1"]);
        assert_eq!(json(&o)["infimum"], "1/1");
    }
}

#[test]
fn eval_rejects_bad_input() {
    assert_eq!(torsion(&["eval", "--family", "some", "table:2;v=1,1"]).status.code(), Some(2));
    assert_eq!(torsion(&["eval", "--group", "2^3", "table:2;v=1,1"]).status.code(), Some(2));
    assert_eq!(torsion(&["eval", "table:2;v=1"]).status.code(), Some(2));
}

#[test]
fn enumerate_writes_cache_idempotently() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z8.jsonl");
    let out_s = out.to_str().unwrap();
    assert!(torsion(&["enumerate", "--group", "2^3", "--out", out_s]).status.success());
    let first = fs::read(&out).unwrap();
    let header: serde_json::Value =
        serde_json::from_str(std::str::from_utf8(&first).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(header["total"], 255);
    assert_eq!(header["distinct"], 45);
    assert_eq!(std::str::from_utf8(&first).unwrap().lines().count(), 46);
    assert!(torsion(&["enumerate", "--group", "2,2,2", "--out", out_s]).status.success());
    assert_eq!(fs::read(&out).unwrap(), first);

    let o = torsion(&["enumerate", "--group", "2^0"]);
    let header: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!((header["total"].clone(), header["distinct"].clone()), (1.into(), 1.into()));
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_torsion"))
        .args(["hull", "--group", "2^2"])
        .env("TORSION_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("classes-2e2.jsonl").exists());
    assert_eq!(json(&o)["extreme"].as_array().unwrap().len(), 5);
}

#[test]
fn exit_codes() {
    assert_eq!(torsion(&["enumerate", "--group", "2^^3"]).status.code(), Some(2));
    assert_eq!(torsion(&["enumerate", "--group", "2^17"]).status.code(), Some(3));
    assert_eq!(torsion(&["table3", "--max-n", "5"]).status.code(), Some(3));
    assert_eq!(torsion(&["counterexample", "7"]).status.code(), Some(3));
    assert_eq!(
        torsion(&["counterexample", "1", "--out", "/dev/null/report.json"]).status.code(),
        Some(4)
    );
    assert_eq!(torsion(&["check", "nope"]).status.code(), Some(2));
}

#[test]
fn table3_rows() {
    let o = torsion(&["table3", "--max-n", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("n,total,distinct,extreme"));
    assert_eq!(text.lines().last(), Some("3,255,45,16"));
    assert_eq!(stdout(&torsion(&["table3", "--max-n", "0"])), "n,total,distinct,extreme\n0,1,1,1\n");
}

#[test]
fn counterexample_reports() {
    let v = json(&torsion(&["counterexample", "2"]));
    assert_eq!(v["annulus_integrals"][1]["value"], "1/2");
    assert_eq!(v["within_bound"], true);
    let v = json(&torsion(&["counterexample", "3"]));
    assert_eq!(v["bound"], "1/4");
    assert_eq!(v["within_bound"], true);
    let v = json(&torsion(&["counterexample", "1"]));
    assert_eq!(v["gamma_cardinality"], 2);
}

#[test]
fn check_suites() {
    let o = torsion(&["check", "parseval"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["passed"], true);
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        &["hull", "--group", "2^3"][..],
        &["counterexample", "3"][..],
        &["eval", "--family", "extreme", "table:2^2;v=1,0,1/2,3"][..],
    ] {
        let a = torsion(args);
        let b = torsion(&[args, &["--workers", "1"]].concat());
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}
