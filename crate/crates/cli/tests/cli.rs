use std::process::{Command, Output};

use bentsq::boolfn::{is_bent, TruthTable};
use bentsq::bounds::BoundReport;
use bentsq::construct::ConstructionReport;
use bentsq::tworegular::TwoRegularMatrix;
use serde_json::Value;

fn bentsq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bentsq"))
        .args(args)
        .env_remove("BENTSQ_JOBS")
        .output()
        .expect("spawn bentsq")
}

fn stdout(args: &[&str]) -> String {
    let out = bentsq(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn table1_path() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures/table1.json").to_string()
}

#[test]
fn bent_verdicts() {
    let v = json(&["bent", "111e"]);
    assert_eq!(v["bent"], true);
    assert_eq!(v["n"], 4);
    let v = json(&["bent", "6996"]);
    assert_eq!(v["bent"], false);
    assert_eq!(stdout(&["--format", "text", "bent", "8"]).trim(), "true");
}

#[test]
fn odd_n_is_a_domain_error() {
    let out = bentsq(&["bent", "96"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("OddVariableCount"));
}

#[test]
fn bad_hex_and_usage_errors() {
    let out = bentsq(&["bent", "xyz"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: BadTruthTable"));

    assert_eq!(bentsq(&["count2reg"]).status.code(), Some(2));
    assert_eq!(bentsq(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        bentsq(&["construct", "--n", "4", "--limit", "3"]).status.code(),
        Some(2)
    );
}

#[test]
fn walsh_and_square() {
    let v: Vec<i64> = serde_json::from_value(json(&["wht", "111e"])).unwrap();
    assert!(v.iter().all(|x| x.abs() == 4));
    let sq = json(&["square", "111e"]);
    assert_eq!(sq["k"], 2);
    assert_eq!(sq["entries"][0], serde_json::json!([2, 2, 2, -2]));
    assert_eq!(json(&["classify", "2,2,2,-2"]), "Type2");
    assert_eq!(json(&["classify", "-4,0,0,0"]), "Type1");
}

#[test]
fn two_regular_commands() {
    assert_eq!(stdout(&["count2reg", "--N", "4"]).trim(), "90");
    assert_eq!(stdout(&["count2reg", "--N", "8"]).trim(), "187530840");

    let listed = stdout(&["enum2reg", "--N", "3"]);
    let ms: Vec<TwoRegularMatrix> = listed
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(ms.len(), 6);

    let a = stdout(&["sample2reg", "--N", "16", "--count", "5", "--seed", "7"]);
    let b = stdout(&["sample2reg", "--N", "16", "--count", "5", "--seed", "7"]);
    assert_eq!(a, b);
    for line in a.lines() {
        let m: TwoRegularMatrix = serde_json::from_str(line).unwrap();
        assert_eq!(m.size(), 16);
    }
    assert_eq!(bentsq(&["enum2reg", "--N", "7"]).status.code(), Some(1));
}

#[test]
fn signatures_of_fixture() {
    let path = table1_path();
    let v = json(&["sig", &path]);
    assert_eq!(v["vertical"], serde_json::json!([4, 4, 3, 5, 4, 6, 7, 3]));
    assert_eq!(v["horizontal"], serde_json::json!([6, 5, 7, 1, 3, 6, 2, 2]));
    let text = stdout(&["--format", "text", "sig", &path]);
    assert!(text.contains("vertical   100 100 011 101 100 110 111 011"));
}

#[test]
fn bound_reports_round_trip() {
    let r: BoundReport = serde_json::from_value(json(&["bound", "--n", "6"])).unwrap();
    assert_eq!(r.lower_bound.to_string(), "3950");
    assert_eq!(r.s_exact.unwrap().to_string(), "21");

    let many: Vec<BoundReport> =
        serde_json::from_value(json(&["bound", "--n", "4,6,8,20"])).unwrap();
    assert_eq!(many.len(), 4);
    assert_eq!(many[2].m.to_string(), "187530840");

    let csv = stdout(&["--format", "csv", "bound", "--n", "4,6"]);
    assert_eq!(csv.lines().count(), 3);
    assert_eq!(bentsq(&["bound", "--n", "5"]).status.code(), Some(1));
}

#[test]
fn construct_is_independent_of_thread_count() {
    let one = stdout(&["--jobs", "1", "construct", "--n", "6", "--verify-samples", "500"]);
    let four = stdout(&["--jobs", "4", "construct", "--n", "6", "--verify-samples", "500"]);
    assert_eq!(one, four);
    let r: ConstructionReport = serde_json::from_str(&one).unwrap();
    assert_eq!(r.quadruples, 3600);
    assert_eq!(r.emitted, 115_200);
    assert_eq!(r.verified_bent, 500);
}

#[test]
fn construct_writes_functions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.txt");
    let p = path.to_str().unwrap();
    let r: ConstructionReport = serde_json::from_value(json(&[
        "construct", "--n", "6", "--limit", "100", "--output", p, "--verify-samples", "10",
    ]))
    .unwrap();
    assert_eq!(r.n, 6);
    let text = std::fs::read_to_string(&path).unwrap();
    let fs: Vec<TruthTable> = text.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(fs.len(), 100);
    assert!(fs.iter().all(|f| f.num_vars() == 6 && is_bent(f) == Ok(true)));
}

#[test]
fn census_output_matches_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bent4.txt");
    let v = json(&["census", "--n", "4", "--output", path.to_str().unwrap()]);
    assert_eq!(v["bent"], 896);
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures/bent4.txt");
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        std::fs::read_to_string(fixture).unwrap()
    );
}

#[test]
fn type1_count() {
    let v = json(&["type1", "--n", "4"]);
    assert_eq!(v["type1_squares"], 384);
    assert_eq!(v["formula"], "384");
}
