use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn treedet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treedet")).args(args).env_remove("TREEDET_CAP").output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_tree(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn unknown_flag_prints_usage_and_exits_2() {
    let out = treedet(&["canopy", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn empty_path_is_rejected() {
    let out = treedet(&["gen", "--family", "path", "--n", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_writes_edge_list() {
    let out = treedet(&["gen", "--family", "kary", "--k", "2", "--n", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("7"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn cap_from_environment_and_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_treedet"))
        .args(["gen", "--family", "kary", "--k", "2", "--n", "3"])
        .env("TREEDET_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = treedet(&["--cap", "10", "gen", "--family", "kary", "--k", "2", "--n", "2"]);
    assert!(out.status.success());
}

#[test]
fn malformed_edge_list_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_tree(&dir, "bad.txt", "3\n0 1\n");
    let out = treedet(&["matchings", &file]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn matchings_on_p3() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_tree(&dir, "p3.txt", "3\n0 1\n1 2\n");
    let v = json(&treedet(&["matchings", &file]));
    assert_eq!(v["nu"], 1);
    assert_eq!(v["mm"], "2");
}

#[test]
fn detcheck_p3_passes() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_tree(&dir, "p3.txt", "3\n0 1\n1 2\n");
    let out = treedet(&["detcheck", &file]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert!(v["max_dev"].as_f64().unwrap() < 1e-9);
}

#[test]
fn recursions_row_on_p3() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_tree(&dir, "p3.txt", "3\n0 1\n1 2\n");
    let v = json(&treedet(&["recursions", &file, "--root", "0"]));
    let row: Vec<f64> = v["row"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(row, vec![0.5, 0.0, -0.5]);
}

#[test]
fn canopy_defaults_to_csv() {
    let out = treedet(&["canopy", "--depth-max", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(&rows[1][col("a_n")], "8");
    assert_eq!(&rows[1][col("brute_force")], "8");
    assert_eq!(&rows[2][col("a_n")], "64");
    assert_eq!(&rows[1][col("root_uncovered")], "1/2");
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pelda.json");
    let out = treedet(&["--out", path.to_str().unwrap(), "--format", "json", "pelda", "--n-max", "10"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["experiment"], "pelda");
    assert_eq!(v["records"][4]["sequence"], "4/7");
}

#[test]
fn reruns_are_identical_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_tree(&dir, "t.txt", &stdout(&treedet(&["gen", "--family", "random", "--n", "12", "--seed", "5"])));
    let run = || {
        let mut v = json(&treedet(&["--seed", "3", "--workers", "2", "local-approx", &file, "--r", "1", "--big-r", "0,1,2"]));
        v.as_object_mut().unwrap().remove("wall_time_s");
        v
    };
    assert_eq!(run(), run());
}

#[test]
fn sampling_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_tree(&dir, "t.txt", &stdout(&treedet(&["gen", "--family", "kary", "--k", "2", "--n", "3"])));
    let a = stdout(&treedet(&["--seed", "9", "matchings", &file, "--sample", "20"]));
    let b = stdout(&treedet(&["--seed", "9", "matchings", &file, "--sample", "20"]));
    assert_eq!(a, b);
}
