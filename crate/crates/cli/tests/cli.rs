use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn npg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_npg"))
        .args(args)
        .output()
        .expect("run npg")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Drops the `time_s` column, the only one that depends on the clock.
fn without_time(csv: &str) -> Vec<String> {
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let t = header.iter().position(|h| *h == "time_s").unwrap();
    csv.lines()
        .map(|line| {
            let mut cells: Vec<&str> = line.split(',').collect();
            cells.remove(t);
            cells.join(",")
        })
        .collect()
}

#[test]
fn bench_csv_is_reproducible() {
    let args = [
        "bench", "--family", "cs,simplex", "--m", "20", "--n", "150", "--s", "3", "--seed", "5", "--seeds", "2",
    ];
    let a = npg(&args);
    let b = npg(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let text = stdout(&a);
    assert_eq!(
        text.lines().next().unwrap(),
        "family,m,n,s,method,seed,cardinality,objective,time_s,strong_stationary,violation"
    );
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2);
    assert_eq!(without_time(&text), without_time(&stdout(&b)));
}

#[test]
fn bench_json_and_out_file() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = npg(&[
        "bench", "--family", "logistic", "--m", "20", "--n", "200", "--method", "npg", "--format", "json", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["method"], "npg");
    assert_eq!(rows[0]["s"], 2);
}

#[test]
fn gen_solve_certify_round_trip() {
    let dir = tempdir().unwrap();
    let inst = dir.path().join("inst.txt");
    let point = dir.path().join("x.txt");
    let p = |q: &Path| q.to_str().unwrap().to_string();

    let o = npg(&["gen", "--family", "cs", "--m", "20", "--n", "60", "--s", "3", "--seed", "2", "--out", &p(&inst)]);
    assert!(o.status.success());
    let again = npg(&["gen", "--family", "cs", "--m", "20", "--n", "60", "--s", "3", "--seed", "2"]);
    assert_eq!(stdout(&again), std::fs::read_to_string(&inst).unwrap());

    let o = npg(&["solve", "--instance", &p(&inst), "--method", "npg", "--point-out", &p(&point)]);
    assert!(o.status.success());
    let trace: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(trace["records"].as_array().unwrap().len() >= 1);
    assert_eq!(trace["x_final"].as_array().unwrap().len(), 60);

    let o = npg(&["certify", "--instance", &p(&inst), "--point", &p(&point), "--tol", "1e-3"]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["general"], true);
    assert_eq!(report["value"], trace["f_final"]);
}

#[test]
fn solve_csv_row() {
    let o = npg(&["solve", "--family", "simplex", "--m", "10", "--n", "120", "--method", "pg", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("simplex-least-squares,10,120,1,pg,0,1,"), "{row}");
}

#[test]
fn exit_codes() {
    assert_eq!(npg(&["--help"]).status.code(), Some(0));
    assert_eq!(npg(&["--version"]).status.code(), Some(0));
    assert_eq!(npg(&[]).status.code(), Some(1));
    assert_eq!(npg(&["bench", "--m", "3"]).status.code(), Some(1));
    assert_eq!(npg(&["solve", "--method", "npg"]).status.code(), Some(1));
    assert_eq!(npg(&["solve", "--family", "cs", "--m", "5", "--n", "20", "--method", "both"]).status.code(), Some(1));
    assert_eq!(npg(&["gen", "--family", "nope", "--m", "5", "--n", "20"]).status.code(), Some(1));

    // generator and solver failures
    assert_eq!(npg(&["gen", "--family", "logistic", "--m", "7", "--n", "50"]).status.code(), Some(2));
    assert_eq!(npg(&["gen", "--family", "cs", "--m", "5", "--n", "20"]).status.code(), Some(2));
    let o = npg(&["bench", "--family", "cs", "--m", "30", "--n", "20", "--s", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o).lines().count(), 3, "rows are still reported");
    assert_eq!(npg(&["certify", "--instance", "/nonexistent", "--point", "/nonexistent"]).status.code(), Some(2));
}

#[test]
fn certify_rejects_wrong_length() {
    let dir = tempdir().unwrap();
    let inst = dir.path().join("inst.txt");
    let point = dir.path().join("x.txt");
    npg(&["gen", "--family", "simplex", "--m", "5", "--n", "100", "--out", inst.to_str().unwrap()]);
    std::fs::write(&point, "1\n0\n").unwrap();
    let o = npg(&["certify", "--instance", inst.to_str().unwrap(), "--point", point.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension mismatch"));
}
