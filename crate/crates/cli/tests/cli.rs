use std::fs;
use std::process::{Command, Output};

use mlqc::protocol::{from_json_str, to_json_string};

fn mlqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlqc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Data rows of a CSV body, skipping the `#` header line and column names.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn and_sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = mlqc(&["and-sweep", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let body = fs::read_to_string(&path).unwrap();
    assert!(!body.contains('\r'));
    let rows = rows(&body);
    assert_eq!(rows.len(), 8);
    let mut previous_cic = f64::INFINITY;
    for (i, row) in rows.iter().enumerate() {
        let r = i + 1;
        let k: f64 = row[1].parse().unwrap();
        assert_eq!(row[1], (4 * r - 1).to_string());
        let lower: f64 = row[5].parse().unwrap();
        assert!((lower - k.log2() / (12.0 * k)).abs() < 1e-15);
        let cic: f64 = row[3].parse().unwrap();
        assert!(cic < previous_cic);
        assert!(cic >= lower);
        previous_cic = cic;
    }
}

#[test]
fn and_sweep_range_is_checked() {
    let o = mlqc(&["and-sweep", "--r-min", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = mlqc(&["and-sweep", "--r-max", "9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn audit_of_and_passes() {
    let o = mlqc(&["audit", "--and", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    for name in ["claim1", "claim2", "claim3", "proposition_cic0", "proposition_cic"] {
        let line = text.lines().find(|l| l.starts_with(&format!("{name},"))).unwrap();
        assert!(line.ends_with(",PASS"), "{line}");
    }
}

#[test]
fn malformed_json_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(
        &path,
        r#"{"registers":[{"name":"C","dim":2}],"rounds":[{"sender":"alice","unitaries":{"0":[[1,0],[0,1]],"1":[[1,0],["x",1]]}}],"output_register":"C","memoryless":true}"#,
    )
    .unwrap();
    let o = mlqc(&["audit", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rounds[0].unitaries.1"), "{}", stderr(&o));
}

#[test]
fn audit_requires_memoryless() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let mut p = mlqc::and_protocol::build_and_protocol(1).unwrap();
    p.memoryless = false;
    fs::write(&path, to_json_string(&p)).unwrap();
    let o = mlqc(&["audit", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("memoryless"));
}

#[test]
fn private_compile_of_send_input_and() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("private.json");
    let report = dir.path().join("private.csv");
    let o = mlqc(&["compile", "--private", "--out", json.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = fs::read_to_string(report).unwrap();
    let total = rows(&report).into_iter().find(|r| r[0] == "total_cic").unwrap();
    assert_eq!(total[1].parse::<f64>().unwrap(), 0.0);
    assert!(rows(&report).iter().all(|r| r[3] == "true"));
    let doc = fs::read_to_string(json).unwrap();
    assert!(doc.contains("\"round_key_bits\""));
    assert!(doc.contains("\"O_copy\""));
}

#[test]
fn oneshot_compile_of_a_coined_protocol() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("oneshot.json");
    let o = mlqc(&["compile", "--oneshot", "--random-coined", "3", "--seed", "7", "--out", json.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let compiled = from_json_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert!(compiled.coins.coins.is_empty());
    assert!(compiled.memoryless);
    let certs = rows(&stdout(&o));
    for name in ["round_1_term", "compiled_cic0", "compiled_cic0_vs_entropy_lemma"] {
        assert!(certs.iter().any(|r| r[0] == name && r[3] == "true"), "{name}");
    }
}

#[test]
fn oversized_compile_reports_dimension() {
    let o = mlqc(&["compile", "--oneshot", "--random-coined", "5", "--cap", "32"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dimension 64"), "{}", stderr(&o));
}

#[test]
fn lemmas_are_deterministic_and_validate_trials() {
    let a = mlqc(&["lemmas", "--trials", "25", "--seed", "3"]);
    let b = mlqc(&["lemmas", "--trials", "25", "--seed", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(rows(&stdout(&a)).iter().all(|r| r[1] == r[2]));
    assert_eq!(mlqc(&["lemmas", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn simulate_prints_distributions_and_ledger() {
    let o = mlqc(&["simulate", "--and", "1", "--mu", "uniform"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("x,y,outcome,probability"));
    assert!(text.lines().any(|l| l.starts_with("qcc,,3.")));
}

#[test]
fn bad_global_flags_are_usage_errors() {
    assert_eq!(mlqc(&["--tol", "0", "lemmas"]).status.code(), Some(2));
    assert_eq!(mlqc(&["--cap", "512", "lemmas"]).status.code(), Some(2));
    assert_eq!(mlqc(&["frobnicate"]).status.code(), Some(2));
}
