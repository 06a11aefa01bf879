use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sr-dirichlet"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn write_config(dir: &Path, faces: [f64; 6], extra: &str) -> std::path::PathBuf {
    let path = dir.join("run.json");
    let text = format!(
        r#"{{
  "problem": {{ "data": {{ "kind": "piecewise_constant", "faces": {faces:?} }} }},
  "collocation": {{ "n": 5 }},
  "backend": {{ "kind": "mfs", "alpha": 3.0 }},
  "quadrature": {{ "base_k": 16 }},
  "outputs": {{ "solution": "run.sol", "report": "report.json" }}{extra}
}}"#
    );
    std::fs::write(&path, text).unwrap();
    path
}

const HOT: [f64; 6] = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0];

fn rows(text: &str) -> Vec<Vec<String>> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn solve_eval_and_corner() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_config(d, HOT, "");
    let out = run(&["solve", "--config", "run.json"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["backend"], "mfs");
    assert_eq!(report["N"], 150);
    assert!(report["e_r"].as_f64().unwrap() <= 1e-4);

    std::fs::write(d.join("pts.csv"), "x,y,z\n0.5,0.5,0.5\n0.5,0.5,0.5\n0.2,0.3,1.0\n").unwrap();
    let out = run(&["eval", "--solution", "run.sol", "--points", "pts.csv"], d);
    assert_eq!(out.status.code(), Some(4));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,y,z,value\n"));
    let r = rows(&text);
    assert_eq!(r.len(), 3);
    assert_eq!(r[0], r[1]);
    let center: f64 = r[0][3].parse().unwrap();
    assert!((center - 1.0 / 6.0).abs() <= 5e-5);
    assert!(r[2][3].starts_with("ERROR"));

    let out = run(
        &["corner", "--solution", "run.sol", "--resolution", "2", "--output", "slice.csv"],
        d,
    );
    assert!(out.status.success());
    let slice = rows(&std::fs::read_to_string(d.join("slice.csv")).unwrap());
    assert_eq!(slice.len(), 4);
    for row in &slice {
        let v: f64 = row[3].parse().unwrap();
        assert!((-1e-3..=1.0 + 1e-3).contains(&v));
    }
    let out = run(&["corner", "--solution", "run.sol", "--distance", "0.7"], d);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_config(d, HOT, r#", "evaluations": { "points": [[0.5, 0.5, 0.9]], "output": "ev.csv" }"#);
    let mut previous = None;
    for _ in 0..2 {
        let out = bin()
            .args(["--threads", "2", "solve", "--config", "run.json"])
            .current_dir(d)
            .output()
            .unwrap();
        assert!(out.status.success());
        let files = (std::fs::read(d.join("run.sol")).unwrap(), std::fs::read(d.join("ev.csv")).unwrap());
        if let Some(p) = &previous {
            assert_eq!(p, &files);
        }
        previous = Some(files);
    }
}

#[test]
fn zero_data_gives_zero_approximant() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_config(d, [0.0; 6], "");
    assert!(run(&["solve", "--config", "run.json"], d).status.success());
    let text = std::fs::read_to_string(d.join("run.sol")).unwrap();
    let body = text.lines().skip_while(|l| !l.starts_with("backend ")).skip(1);
    for line in body {
        let c: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
        assert_eq!(c, 0.0);
    }
}

#[test]
fn malformed_config_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let path = write_config(d, HOT, "");
    let text = std::fs::read_to_string(&path).unwrap().replace("\"n\": 5", "\"n\": 5, \"typo\": 1");
    std::fs::write(&path, text).unwrap();
    assert_eq!(run(&["solve", "--config", "run.json"], d).status.code(), Some(2));
    write_config(d, HOT, "");
    let text = std::fs::read_to_string(&path).unwrap().replace("\"alpha\": 3.0", "\"alpha\": 0.5");
    std::fs::write(&path, text).unwrap();
    assert_eq!(run(&["solve", "--config", "run.json"], d).status.code(), Some(2));
    assert!(!d.join("run.sol").exists() && !d.join("report.json").exists());
    assert_eq!(run(&["solve", "--config", "missing.json"], d).status.code(), Some(2));
}

#[test]
fn table_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["table1"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(!text.contains("OUT OF BAND"));

    let out = run(&["table1", "--n", "7", "--json"], dir.path());
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let u2 = rows.as_array().unwrap().iter().find(|r| r["target"] == "u2").unwrap();
    assert!(u2["error"].as_f64().unwrap() <= 5e-6);
    assert_eq!(u2["pass"], true);
}
