use std::path::PathBuf;
use std::process::{Command, Output};

fn fdrm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdrm")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fdrm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn com1_document(name: &str) -> PathBuf {
    let path = scratch(name);
    let o = fdrm(&[
        "construct",
        "--method",
        "gab-subcode",
        "--q",
        "2",
        "--delta",
        "4",
        "--r",
        "2",
        "--diagram",
        "cols:2,2,4,4,6,8",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("k=8 delta>=4 method=gab-subcode"));
    assert!(stdout(&o).contains("optimal=true"));
    path
}

#[test]
fn bound_output() {
    let o = fdrm(&["bound", "--diagram", "cols:2,3,4,5", "--delta", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "v=[9,10] kmax=9\n");
}

#[test]
fn grid_diagram_from_file() {
    let path = scratch("grid.txt");
    std::fs::write(&path, "****\n.***\n..**\n").unwrap();
    let arg = format!("@{}", path.display());
    let o = fdrm(&["bound", "--diagram", &arg, "--delta", "1"]);
    assert_eq!(stdout(&o), "v=[9] kmax=9\n");
}

#[test]
fn malformed_profile_is_usage_error() {
    assert_eq!(fdrm(&["bound", "--diagram", "cols:3,2", "--delta", "1"]).status.code(), Some(2));
    assert_eq!(fdrm(&["bound", "--diagram", "cols:a", "--delta", "1"]).status.code(), Some(2));
    assert_eq!(
        fdrm(&["construct", "--method", "nosuch", "--q", "2", "--delta", "1", "--diagram", "cols:1"]).status.code(),
        Some(2)
    );
    assert_eq!(fdrm(&["verify", "/nonexistent/code"]).status.code(), Some(2));
    assert_eq!(fdrm(&["example", "--budget", "0", "com3"]).status.code(), Some(2));
}

#[test]
fn construct_verify_round_trip() {
    let path = com1_document("rt.code");
    let o = fdrm(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("support_ok=true"));
    assert!(out.contains("distance=4(exhaustive)"));
    assert!(out.contains("optimal=true"));
}

#[test]
fn tampered_support_fails() {
    let path = com1_document("tamper.code");
    let text = std::fs::read_to_string(&path).unwrap();
    let (head, basis) = text.split_once("basis:\n").unwrap();
    let mut lines: Vec<String> = basis.lines().map(String::from).collect();
    // the bottom row of cols:2,2,4,4,6,8 only has a dot in the last column
    lines[7].replace_range(0..1, "1");
    std::fs::write(&path, format!("{head}basis:\n{}\n", lines.join("\n"))).unwrap();
    let o = fdrm(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("support_ok=false"));
    assert!(stdout(&o).contains("FAIL: support"));
}

#[test]
fn inflated_dimension_header_fails() {
    let path = com1_document("k42.code");
    let text = std::fs::read_to_string(&path).unwrap().replace("\nk=8\n", "\nk=42\n");
    std::fs::write(&path, text).unwrap();
    let o = fdrm(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("dimension mismatch"));
}

#[test]
fn overclaimed_distance_fails() {
    let path = com1_document("d5.code");
    let text = std::fs::read_to_string(&path).unwrap().replace("\ndelta=4\n", "\ndelta=5\n");
    std::fs::write(&path, text).unwrap();
    let o = fdrm(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL: distance"));
}

#[test]
fn examples_pass() {
    for id in ["com2", "com3", "diag-ex"] {
        let o = fdrm(&["example", id]);
        assert_eq!(o.status.code(), Some(0), "{id}");
        assert!(stdout(&o).trim_end().ends_with("PASS"));
    }
    assert!(stdout(&fdrm(&["example", "com2"])).contains("k=13 delta>=4"));
    assert_eq!(fdrm(&["example", "nosuch"]).status.code(), Some(2));
}

#[test]
fn stdout_document_is_worker_independent() {
    let base = ["construct", "--method", "mds-diag", "--q", "4", "--delta", "3", "--diagram", "cols:2,3,4,5"];
    let one = fdrm(&[&base[..], &["--workers", "1"]].concat());
    let four = fdrm(&[&base[..], &["--workers", "4"]].concat());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stderr, four.stderr);
    assert!(String::from_utf8_lossy(&one.stderr).starts_with("k=5 "));
}

#[test]
fn precondition_messages_name_the_condition() {
    let o = fdrm(&["construct", "--method", "thm-com3", "--q", "2", "--delta", "3", "--diagram", "cols:2,2,3,6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("precondition failed"));
}
