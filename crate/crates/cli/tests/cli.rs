use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn stoq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stoq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TRIANGLE: &str = "qubits 3\n\
    term 1 X@0 X@1\nterm 1 Y@0 Y@1\nterm 1 Z@0 Z@1\n\
    term 1 X@1 X@2\nterm 1 Y@1 Y@2\nterm 1 Z@1 Z@2\n\
    term 1 X@0 X@2\nterm 1 Y@0 Y@2\nterm 1 Z@0 Z@2\n";

const EDGE: &str = "# antiferromagnetic pair\nqubits 2\nterm 1 X@0 X@1\nterm 1 Y@0 Y@1\nterm 2/2 Z@0 Z@1\n";

#[test]
fn xyz_triangle_is_rejected() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "tri.txt", TRIANGLE);
    let out = stoq(&["check-xyz", arg(&f)]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.starts_with("NOT STOQUASTIC\n"), "{text}");
    assert!(text.contains("rejected at step"));
}

#[test]
fn xyz_single_edge_is_accepted_with_trace() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "edge.txt", EDGE);
    let trace = dir.path().join("trace.json");
    let out = stoq(&["check-xyz", arg(&f), "--trace", arg(&trace)]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("STOQUASTIC\n"), "{text}");
    assert_eq!(text.lines().count(), 4);

    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(doc["stoquastic"], true);
    assert!(doc["rejected_at"].is_null());
    assert_eq!(doc["solution"].as_array().unwrap().len(), 2);
    for entry in doc["solution"].as_array().unwrap() {
        let mut perm: Vec<u64> = entry["perm"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
        perm.sort_unstable();
        assert_eq!(perm, vec![1, 2, 3]);
        assert!(entry["signs"].as_array().unwrap().iter().all(|s| s.as_i64().unwrap().abs() == 1));
    }
    let steps = doc["steps"].as_array().unwrap();
    assert!(!steps.is_empty());
    assert!(steps.iter().all(|s| s["step_id"].is_string() && s["action"].is_string() && s["detail"].is_string()));
    // rational literals keep their original spelling
    assert_eq!(doc["input_terms"][2]["coeff"], "2/2");
}

#[test]
fn xyz_rejects_off_diagonal_coupling() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.txt", "qubits 2\nterm 1 X@0 Z@1\n");
    let out = stoq(&["check-xyz", arg(&f)]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.txt");
    let garbage = write(&dir, "g.txt", "qubits 2\nterm one X@0\n");
    let headerless = write(&dir, "h.txt", "term 1 X@0 X@1\n");
    let same_qubit = write(&dir, "s.txt", "qubits 2\nterm 1 X@0 X@0\n");
    for sub in ["check-xyz", "check-2q", "decompose", "realness", "oracle"] {
        for f in [&missing, &garbage, &headerless, &same_qubit] {
            assert_eq!(code(&stoq(&[sub, arg(f)])), 2, "{sub} {}", f.display());
        }
    }
    assert_eq!(code(&stoq(&["gen-rxc3", arg(&missing)])), 2);
    assert_eq!(code(&stoq(&["no-such-command"])), 2);
    assert_eq!(code(&stoq(&["region-scan", "--ax", "0:1"])), 2);
    assert_eq!(code(&stoq(&["region-scan", "--ax", "0:1:1"])), 2);
}

#[test]
fn two_qubit_counterexample_has_witness() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "eq5.txt",
        "qubits 2\nterm -2 X@0\nterm 0.5 Z@0\nterm -2 X@1\nterm 0.5 Z@1\nterm 0.2 X@0 X@1\nterm 1 Z@0 Z@1\n",
    );
    let out = stoq(&["check-2q", arg(&f)]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("REAL UNDER LOCAL ROTATIONS\n"));
    assert!(text.contains("\nSTOQUASTIC\n"));
    assert!(text.contains("theta_L = "));
    assert!(text.contains("O1 = ["));
}

#[test]
fn two_qubit_non_real_instance() {
    // β = diag(1, 2, 3), S = (1, 1, 1), P = 0
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "nr.txt",
        "qubits 2\nterm 1 X@0 X@1\nterm 2 Y@0 Y@1\nterm 3 Z@0 Z@1\nterm 1 X@0\nterm 1 Y@0\nterm 1 Z@0\n",
    );
    let out = stoq(&["check-2q", arg(&f)]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.starts_with("NOT REAL UNDER LOCAL ROTATIONS\n"), "{text}");
    assert!(text.contains("I10 = 1.2e2"), "{text}");

    let out = stoq(&["realness", arg(&f)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("NOT REAL UNDER LOCAL ROTATIONS\n"));
}

#[test]
fn two_qubit_xy_is_already_stoquastic() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "xy.txt", "qubits 2\nterm -1 X@0 X@1\nterm -1 Y@0 Y@1\n");
    let out = stoq(&["check-2q", arg(&f)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("case: fixed_basis"));
}

#[test]
fn two_qubit_requires_two_qubits() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "tri.txt", TRIANGLE);
    assert_eq!(code(&stoq(&["check-2q", arg(&f)])), 2);
}

#[test]
fn decomposition_listing() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "d.txt", "qubits 3\nterm 1 Z@0 X@1\nterm 1 X@1 Z@2\nterm -2 X@1\n");
    let out = stoq(&["decompose", arg(&f)]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "DECOMPOSED\nedge 0 1: Z@0X@1=1 X@1=-1\nedge 1 2: X@1Z@2=1 X@1=-1\n"
    );

    let g = write(&dir, "p.txt", "qubits 2\nterm 1 X@0\nterm -1 X@0 X@1\n");
    let out = stoq(&["decompose", arg(&g)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("NOT DECOMPOSABLE\n"));
}

#[test]
fn oracle_modes() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "tri.txt", TRIANGLE);
    let out = stoq(&["oracle", arg(&f)]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "NONE\n");
    let out = stoq(&["oracle", arg(&f), "--mode", "realness"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("FOUND\n"));
    assert_eq!(code(&stoq(&["oracle", arg(&f), "--cap", "2"])), 2);
}

#[test]
fn gen_rxc3_matches_printed_form() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "inst.txt",
        "elements 6\nset 0 1 2\nset 2 3 4\nset 1 2 4\nset 0 3 5\nset 1 4 5\nset 0 3 5\n",
    );
    let out = stoq(&["gen-rxc3", arg(&f)]);
    assert_eq!(code(&out), 0);
    let expected = "# X1X2 + X2X3 + X1X3\n# Y3X4 + X4X5 + Y3X5\n# Y2Z3 + Z3Y5 + Y2Y5\n\
                    # Y1Y4 + Y4X6 + Y1X6\n# Z2Z5 + Z5Y6 + Z2Y6\n# Z1Z4 + Z4Z6 + Z1Z6\n\
                    qubits 6\n\
                    term 1 X@0 X@1\nterm 1 X@1 X@2\nterm 1 X@0 X@2\n\
                    term 1 Y@2 X@3\nterm 1 X@3 X@4\nterm 1 Y@2 X@4\n\
                    term 1 Y@1 Z@2\nterm 1 Z@2 Y@4\nterm 1 Y@1 Y@4\n\
                    term 1 Y@0 Y@3\nterm 1 Y@3 X@5\nterm 1 Y@0 X@5\n\
                    term 1 Z@1 Z@4\nterm 1 Z@4 Y@5\nterm 1 Z@1 Y@5\n\
                    term 1 Z@0 Z@3\nterm 1 Z@3 Z@5\nterm 1 Z@0 Z@5\n";
    assert_eq!(stdout(&out), expected);

    // the generated file is itself valid input
    let h = write(&dir, "h.txt", &stdout(&out));
    assert_eq!(code(&stoq(&["realness", arg(&h)])), 0);

    let bad = write(&dir, "bad.txt", "elements 6\nset 0 1 2\n");
    assert_eq!(code(&stoq(&["gen-rxc3", arg(&bad)])), 2);
}

#[test]
fn region_scan_default_grid_has_4000_rows() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("scan.csv");
    let out = stoq(&["region-scan", "--out", arg(&csv)]);
    assert_eq!(code(&out), 0);
    let body = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], "aX,aZ,aXX,stoquastic,case_id");
    assert_eq!(lines.len(), 4001);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 5));
}

#[test]
fn region_scan_is_deterministic_across_execution_modes() {
    let args = ["region-scan", "--ax", "0:2:6", "--az", "0:2:6", "--axx", "0:1:3"];
    let par = stoq(&args);
    let mut seq_args = args.to_vec();
    seq_args.push("--sequential");
    let seq = stoq(&seq_args);
    assert_eq!(code(&par), 0);
    assert_eq!(par.stdout, seq.stdout);
    assert_eq!(stdout(&par).lines().count(), 1 + 6 * 6 * 3);
    assert_eq!(par.stdout, stoq(&args).stdout);
}
