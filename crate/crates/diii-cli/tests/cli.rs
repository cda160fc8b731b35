//! End-to-end tests of the binary through its public surface: emit,
//! check, invariant, classify, exit codes and report determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_diii"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn diii")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp(name: &str) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join(name);
    (dir, path)
}

fn emit(model: &str, grid: &str, path: &Path) {
    let out = run(&[
        "emit",
        model,
        "--grid",
        grid,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "emit {model}: {out:?}");
}

#[test]
fn models_table_lists_expected_rows() {
    let out = run(&["models"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("q_minus") && text.contains("circle") && text.contains("nu=-1"));
    assert!(text.contains("q_s") && text.contains("torus") && text.contains("(+1,+1,-1)"));
}

#[test]
fn emit_then_check_passes() {
    let (_d_path, path) = tmp("qm.json");
    emit("q_minus", "256", &path);
    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(body["schema"], "diii-sample/1");
    assert_eq!(body["grid"][0], 256);
    assert_eq!(body["rank"], 2);
    assert_eq!(body["data"].as_array().unwrap().len(), 256 * 4);

    let out = run(&["check", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn emit_unknown_model_exits_2() {
    let out = run(&["emit", "q_bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn emit_bad_grid_exits_2() {
    let out = run(&["emit", "q_minus", "--grid", "15"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_locates_corrupted_sample() {
    let (_d_path, path) = tmp("qm.json");
    emit("q_minus", "64", &path);
    let mut body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    // overwrite sample 5 with the identity: breaks the sewing relation
    for (i, entry) in [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]
        .iter()
        .enumerate()
    {
        body["data"][5 * 4 + i] = serde_json::json!(entry);
    }
    std::fs::write(&path, serde_json::to_string(&body).unwrap()).unwrap();
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL"));
    // the worst sewing residual is located at the corrupted index or its partner
    assert!(text.contains(" 5") || text.contains("59"), "{text}");
}

#[test]
fn invariant_of_q_minus_with_toeplitz() {
    let (_d_path, path) = tmp("qm.json");
    emit("q_minus", "256", &path);
    let out = run(&["invariant", path.to_str().unwrap(), "--toeplitz", "--gerbe"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("nu_1d      = -1"));
    assert!(text.contains("toeplitz   = -1"));
    assert!(text.contains("agrees with nu"));
    assert!(text.contains("gerbe_sign = -1"));
}

#[test]
fn invariant_of_torus_models() {
    let (_d_path, path) = tmp("qw2.json");
    emit("q_w2", "32,32", &path);
    let out = run(&["invariant", path.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body["invariants"]["nu_weak"][0], 1);
    assert_eq!(body["invariants"]["nu_weak"][1], -1);
    assert_eq!(body["invariants"]["nu_strong"], 1);
}

#[test]
fn json_reports_are_byte_identical() {
    let (_d_path, path) = tmp("qs.json");
    emit("q_s", "32,32", &path);
    let a = run(&["invariant", path.to_str().unwrap(), "--format", "json"]);
    let b = run(&["invariant", path.to_str().unwrap(), "--format", "json"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn invariant_report_written_to_out() {
    let (_d_path, path) = tmp("qp.json");
    emit("q_plus", "64", &path);
    let (_d_report, report) = tmp("report.json");
    let out = run(&[
        "invariant",
        path.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(body["invariants"]["nu_1d"], 1);
    assert!(body["input_digest"]
        .as_str()
        .unwrap()
        .starts_with("sha256:"));
}

#[test]
fn classify_circle_pairs() {
    let (_d_qp, qp) = tmp("qp.json");
    let (_d_qm, qm) = tmp("qm.json");
    emit("q_plus", "128", &qp);
    emit("q_minus", "128", &qm);
    let out = run(&["classify", qp.to_str().unwrap(), qm.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("NotHomotopic"));
    assert!(text.contains("relative invariant = -1"));

    let out = run(&["classify", qm.to_str().unwrap(), qm.to_str().unwrap()]);
    assert!(stdout(&out).contains("Homotopic"));
}

#[test]
fn classify_torus_pair_reports_weak_ratio() {
    let (_d_w1, w1) = tmp("w1.json");
    let (_d_w2, w2) = tmp("w2.json");
    emit("q_w1", "32,32", &w1);
    emit("q_w2", "32,32", &w2);
    let out = run(&["classify", w1.to_str().unwrap(), w2.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("relative weak pair = (-1, -1)"));
}

#[test]
fn classify_space_mismatch_exits_2() {
    let (_d_qp, qp) = tmp("qp.json");
    let (_d_w1, w1) = tmp("w1.json");
    emit("q_plus", "64", &qp);
    emit("q_w1", "16,16", &w1);
    let out = run(&["classify", qp.to_str().unwrap(), w1.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_error_exits_3() {
    let (_d_path, path) = tmp("garbage.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["check", "/nonexistent/file.json"]);
    assert_eq!(out.status.code(), Some(3));
}

/// Build a hamiltonian-kind file `H = [[0, q*], [q, 0]]` from an emitted
/// sewing file and push it through check and invariant.
#[test]
fn hamiltonian_kind_round_trip() {
    let (_d_qm, qm) = tmp("qm.json");
    emit("q_minus", "64", &qm);
    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&qm).unwrap()).unwrap();
    let rank = body["rank"].as_u64().unwrap() as usize;
    let data = body["data"].as_array().unwrap();
    let per = rank * rank;
    let dim = 2 * rank;
    let mut hdata: Vec<[f64; 2]> = Vec::new();
    for p in 0..data.len() / per {
        let q: Vec<[f64; 2]> = (0..per)
            .map(|i| {
                let e = data[p * per + i].as_array().unwrap();
                [e[0].as_f64().unwrap(), e[1].as_f64().unwrap()]
            })
            .collect();
        // row-major H of size 2*rank: upper-right block q^dagger, lower-left q
        for r in 0..dim {
            for c in 0..dim {
                let v = if r < rank && c >= rank {
                    let (qr, qc) = (c - rank, r); // adjoint: conj(q[c', r'])
                    let e = q[qr * rank + qc];
                    [e[0], -e[1]]
                } else if r >= rank && c < rank {
                    q[(r - rank) * rank + c]
                } else {
                    [0.0, 0.0]
                };
                hdata.push(v);
            }
        }
    }
    let hfile = serde_json::json!({
        "schema": "diii-sample/1",
        "space": "circle",
        "grid": [64],
        "rank": rank,
        "kind": "hamiltonian",
        "data": hdata,
    });
    let (_d_hpath, hpath) = tmp("hm.json");
    std::fs::write(&hpath, serde_json::to_string(&hfile).unwrap()).unwrap();

    let out = run(&["check", hpath.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("gap: 1.0"), "flat field has unit gap: {text}");

    let out = run(&["invariant", hpath.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let rep: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rep["invariants"]["nu_1d"], -1);
    assert_eq!(rep["kind"], "hamiltonian");
    let gap = rep["diagnostics"]["gap"].as_f64().unwrap();
    assert!((gap - 1.0).abs() < 1e-9, "gap {gap}");
}

#[test]
fn thread_cap_env_is_honored() {
    let (_d, path) = tmp("qs.json");
    emit("q_s", "32,32", &path);
    let out = bin()
        .env("DIII_THREADS", "1")
        .args(["invariant", path.to_str().unwrap(), "--format", "json"])
        .output()
        .expect("spawn diii");
    assert!(out.status.success());
    let rep: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rep["invariants"]["nu_strong"], -1);
}
