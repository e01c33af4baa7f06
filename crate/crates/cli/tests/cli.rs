use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lidskii_core::eig_orbit::global_minimizer_eig;
use lidskii_core::io::{matrix_from_json, matrix_to_json, FrameJson, MatrixJson};
use lidskii_core::linalg::{from_real, HermitianMatrix, SpectrumVector};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lidskii"));
    c.env_remove("LIDSKII_THREADS");
    c
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn real(dir: &TempDir, name: &str, rows: usize, entries: &[f64]) -> PathBuf {
    write(dir, name, &matrix_to_json(&from_real(rows, entries.len() / rows, entries)))
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let out: Output = bin().args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let report = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report, String::from_utf8(out.stderr).unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn certify_eig_aligned_pair_is_certified() {
    let dir = TempDir::new().unwrap();
    let s = real(&dir, "s.json", 2, &[3.0, 0.0, 0.0, 1.0]);
    let g = real(&dir, "g.json", 2, &[2.0, 0.0, 0.0, 0.0]);
    let (code, r, _) = run(&["certify-eig", "--S", p(&s), "--G0", p(&g), "--mu", "2,0"]);
    assert_eq!(code, 0);
    assert_eq!(r["outcome"], "certified_global");
    assert_eq!(r["result"]["verdict"], "certified_global");
    assert_eq!(r["schema_version"], 1);
}

#[test]
fn certify_eig_misaligned_pair_carries_givens_samples() {
    let dir = TempDir::new().unwrap();
    let s = real(&dir, "s.json", 2, &[3.0, 0.0, 0.0, 1.0]);
    let g = real(&dir, "g.json", 2, &[0.0, 0.0, 0.0, 2.0]);
    let (code, r, _) = run(&["certify-eig", "--S", p(&s), "--G0", p(&g)]);
    assert_eq!(code, 2);
    assert_eq!(r["outcome"], "not_local_min");
    let w = &r["result"]["descent_witness"];
    assert_eq!(w["kind"]["kind"], "givens");
    let samples = w["samples"].as_array().unwrap();
    assert!(samples.len() > 10);
    let start = w["start_value"].as_f64().unwrap();
    assert!(samples.iter().all(|x| x["value"].as_f64().unwrap() < start));
}

#[test]
fn certify_eig_without_numerical_witness_is_inconclusive() {
    // a 1e-7 rotation of the global minimizer: descent exists but drops
    // below the verification floor
    let dir = TempDir::new().unwrap();
    let (c, s) = (1e-7f64.cos(), 1e-7f64.sin());
    let sm = real(&dir, "s.json", 2, &[3.0, 0.0, 0.0, 1.0]);
    let g = real(&dir, "g.json", 2, &[2.0 * c * c, 2.0 * c * s, 2.0 * c * s, 2.0 * s * s]);
    let (code, r, _) = run(&["certify-eig", "--S", p(&sm), "--G0", p(&g)]);
    assert_eq!(code, 3);
    assert_eq!(r["outcome"], "inconclusive");
}

#[test]
fn certify_eig_rejects_mu_off_the_orbit() {
    let dir = TempDir::new().unwrap();
    let s = real(&dir, "s.json", 2, &[3.0, 0.0, 0.0, 1.0]);
    let g = real(&dir, "g.json", 2, &[2.0, 0.0, 0.0, 0.0]);
    let (code, _, err) = run(&["certify-eig", "--S", p(&s), "--G0", p(&g), "--mu", "5,0"]);
    assert_eq!(code, 1);
    assert!(err.contains("orbit"), "{err}");
}

#[test]
fn missing_file_exits_1() {
    let dir = TempDir::new().unwrap();
    let g = real(&dir, "g.json", 2, &[2.0, 0.0, 0.0, 0.0]);
    let missing = dir.path().join("nope.json");
    let (code, r, err) = run(&["certify-eig", "--S", p(&missing), "--G0", p(&g)]);
    assert_eq!(code, 1);
    assert_eq!(r, Value::Null);
    assert!(err.contains("nope.json"), "{err}");
}

#[test]
fn malformed_json_reports_line() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{\"rows\": 2,\n \"cols\": 2,\n \"re\": [1, 2,, 3]}");
    let g = real(&dir, "g.json", 2, &[2.0, 0.0, 0.0, 0.0]);
    let (code, _, err) = run(&["certify-eig", "--S", p(&bad), "--G0", p(&g)]);
    assert_eq!(code, 1);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("--S"), "{err}");
}

#[test]
fn wrong_length_names_the_field() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"rows":2,"cols":2,"re":[1,0,0,1],"im":[0,0]}"#);
    let (code, _, err) = run(&["joint-svd", "--A", p(&bad), "--B", p(&bad)]);
    assert_eq!(code, 1);
    assert!(err.contains("`im`"), "{err}");
}

#[test]
fn usage_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    let s = real(&dir, "s.json", 2, &[3.0, 0.0, 0.0, 1.0]);
    assert_eq!(run(&["no-such-command"]).0, 1);
    assert_eq!(run(&["certify-eig", "--S", p(&s)]).0, 1);
    assert_eq!(run(&["certify-eig", "--S", p(&s), "--G0", p(&s), "--tol", "0"]).0, 1);
    assert_eq!(run(&["certify-eig", "--S", p(&s), "--G0", p(&s), "--norm", "schatten:0.5"]).0, 1);
    assert_eq!(run(&["fod-optimize", "--S", p(&s), "--a", "1,1", "--restarts", "0"]).0, 1);
    // the certifiers need a strictly convex norm
    assert_eq!(run(&["certify-eig", "--S", p(&s), "--G0", p(&s), "--norm", "spectral"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn non_hermitian_input_exits_1() {
    let dir = TempDir::new().unwrap();
    let s = real(&dir, "s.json", 2, &[3.0, 1.0, 0.0, 1.0]);
    let (code, _, err) = run(&["certify-eig", "--S", p(&s), "--G0", p(&s)]);
    assert_eq!(code, 1);
    assert!(err.contains("Hermitian"), "{err}");
}

#[test]
fn certify_sv_exit_codes() {
    let dir = TempDir::new().unwrap();
    let a = real(&dir, "a.json", 2, &[3.0, 0.0, 0.0, 1.0]);
    let good = real(&dir, "good.json", 2, &[2.0, 0.0, 0.0, 0.0]);
    let bad = real(&dir, "bad.json", 2, &[0.0, 0.0, 0.0, 2.0]);
    let (code, r, _) = run(&["certify-sv", "--A", p(&a), "--B", p(&good)]);
    assert_eq!((code, r["outcome"].as_str()), (0, Some("certified_global")));
    let (code, r, _) = run(&["certify-sv", "--A", p(&a), "--B", p(&bad)]);
    assert_eq!((code, r["outcome"].as_str()), (2, Some("not_local_min")));
    assert!(r["result"]["descent_witness"].is_object());
}

#[test]
fn joint_svd_exit_codes() {
    let dir = TempDir::new().unwrap();
    let a = real(&dir, "a.json", 2, &[3.0, 0.0, 0.0, 1.0]);
    let b = real(&dir, "b.json", 2, &[-1.0, 0.0, 0.0, 2.0]);
    let (code, r, _) = run(&["joint-svd", "--A", p(&a), "--B", p(&b)]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["alpha"], serde_json::json!([3.0, 1.0]));
    assert!(r["result"]["residual_b"].as_f64().unwrap() < 1e-12);

    let c = real(&dir, "c.json", 2, &[0.0, 1.0, 0.0, 0.0]);
    let (code, r, _) = run(&["joint-svd", "--A", p(&a), "--B", p(&c)]);
    assert_eq!(code, 2);
    assert_eq!(r["outcome"], "violates_structure");
}

#[test]
fn min_eig_matrix_round_trips_bitwise() {
    let dir = TempDir::new().unwrap();
    let s_entries = [2.0, 1.0, 0.3, 1.0, 2.0, -0.7, 0.3, -0.7, 0.1];
    let s = real(&dir, "s.json", 3, &s_entries);
    let out = dir.path().join("report.json");
    let (code, _, _) = run(&["min-eig", "--S", p(&s), "--mu", "1.5,0.25,-1", "--out", p(&out)]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let parsed = matrix_from_json(&r["result"]["matrix"].to_string()).unwrap();
    let direct = global_minimizer_eig(
        &HermitianMatrix::from_real(3, &s_entries).unwrap(),
        &SpectrumVector::new(vec![1.5, 0.25, -1.0]).unwrap(),
    )
    .unwrap();
    for (x, y) in parsed.iter().zip(direct.as_matrix().iter()) {
        assert_eq!(x.re.to_bits(), y.re.to_bits());
        assert_eq!(x.im.to_bits(), y.im.to_bits());
    }
    let again: MatrixJson = serde_json::from_str(&matrix_to_json(&parsed)).unwrap();
    let written: MatrixJson = serde_json::from_value(r["result"]["matrix"].clone()).unwrap();
    assert_eq!(again, written);
}

#[test]
fn min_sv_reports_objective() {
    let dir = TempDir::new().unwrap();
    let a = real(&dir, "a.json", 2, &[0.0, 3.0, 1.0, 0.0]);
    let (code, r, _) = run(&["min-sv", "--A", p(&a), "--s", "2,0", "--norm", "frobenius"]);
    assert_eq!(code, 0);
    let psi = r["result"]["objective"].as_f64().unwrap();
    assert!((psi - 2f64.sqrt()).abs() < 1e-12, "{psi}");
}

#[test]
fn fod_optimize_is_thread_count_independent_and_frames_round_trip() {
    let dir = TempDir::new().unwrap();
    let s = real(&dir, "s.json", 3, &[3.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.5]);
    let args = ["fod-optimize", "--S", p(&s), "--a", "1,1,0.5,0.5", "--restarts", "6", "--seed", "3"];
    let outs: Vec<Output> = ["1", "4"]
        .iter()
        .map(|n| bin().args(args).env("LIDSKII_THREADS", n).output().unwrap())
        .collect();
    assert_eq!(outs[0].stdout, outs[1].stdout);
    let r: Value = serde_json::from_slice(&outs[0].stdout).unwrap();
    assert_eq!(outs[0].status.code(), Some(r["exit_code"].as_i64().unwrap() as i32));
    assert_eq!(r["result"]["runs"].as_array().unwrap().len(), 6);

    let frame_text = r["result"]["frame"].to_string();
    let g = write(&dir, "g.json", &frame_text);
    let parsed = lidskii_core::io::read_frame(&g).unwrap();
    let back: FrameJson = serde_json::from_str(&lidskii_core::io::frame_to_json(&parsed)).unwrap();
    let written: FrameJson = serde_json::from_str(&frame_text).unwrap();
    assert_eq!(back, written);

    // the optimizer's frame passes the standalone check with the same verdict
    let (code, rc, _) = run(&["fod-check", "--S", p(&s), "--G", p(&g), "--norm", "frobenius"]);
    assert_eq!(code, outs[0].status.code().unwrap());
    assert_eq!(rc["outcome"], r["outcome"]);
}

#[test]
fn fod_optimize_rejects_bad_thread_cap() {
    let dir = TempDir::new().unwrap();
    let s = real(&dir, "s.json", 2, &[3.0, 0.0, 0.0, 1.0]);
    let out = bin()
        .args(["fod-optimize", "--S", p(&s), "--a", "1"])
        .env("LIDSKII_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fod_check_flags_misaligned_frame() {
    // S = diag(3, 1) with the single vector e2: S - S_G = diag(3, 0) keeps e2
    // as an eigenvector, but the spectra are not aligned
    let dir = TempDir::new().unwrap();
    let s = real(&dir, "s.json", 2, &[3.0, 0.0, 0.0, 1.0]);
    let g = write(&dir, "g.json", r#"{"d":2,"a":[1.0],"vectors":[{"rows":2,"cols":1,"re":[0,1],"im":[0,0]}]}"#);
    let (code, r, _) = run(&["fod-check", "--S", p(&s), "--G", p(&g)]);
    assert_eq!(code, 2);
    assert_eq!(r["result"]["analysis"]["structure"]["verdict"]["verdict"], "violates_structure");

    let e1 = write(&dir, "e1.json", r#"{"d":2,"a":[1.0],"vectors":[{"rows":2,"cols":1,"re":[1,0],"im":[0,0]}]}"#);
    let (code, r, _) = run(&["fod-check", "--S", p(&s), "--G", p(&e1)]);
    assert_eq!(code, 0);
    assert_eq!(r["outcome"], "consistent_with_local_min");
}

#[test]
fn fod_check_rejects_frame_off_its_spheres() {
    let dir = TempDir::new().unwrap();
    let s = real(&dir, "s.json", 2, &[3.0, 0.0, 0.0, 1.0]);
    let g = write(&dir, "g.json", r#"{"d":2,"a":[4.0],"vectors":[{"rows":2,"cols":1,"re":[1,0],"im":[0,0]}]}"#);
    let (code, _, err) = run(&["fod-check", "--S", p(&s), "--G", p(&g)]);
    assert_eq!(code, 1);
    assert!(err.contains("sphere"), "{err}");
}

#[test]
fn water_fill_reports_level() {
    let (code, r, _) = run(&["water-fill", "--lambda", "3,2,1", "--t", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["level"].as_f64(), Some(1.0));
    assert_eq!(r["result"]["spectrum"], serde_json::json!([2.0, 1.0, 0.0]));
    assert_eq!(run(&["water-fill", "--lambda", "1,2", "--t", "3"]).0, 1);
    assert_eq!(run(&["water-fill", "--lambda", "3,2", "--t", "-1"]).0, 1);
}

#[test]
fn property_suite_is_deterministic() {
    let start = std::time::Instant::now();
    let a = bin().args(["property-suite", "--seed", "17"]).output().unwrap();
    assert!(start.elapsed().as_secs() < 60, "small scale took {:?}", start.elapsed());
    let b = bin().args(["property-suite", "--seed", "17"]).env("LIDSKII_THREADS", "1").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r["result"]["all_passed"], true);
    assert_eq!(r["parameters"]["scale"], "small");
}
