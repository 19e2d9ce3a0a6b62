use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qvhs::asymptotics::{check_integrability, LieBigrading};
use qvhs::doc::{AlgebraDoc, AsymDoc, OrbitDoc, QuantumDoc};
use qvhs::frobenius::adapted_algebra;
use qvhs::hodge::NilpotentOrbitData;
use qvhs::quantum::QuantumPotential;
use qvhs::rational::rat;
use qvhs::{Mat, QSeries, SeriesMatrix};
use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn qvhs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qvhs")).args(args).output().expect("binary runs")
}

fn json_report(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = qvhs(&all);
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report)
}

fn failed_check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name && c["passed"] == false)
        .unwrap_or_else(|| panic!("no failed check {name} in {report}"))
}

fn write_json<T: serde::Serialize>(dir: &TempDir, name: &str, doc: &T) -> String {
    let path = dir.path().join(name);
    fs::write(&path, serde_json::to_string_pretty(doc).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn p4_algebra_passes() {
    let (code, report) = json_report(&["check-frobenius", p(&fixture("p4_algebra.json"))]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["passed"], true);
    assert_eq!(report["conventions_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn corrupted_structure_constant_is_located() {
    let dir = TempDir::new().unwrap();
    let mut doc: AlgebraDoc = serde_json::from_str(&fs::read_to_string(fixture("p4_algebra.json")).unwrap()).unwrap();
    let entry = doc.product.iter_mut().find(|e| e.a == 1 && e.b == 2).unwrap();
    entry.coeffs[3] = "2".into();
    let path = write_json(&dir, "bad.json", &doc);
    let (code, report) = json_report(&["check-frobenius", &path]);
    assert_eq!(code, 1);
    assert_eq!(report["passed"], false);
    let failures: Vec<&Value> = report["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert!(!failures.is_empty());
    assert!(failures.iter().any(|c| c["witness"]["indices"].as_array().is_some_and(|v| v.len() >= 3)), "{report}");
}

#[test]
fn bad_rational_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(fixture("p4_algebra.json")).unwrap().replacen("\"1\"", "\"1/0\"", 1);
    let path = dir.path().join("bad.json");
    fs::write(&path, text).unwrap();
    let out = qvhs(&["check-frobenius", p(&path)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("B[0][4]"), "{err}");
}

#[test]
fn unknown_field_and_missing_file_exit_2() {
    let dir = TempDir::new().unwrap();
    let mut v: Value = serde_json::from_str(&fs::read_to_string(fixture("p4_algebra.json")).unwrap()).unwrap();
    v["extra"] = Value::from(1);
    let path = write_json(&dir, "extra.json", &v);
    assert_eq!(qvhs(&["check-frobenius", &path]).status.code(), Some(2));
    assert_eq!(qvhs(&["check-frobenius", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(qvhs(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn zero_quantum_part_passes_wdvv() {
    let dir = TempDir::new().unwrap();
    let alg: Value = serde_json::from_str(&fs::read_to_string(fixture("p4_algebra.json")).unwrap()).unwrap();
    let doc = serde_json::json!({"classical": alg, "psi": [[]]});
    let path = write_json(&dir, "zero.json", &doc);
    let (code, report) = json_report(&["check-wdvv", &path]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["order"], 6);
    let (_, report) = json_report(&["check-wdvv", &path, "--order", "3"]);
    assert_eq!(report["order"], 3);
}

#[test]
fn wdvv_violation_exits_1() {
    let dir = TempDir::new().unwrap();
    let p = vec![Mat::from_i64(&[&[1, 0], &[0, 0]]), Mat::from_i64(&[&[0, 0], &[0, 1]])];
    let alg = adapted_algebra(2, 2, &p).unwrap();
    // a mixed term in psi^1 alone breaks the WDVV system
    let psi1 = QSeries::from_terms(2, 4, [(vec![1, 1], rat(1))]).unwrap();
    let pot = QuantumPotential::from_algebra(&alg, vec![psi1, QSeries::zero(2, 4)], 4).unwrap();
    let path = write_json(&dir, "pot.json", &QuantumDoc::from_potential(&pot));
    let (code, report) = json_report(&["check-wdvv", &path]);
    assert_eq!(code, 1, "{report}");
    let w = &failed_check(&report, "wdvv/quantum_wdvv")["witness"];
    assert!(w["alpha"].is_array(), "{report}");
}

#[test]
fn build_then_recover_round_trips() {
    let dir = TempDir::new().unwrap();
    let asym = dir.path().join("asym.json");
    let rec = dir.path().join("rec.json");
    let input = fixture("p4_quantum.json");
    let (code, report) = json_report(&["build-vhs", p(&input), "--emit", p(&asym)]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["emitted"], p(&asym));
    let (code, report) = json_report(&["recover-potential", p(&asym), "--expect", p(&input), "--emit", p(&rec)]);
    assert_eq!(code, 0, "{report}");
    let want: QuantumDoc = serde_json::from_str(&fs::read_to_string(&input).unwrap()).unwrap();
    let got: QuantumDoc = serde_json::from_str(&fs::read_to_string(&rec).unwrap()).unwrap();
    assert_eq!(got.to_potential(None).unwrap(), want.to_potential(None).unwrap());
}

#[test]
fn recover_against_wrong_expectation_fails() {
    let dir = TempDir::new().unwrap();
    let asym = dir.path().join("asym.json");
    assert_eq!(qvhs(&["build-vhs", p(&fixture("p4_quantum.json")), "--emit", p(&asym)]).status.code(), Some(0));
    let mut other: Value = serde_json::from_str(&fs::read_to_string(fixture("p4_quantum.json")).unwrap()).unwrap();
    other["psi"][0][0]["coeff"] = Value::from("6");
    let other = write_json(&dir, "other.json", &other);
    let (code, report) = json_report(&["recover-potential", p(&asym), "--expect", &other]);
    assert_eq!(code, 1);
    failed_check(&report, "roundtrip");
}

#[test]
fn canonical_coords_emits_change_and_data() {
    let dir = TempDir::new().unwrap();
    let asym = dir.path().join("asym.json");
    let out = dir.path().join("canon.json");
    assert_eq!(qvhs(&["build-vhs", p(&fixture("p4_quantum.json")), "--emit", p(&asym)]).status.code(), Some(0));
    let (code, report) = json_report(&["canonical-coords", p(&asym), "--emit", p(&out)]);
    assert_eq!(code, 0, "{report}");
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(doc["change"]["f"].is_array());
    assert!(doc["data"]["Gamma"].is_array());
    // potential-derived data is already canonical
    assert_eq!(doc["change"]["f"][0], serde_json::json!([{"alpha": [0], "coeff": "1"}]));
}

fn two_curve_orbit() -> NilpotentOrbitData {
    let p = vec![Mat::from_i64(&[&[1, 0], &[0, 0]]), Mat::from_i64(&[&[0, 0], &[0, 1]])];
    NilpotentOrbitData::from_algebra(&adapted_algebra(2, 2, &p).unwrap()).unwrap()
}

fn solver_input(dir: &TempDir, orbit: &NilpotentOrbitData, r: &SeriesMatrix) -> String {
    let doc = AsymDoc {
        version: 1,
        orbit: OrbitDoc::from_orbit(orbit),
        r_matrix: Some(qvhs::doc::series_matrix_to_doc(r)),
        gamma: None,
        order: Some(r.order()),
    };
    write_json(dir, "solver.json", &doc)
}

#[test]
fn solve_gamma_on_integrable_input() {
    let dir = TempDir::new().unwrap();
    let orbit = two_curve_orbit();
    let q1 = QSeries::var(0, 2, 4);
    let r = SeriesMatrix::from_const(&orbit.nilpotents()[0], 2, 4).scale_series(&q1).unwrap();
    let path = solver_input(&dir, &orbit, &r);
    let out = dir.path().join("gamma.json");
    let (code, report) = json_report(&["solve-gamma", &path, "--emit", p(&out)]);
    assert_eq!(code, 0, "{report}");
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["residual_max_degree_checked"], 4);
}

#[test]
fn solve_gamma_reports_closedness_witness() {
    let dir = TempDir::new().unwrap();
    let orbit = two_curve_orbit();
    let grading = LieBigrading::from_orbit(&orbit).unwrap();
    let lv = grading.levels().to_vec();
    let n = lv.len();
    let q1 = QSeries::var(0, 2, 4);
    // first elementary map in p_-1 whose q_1 multiple is not integrable
    let r = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| lv[j] == lv[i] + 1)
        .map(|(i, j)| {
            let x = grading.from_adapted(&Mat::from_fn(n, n, |a, b| if (a, b) == (i, j) { rat(1) } else { rat(0) }));
            SeriesMatrix::from_const(&x, 2, 4).scale_series(&q1).unwrap()
        })
        .find(|r| check_integrability(&orbit, r).unwrap().is_some())
        .expect("some elementary direction is not integrable");
    let path = solver_input(&dir, &orbit, &r);
    let (code, report) = json_report(&["solve-gamma", &path]);
    assert_eq!(code, 1, "{report}");
    let w = &failed_check(&report, "integrability")["witness"];
    assert!(w["alpha"].is_array(), "{report}");
}

#[test]
fn reports_are_deterministic() {
    let args = ["build-vhs", "--seed", "7", "--cone-samples", "3"];
    let input = fixture("p4_quantum.json");
    let mut full = args.to_vec();
    full.push(p(&input));
    let a = qvhs(&full);
    let b = qvhs(&full);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
    full.extend(["--format", "json"]);
    assert_eq!(qvhs(&full).stdout, qvhs(&full).stdout);
}

#[test]
fn timing_only_when_requested() {
    let (_, plain) = json_report(&["check-frobenius", p(&fixture("p4_algebra.json"))]);
    assert!(plain.get("timing_ms").is_none());
    let (_, timed) = json_report(&["check-frobenius", p(&fixture("p4_algebra.json")), "--timing"]);
    assert!(timed["timing_ms"].is_u64());
}
