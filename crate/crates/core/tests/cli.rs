use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const H_EQ3: &str = "qubits 2\n1.0 0:Z\n2.0 0:X 1:Z\n1.0 0:Z 1:Z\n";
const CHAIN4: &str = "qubits 4\n1 0:Z 1:Z\n1 1:Z 2:Z\n1 2:Z 3:Z\n0.5 0:X\n0.5 1:X\n0.5 2:X\n0.5 3:X\n";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hamrc"));
    c.env_remove("HAMRC_DENSE_CAP");
    c
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn field(report: &str, key: &str) -> String {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in\n{report}"))
        .to_string()
}

fn real(report: &str, key: &str) -> f64 {
    field(report, key).parse().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn check_reports_entangling() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.ham", H_EQ3);
    let o = run(&["check", p(&h)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "entangling"), "true");
    assert_eq!(field(&stdout(&o), "edges"), "0-1");
}

#[test]
fn check_non_entangling_lists_components() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.ham", "qubits 3\n1.0 0:Z 1:Z\n");
    let o = run(&["check", p(&h)]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(field(&stdout(&o), "entangling"), "false");
    assert_eq!(field(&stdout(&o), "components"), "{0,1} | {2}");
}

#[test]
fn three_body_term_is_parse_error() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.ham", "qubits 3\n2.0 0:X 1:Z 2:Y\n");
    let o = run(&["check", p(&h)]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 2") && err.contains("three-body term"), "{err}");
}

#[test]
fn cnot_compile_and_verify() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.ham", H_EQ3);
    let s = dir.path().join("cnot.sched");
    let o = run(&["compile", p(&h), "--gate", "cnot", "--epsilon", "1e-3", "--order", "2", "-o", p(&s)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = stdout(&o);
    let periods: usize = field(&report, "drift_period_count_merged").parse().unwrap();
    assert!((50..=500).contains(&periods));
    assert_eq!(field(&report, "bound"), "second_order_cnot");
    let predicted = real(&report, "predicted_error");

    let v = run(&["verify", p(&h), p(&s), "--gate", "cnot", "--phase-align", "--tolerance", "1e-3"]);
    assert_eq!(v.status.code(), Some(0), "{}", stderr(&v));
    let measured = real(&stdout(&v), "measured_error_phase_aligned");
    assert!(measured <= predicted && measured <= 1e-3);
    assert!(real(&stdout(&v), "measured_error_strict") <= 1e-3);
}

#[test]
fn verify_failure_exit_code() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.ham", H_EQ3);
    let s = dir.path().join("coarse.sched");
    let o = run(&["compile", p(&h), "--gate", "cnot", "--steps", "2", "-o", p(&s)]);
    assert_eq!(o.status.code(), Some(0));
    let v = run(&["verify", p(&h), p(&s), "--gate", "cnot", "--tolerance", "1e-12"]);
    assert_eq!(v.status.code(), Some(5));
    assert_eq!(field(&stdout(&v), "pass"), "false");
}

#[test]
fn target_equal_to_drift_is_one_drift_record() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.ham", H_EQ3);
    let o = run(&["compile", p(&h), "--target", p(&h), "--steps", "1", "--t", "0.7"]);
    assert_eq!(o.status.code(), Some(0));
    let sched = stdout(&o);
    let records: Vec<&str> = sched.lines().skip_while(|l| !l.starts_with("instructions")).skip(1).collect();
    assert_eq!(records, ["DRIFT 6.9999999999999996e-1"]);
}

#[test]
fn routed_pair_has_two_swaps_each_side() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "chain.ham", CHAIN4);
    let k = write(&dir, "zz.ham", "qubits 2\n1 0:Z 1:Z\n");
    let s = dir.path().join("r.sched");
    let o = run(&["compile", p(&h), "--target", p(&k), "--t", "0.5", "--pair", "0", "3", "--epsilon", "1e-2", "--order", "2", "-o", p(&s)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = stdout(&o);
    assert_eq!(field(&report, "path"), "0 1 2 3");
    assert_eq!(field(&report, "swap_segments"), "4");
    assert_eq!(field(&report, "segment_0"), "swap 0 1");
    assert_eq!(field(&report, "segment_2"), "interaction 2 3");
    assert_eq!(field(&report, "segment_4"), "swap 0 1");
    assert!(real(&report, "measured_error_phase_aligned") <= 1e-2);

    let v = run(&["verify", p(&h), p(&s), "--target", p(&k), "--t", "0.5", "--pair", "0", "3", "--phase-align", "--tolerance", "1e-2"]);
    assert_eq!(v.status.code(), Some(0), "{}", stderr(&v));
}

#[test]
fn principal_pair_must_be_coupled() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "chain.ham", CHAIN4);
    let k = write(&dir, "zz.ham", "qubits 2\n1 0:Z 1:Z\n");
    let o = run(&["compile", p(&h), "--target", p(&k), "--principal", "0", "2", "--steps", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn disconnected_pair_exit_code() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.ham", "qubits 4\n1 0:Z 1:Z\n1 2:X 3:X\n");
    let k = write(&dir, "zz.ham", "qubits 2\n1 0:Z 1:Z\n");
    let o = run(&["compile", p(&h), "--target", p(&k), "--pair", "0", "3", "--steps", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("not connected"));
}

#[test]
fn infeasible_plan_exit_code() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.ham", H_EQ3);
    let o = run(&["compile", p(&h), "--gate", "cnot", "--epsilon", "1e-30"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn compile_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "chain.ham", CHAIN4);
    let k = write(&dir, "k.ham", "qubits 2\n0.4 0:X 1:Y\n-0.3 0:Z\n");
    let args = ["compile", p(&h), "--target", p(&k), "--principal", "1", "2", "--epsilon", "1e-2", "--order", "2"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}

#[test]
fn empty_schedule_against_identity_target() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.ham", H_EQ3);
    let zero = write(&dir, "zero.ham", "qubits 2\n");
    let s = write(&dir, "empty.sched", "schedule 1\nqubits 2\nglobal_phase 0\nraw_drift_periods 0\nlayers 0\ninstructions 0\n");
    let v = run(&["verify", p(&h), p(&s), "--target", p(&zero), "--tolerance", "0"]);
    assert_eq!(v.status.code(), Some(0), "{}", stderr(&v));
    assert_eq!(real(&stdout(&v), "measured_error_strict"), 0.0);
}

#[test]
fn bound_rows_scale_with_delta() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.ham", H_EQ3);
    let t = std::f64::consts::FRAC_PI_4;
    let row = |order: &str, delta: &str, key: &str| {
        let o = run(&["bound", p(&h), "--gate", "cnot", "--delta", delta, "--order", order]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        real(&stdout(&o), key)
    };
    let r1 = row("1", "0.02", "first_order_cnot");
    assert!((r1 - 8.0 * t * 0.02).abs() < 1e-15);
    assert!((row("1", "0.01", "first_order_cnot") - r1 / 2.0).abs() < 1e-15);
    let r2 = row("2", "0.02", "second_order_cnot");
    assert!((r2 - 0.5 * t * 0.02 * 0.02).abs() < 1e-15);
    assert!((row("2", "0.01", "second_order_cnot") - r2 / 4.0).abs() < 1e-15);
    assert!((row("1", "0.01", "global") - 1e4 * t * 0.01).abs() < 1e-9);
}

#[test]
fn dense_cap_from_environment() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.ham", H_EQ3);
    let s = dir.path().join("s.sched");
    assert_eq!(run(&["compile", p(&h), "--gate", "cnot", "--steps", "3", "-o", p(&s)]).status.code(), Some(0));
    let o = bin().env("HAMRC_DENSE_CAP", "1").args(["verify", p(&h), p(&s), "--gate", "cnot"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("exceeds the cap"));
}

#[test]
fn schedule_file_round_trips_through_verify() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.ham", H_EQ3);
    let k = write(&dir, "k.ham", "qubits 2\n0.3 0:Y 1:Y\n0.2 1:Z\n0.1 I\n");
    let s = dir.path().join("s.sched");
    let o = run(&["compile", p(&h), "--target", p(&k), "--t", "0.9", "--steps", "20", "-o", p(&s)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let compiled = real(&stdout(&o), "measured_error_strict");
    let v = run(&["verify", p(&h), p(&s), "--target", p(&k), "--t", "0.9"]);
    assert_eq!(real(&stdout(&v), "measured_error_strict"), compiled);
}
