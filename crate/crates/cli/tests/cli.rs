use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_torus-splines"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn values(csv: &str) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect()
}

#[test]
fn two_knot_hat_is_normalized() {
    let out = run(&[
        "green",
        "--op",
        "dpow:n=2",
        "--dim",
        "1",
        "--bandwidth",
        "512",
        "--grid",
        "2048",
        "--two-knot",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = values(&stdout(&out));
    assert_eq!(v.len(), 2048);
    let peak = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(peak, 1.0);
    // Piecewise linear: second differences vanish away from the knots.
    let h = 2.0 * std::f64::consts::PI / 2048.0;
    for j in [200, 500, 800, 1300, 1700] {
        let d2 = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (h * h);
        assert!(d2.abs() < 0.05, "curvature {d2} at {j}");
    }
    assert!((v[1024] - 1.0).abs() < 1e-12);
    assert!((v[512]).abs() < 1e-2);
}

#[test]
fn admissible_example() {
    let out = run(&["admissible", "--op", "fracd:gamma=1.5", "--dim", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("sampling: Yes (family-override)"));
}

#[test]
fn exit_codes() {
    assert_eq!(
        run(&["reconstruct", "--problem", "missing.toml"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["green", "--op", "dpow:n=2", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["green", "--op", "nosuch:n=2"]).status.code(), Some(2));
    assert_eq!(run(&["green", "--op", "dpow:n=2,extra=1"]).status.code(), Some(2));
    let out = run(&[
        "admissible",
        "--op",
        "fracd:gamma=1.5",
        "--out",
        "/nonexistent-dir/x.txt",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = bin()
        .args(["admissible", "--op", "fracd:gamma=1.5"])
        .env("TORUS_SPLINES_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn threads_variable_does_not_change_output() {
    let problem = data("sobolev_problem.toml");
    let args = ["compare", "--problem", problem.to_str().unwrap()];
    let one = bin().args(args).env("TORUS_SPLINES_THREADS", "1").output().unwrap();
    let many = bin().args(args).env("TORUS_SPLINES_THREADS", "4").output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn compare_rows_match_single_solvers() {
    let problem = data("sobolev_problem.toml");
    let p = problem.to_str().unwrap();
    let table = stdout(&run(&["compare", "--problem", p]));
    let tv = stdout(&run(&["reconstruct", "--problem", p]));
    let tik = stdout(&run(&["tikhonov", "--problem", p]));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "method,objective,data_fit,regularizer,knots,l2_error");
    assert_eq!(tv.lines().nth(1), Some(lines[1]));
    assert_eq!(tik.lines().nth(1), Some(lines[2]));
}

#[test]
fn reconstruct_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("solution.toml");
    let spl = dir.path().join("spline.toml");
    let problem = data("sobolev_problem.toml");
    let out = run(&[
        "reconstruct",
        "--problem",
        problem.to_str().unwrap(),
        "--out",
        sol.to_str().unwrap(),
        "--spline-out",
        spl.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&sol).unwrap();
    assert!(text.contains("[diagnostics]"));
    let spline = torus_splines::io::read_spline_file(&spl, None).unwrap();
    assert!(spline.innovations().len() <= 8);

    let samples = run(&[
        "spline",
        "--spline",
        spl.to_str().unwrap(),
        "--bandwidth",
        "64",
        "--grid",
        "256",
    ]);
    assert_eq!(samples.status.code(), Some(0));
    assert_eq!(values(&stdout(&samples)).len(), 256);
}

#[test]
fn jsonl_output() {
    let out = run(&[
        "green",
        "--op",
        "sobolev:alpha=1,gamma=2",
        "--dim",
        "2",
        "--bandwidth",
        "8",
        "--grid",
        "32",
        "--format",
        "jsonl",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    assert_eq!(s.lines().count(), 32 * 32);
    assert!(s
        .lines()
        .next()
        .unwrap()
        .starts_with("{\"x\":0.000000000000,\"y\":0.000000000000,\"value\":"));
}
