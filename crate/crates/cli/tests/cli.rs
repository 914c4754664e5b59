use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcu-age"))
        .args(args)
        .output()
        .unwrap()
}

fn rows(out: &Output) -> Vec<Vec<String>> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "alpha,lambda,mu,en_exact,en_bound_jensen,en_bound_simple,avg_age,sim_en,sim_en_ci,sim_age,sim_age_ci,seed"
    );
    lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn col(rows: &[Vec<String>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn analytic_without_readers() {
    let out = run(&["analytic", "--alpha", "1", "--lambda", "0", "--mu", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = rows(&out);
    assert_eq!(r.len(), 1);
    assert_eq!(
        &r[0][..11],
        ["1", "0", "1", "1", "1", "1", "2", "", "", "", ""]
    );
}

#[test]
fn analytic_footprint_grid() {
    let out = run(&[
        "analytic",
        "--alpha",
        "0.1:100:40:log",
        "--lambda",
        "1,5,10",
        "--mu",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = rows(&out);
    assert_eq!(r.len(), 120);
    for row in &r {
        let v: Vec<f64> = row[..7].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(v[5], 1.0 + v[1]);
        assert!(v[3] <= v[4] + 1e-9 && v[4] <= v[5] + 1e-9);
        assert!(row[7..11].iter().all(String::is_empty));
    }
    // row-major: alpha is the slow axis
    assert_eq!(col(&r, 0)[..3], [0.1, 0.1, 0.1]);
    assert_eq!(col(&r, 1)[..3], [1.0, 5.0, 10.0]);
}

#[test]
fn analytic_footprint_rises_with_read_rate() {
    let r = rows(&run(&[
        "analytic",
        "--alpha",
        "2",
        "--lambda",
        "0:20:21:lin",
    ]));
    let en = col(&r, 3);
    assert!(en.windows(2).all(|p| p[1] > p[0]));
}

#[test]
fn tradeoff_rows() {
    let r = rows(&run(&[
        "tradeoff", "--alpha", "2,0.5,1", "--lambda", "1", "--mu", "1",
    ]));
    assert_eq!(col(&r, 0), [0.5, 1.0, 2.0]);
    assert_eq!(col(&r, 6), [4.0, 2.0, 1.0]);

    let r = rows(&run(&[
        "tradeoff",
        "--alpha",
        "0.125:1024:14:log",
        "--lambda",
        "10",
    ]));
    let age = col(&r, 6);
    let en = col(&r, 3);
    for i in 1..r.len() {
        assert!((age[i] - age[i - 1] / 2.0).abs() < 1e-12);
        assert!(en[i] >= en[i - 1]);
    }
    assert!(en[en.len() - 1] < 11.0 && en[en.len() - 1] > 10.9);
}

#[test]
fn simulate_is_reproducible() {
    let args = [
        "simulate",
        "--alpha",
        "1",
        "--lambda",
        "1",
        "--mu",
        "1",
        "--seed",
        "42",
        "--publications",
        "20000",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
    let other = run(&[
        "simulate",
        "--alpha",
        "1",
        "--lambda",
        "1",
        "--seed",
        "43",
        "--publications",
        "20000",
    ]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn simulate_age() {
    let out = run(&["simulate", "--alpha", "2", "--lambda", "5", "--mu", "1"]);
    let r = rows(&out);
    let age: f64 = r[0][9].parse().unwrap();
    assert!((age - 1.0).abs() <= 0.02);
    let summary = String::from_utf8(out.stderr).unwrap();
    assert!(summary.starts_with("max |sim - analytic| = "), "{summary}");
}

#[test]
fn check_passes_for_fast_writers() {
    let out = run(&[
        "simulate", "--alpha", "50,100", "--lambda", "1,5", "--check",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(rows(&out).len(), 4);
}

#[test]
fn check_against_shared_horizon_reference() {
    let args = [
        "simulate", "--alpha", "0.5,1,2", "--lambda", "1,10", "--check",
    ];
    let exact = run(&args);
    assert_eq!(exact.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&exact.stderr).contains("check failed: alpha=1 lambda=10"));
    // the CSV is still written in full
    assert_eq!(rows(&exact).len(), 6);

    let mut renewal = args.to_vec();
    renewal.extend(["--reference", "renewal"]);
    let out = run(&renewal);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn output_file_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let hist = dir.path().join("n.csv");
    let out = run(&[
        "simulate",
        "--alpha",
        "1",
        "--lambda",
        "2",
        "--publications",
        "10000",
        "--out",
        csv.to_str().unwrap(),
        "--histogram",
        hist.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 2);
    let h = std::fs::read_to_string(&hist).unwrap();
    let mut lines = h.lines();
    assert_eq!(lines.next().unwrap(), "alpha,lambda,mu,seed,n,mass");
    let total: f64 = lines
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn usage_errors_leave_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    for bad in [
        vec!["analytic", "--alpha", "1:2:x:lin", "--lambda", "1"],
        vec!["analytic", "--alpha", "1,0", "--lambda", "1"],
        vec!["analytic", "--alpha", "1", "--lambda", "1", "--tol", "0"],
        vec![
            "simulate",
            "--alpha",
            "1",
            "--lambda",
            "1",
            "--batches",
            "2",
        ],
        vec![
            "simulate", "--alpha", "1", "--lambda", "1", "--warmup", "-1",
        ],
        vec!["tradeoff", "--alpha", "1", "--lambda", "-3"],
        vec!["validate", "--samples", "10"],
        vec!["frobnicate"],
    ] {
        let mut args = bad.clone();
        if args[0] != "validate" && args[0] != "frobnicate" {
            args.extend(["--out", csv.to_str().unwrap()]);
        }
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{bad:?}");
        assert!(out.stdout.is_empty(), "{bad:?}");
        assert!(!csv.exists(), "{bad:?}");
    }
}

#[test]
fn validate_small_run_passes() {
    let out = run(&["validate", "--samples", "10000"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text
        .lines()
        .all(|l| l.starts_with("PASS") || l.ends_with("checks passed")));
}

#[test]
fn validate_impossible_tolerance_fails() {
    let out = run(&["validate", "--samples", "10000", "--tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL series-vs-quadrature"));
}
