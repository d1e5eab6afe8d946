use std::fs;
use std::process::{Command, Output};

fn pbb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbb"))
        .args(args)
        .env_remove("PBB_OUT_DIR")
        .output()
        .expect("run pbb")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn dynamics_trajectory_to_stdout() {
    let o = pbb(&["dynamics", "--lambda", "100", "--m", "1", "--eps0", "2", "--eps1", "3", "--steps", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,eps");
    assert_eq!(lines.len(), 5);
    let v: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(v, 0.75);
}

#[test]
fn dynamics_sweep() {
    let o = pbb(&["dynamics", "--lambda", "10,100", "--m", "0.5", "--adaptive", "--starts", "20", "--steps", "50"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 20);
}

#[test]
fn missing_rules_is_a_usage_error() {
    let o = pbb(&["rosenbrock", "--c", "100"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_rule_and_function_are_config_errors() {
    assert_eq!(pbb(&["rosenbrock", "--rules", "bbq"]).status.code(), Some(2));
    let o = pbb(&["nonquad", "--functions", "Nope", "--rules", "bb1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let o = pbb(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rosenbrock"));
}

#[test]
fn rosenbrock_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rb.csv");
    let o = pbb(&["rosenbrock", "--c", "100", "--eps", "0.1", "--rules", "pbb", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "Rosenbrock");
    assert_eq!(row[1], "pbb");
    let fevals: f64 = row[5].parse().unwrap();
    assert!((fevals - 67.0).abs() <= 0.25 * 67.0, "fevals {fevals}");
    assert_eq!(row[7], "Converged");
    let meta = fs::read_to_string(dir.path().join("rb.csv.meta")).unwrap();
    assert!(meta.contains("rosenbrock"));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_pbb"))
        .args(["bvp", "--n", "50", "--eps", "1e-4", "--reps", "1", "--rules", "bb1,atc"])
        .env("PBB_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("bvp.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn config_file_fills_missing_flags_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# quadratic run\nrules = bb1\nn = 20\nkappa = 100\ndist = 1\neps = 1e-6\nreps = 2\nsequential = true\n").unwrap();
    let o = pbb(&["quad", "--config", cfg.to_str().unwrap(), "--rules", "bb2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.split(',').nth(1) == Some("bb2")));
}

#[test]
fn bad_config_line_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "rules bb1\n").unwrap();
    assert_eq!(pbb(&["quad", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn profile_from_records_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("quad.csv");
    let o = pbb(&[
        "quad", "--n", "30", "--kappa", "1000", "--dist", "1,2", "--eps", "1e-6", "--reps", "2", "--rules", "pbb,bb1,abb",
        "--out", records.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = pbb(&["profile", "--input", records.to_str().unwrap(), "--metric", "iterations", "--out", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read_to_string(p).unwrap()
    };
    let a = run("p1.csv");
    assert_eq!(a, run("p2.csv"));
    assert!(a.starts_with("rule,omega,rho"));
    for rule in ["abb", "bb1", "pbb"] {
        assert!(a.lines().any(|l| l.starts_with(&format!("{rule},"))));
    }
}

#[test]
fn profile_missing_input_is_a_config_error() {
    assert_eq!(pbb(&["profile", "--input", "/nonexistent/records.csv"]).status.code(), Some(2));
}
