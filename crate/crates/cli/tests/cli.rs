use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fsps_core::problem::quadratic_over_abs;
use serde_json::{json, Value};
use tempfile::TempDir;

fn fsps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsps"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--quiet"];
    args.extend_from_slice(extra);
    fsps(&args)
}

#[test]
fn validate_reports_every_problem() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{
  "experiment": "sharp-ratio",
  "solvers": [
    {"name": "nls", "params": {"beta": 2.5, "q": 1.0, "warp": 9}}
  ],
  "colour": "blue"
}"#,
    );
    let o = fsps(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("beta = 2.5 must lie in (0, 2)"), "{err}");
    assert!(err.contains("q = 1 must lie in (0, 1)"), "{err}");
    assert!(err.contains("unknown field `warp`") && err.contains("line 4"), "{err}");
    assert!(err.contains("unknown field `colour`") && err.contains("line 6"), "{err}");
    assert!(err.contains("4 problem(s) found"), "{err}");
}

#[test]
fn validate_points_at_syntax_errors() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "broken.json", "{\n  \"experiment\": \"ct\"\n  \"seeds\": [1]\n}");
    let o = fsps(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3, column 3"), "{}", stderr(&o));
}

#[test]
fn validate_accepts_a_staged_ct_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "ct.json",
        r#"{
  "experiment": "ct",
  "problem": {"side": 64, "ranges": [90, 120, 150]},
  "solvers": [
    {"name": "nls", "params": {
      "mu": 0.4, "eta": 1.2, "q": 0.998, "memory": 5, "c": 2e-4, "ls_budget": 250,
      "gamma_budget": 1000, "tol": 1e-5, "stop_rule": "relative_previous",
      "stages": [
        {"beta": 1.1, "nu": 1000, "max_iter": 50},
        {"beta": 1.45, "nu": 350, "max_iter": 3000}
      ]}},
    {"name": "sart", "params": {"iterations": 5000}}
  ],
  "seeds": [0]
}"#,
    );
    let o = fsps(&["validate", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).is_empty());
}

#[test]
fn solvers_must_fit_the_experiment() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "s.json",
        r#"{"experiment": "sharp-ratio", "solvers": [{"name": "sart"}, {"name": "newton"}]}"#,
    );
    let o = fsps(&["validate", cfg.to_str().unwrap()]);
    let err = stderr(&o);
    assert!(err.contains("`sart` cannot run a sharp-ratio experiment"), "{err}");
    assert!(err.contains("unknown solver `newton`"), "{err}");
}

#[test]
fn list_experiments_names_every_kind() {
    let o = fsps(&["list-experiments"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for kind in ["toy-beta-sweep", "diverge", "sharp-ratio", "ct", "custom"] {
        assert!(text.lines().any(|l| l.starts_with(kind)), "{text}");
    }
}

#[test]
fn diverge_exits_cleanly_with_a_note() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "d.json", r#"{"experiment": "diverge"}"#);
    let out = dir.path().join("out");
    let o = run(&cfg, &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("no convergence (expected)"));
    let agg = fs::read_to_string(out.join("aggregate.csv")).unwrap();
    assert!(agg.lines().nth(1).unwrap().starts_with("100,2,"), "{agg}");
    let iterates = fs::read_to_string(out.join("diverge/iterates.csv")).unwrap();
    assert_eq!(iterates.lines().count(), 101);
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn toy_aggregate_matches_the_per_run_summaries() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "t.json", r#"{"experiment": "toy-beta-sweep", "problem": {"betas": [1.0, 1.8]}}"#);
    let out = dir.path().join("out");
    let o = run(&cfg, &out, &["--threads", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&fs::read_to_string(out.join("aggregate.csv")).unwrap());
    assert_eq!(rows[0].join(","), "beta,solver,trials,iterations,rerr,obj,wall_time_s");
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        let summary: Value = serde_json::from_str(
            &fs::read_to_string(out.join(format!("beta-{}/fsps/seed-0/summary.json", row[0]))).unwrap(),
        )
        .unwrap();
        let rerr: f64 = row[4].parse().unwrap();
        assert!((rerr - summary["rerr"].as_f64().unwrap()).abs() <= 1e-12);
        assert!(rerr < 1e-6);
        assert_eq!(row[3], summary["iterations"].to_string());
    }
}

#[test]
fn traces_are_byte_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "s.json",
        r#"{"experiment": "sharp-ratio", "problem": {"scenarios": [[12, 6, 6]]}, "seeds": [3], "trials": 3}"#,
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&cfg, &a, &["--threads", "1"]).status.success());
    assert!(run(&cfg, &b, &["--threads", "3"]).status.success());
    for solver in ["nls", "dinkelbach"] {
        for seed in [3, 4, 5] {
            let rel = format!("n12-m6-m6/{solver}/seed-{seed}/trace.csv");
            let ta = fs::read(a.join(&rel)).unwrap();
            assert_eq!(ta, fs::read(b.join(&rel)).unwrap(), "{rel}");
            assert!(ta.len() > 100);
        }
    }
}

#[test]
fn sharp_ratio_mean_over_seeds() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "s.json",
        r#"{"experiment": "sharp-ratio", "problem": {"scenarios": [[10, 5, 5]]}, "seeds": [0, 1]}"#,
    );
    let out = dir.path().join("out");
    let o = run(&cfg, &out, &["--seed", "7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&fs::read_to_string(out.join("aggregate.csv")).unwrap());
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        let solver = &row[3];
        let objs: Vec<f64> = [7, 8]
            .iter()
            .map(|s| {
                let p = out.join(format!("n10-m5-m5/{solver}/seed-{s}/summary.json"));
                let v: Value = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
                assert!(v["infeas"].as_f64().unwrap() <= 1e-9);
                v["obj"].as_f64().unwrap()
            })
            .collect();
        let mean: f64 = row[5].parse().unwrap();
        assert!((mean - (objs[0] + objs[1]) / 2.0).abs() <= 1e-12);
    }
}

#[test]
fn custom_problem_from_a_specification() {
    let dir = TempDir::new().unwrap();
    let spec = quadratic_over_abs().spec().unwrap();
    let cfg = json!({
        "experiment": "custom",
        "problem": {"spec": spec},
        "solvers": [{"name": "adaptive", "params": {"max_iter": 2000}}, {"name": "dinkelbach"}]
    });
    let path = write(dir.path(), "c.json", &cfg.to_string());
    let out = dir.path().join("out");
    let o = run(&path, &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&fs::read_to_string(out.join("aggregate.csv")).unwrap());
    assert_eq!(rows[0].join(","), "solver,trials,obj,infeas,stat,cpu_s,iterations");
    assert_eq!(rows.len(), 3);
}

#[test]
fn small_ct_run_writes_images() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"experiment": "ct", "problem": {"side": 16, "ranges": [120]},
            "solvers": [
              {"name": "nls", "params": {"stages": [{"beta": 1.1, "nu": 1000, "max_iter": 10}, {"beta": 1.45, "nu": 350, "max_iter": 60}]}},
              {"name": "sart", "params": {"iterations": 30}}
            ]}"#,
    );
    let out = dir.path().join("out");
    let o = run(&cfg, &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let pgm = fs::read(out.join("range-120/nls/seed-0/reconstruction.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n16 16\n255\n"));
    assert_eq!(pgm.len(), b"P5\n16 16\n255\n".len() + 256);
    assert!(out.join("range-120/phantom.pgm").exists());
    let rows = csv_rows(&fs::read_to_string(out.join("aggregate.csv")).unwrap());
    for row in &rows[1..] {
        let s: f64 = row[3].parse().unwrap();
        assert!(s > 0.0 && s <= 1.0);
    }
}

#[test]
fn failed_runs_keep_their_partial_trace_and_fail_the_command() {
    let dir = TempDir::new().unwrap();
    // the numerator is negative on S, so no γ makes θ positive
    let cfg = write(
        dir.path(),
        "f.json",
        r#"{"experiment": "custom", "problem": {"spec": {
              "set": {"kind": "uniform_box", "n": 1, "lower": 1.0, "upper": 2.0},
              "a": {"kind": "identity", "n": 1}, "k": {"kind": "identity", "n": 1},
              "g": {"kind": "zero"}, "f": {"kind": "l2"},
              "h": {"kind": "constant", "c": -5.0, "dim": 1}}},
            "solvers": [{"name": "adaptive", "params": {"gamma_budget": 5}}]}"#,
    );
    let out = dir.path().join("out");
    let o = run(&cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("1 of 1 run(s) failed"), "{}", stderr(&o));
    let run_dir = out.join("custom/adaptive/seed-0");
    let summary: Value = serde_json::from_str(&fs::read_to_string(run_dir.join("summary.json")).unwrap()).unwrap();
    assert!(summary["error"].as_str().unwrap().contains("backtracking exhausted"));
    let trace = fs::read_to_string(run_dir.join("trace.csv")).unwrap();
    assert!(trace.starts_with("k,theta,gamma"));
    assert!(trace.lines().nth(1).unwrap().starts_with("0,"));
}
