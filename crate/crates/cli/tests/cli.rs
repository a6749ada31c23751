use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

fn lrcone(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrcone"))
        .args(args)
        .env("LRCONE_OUT", out)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn bound_writes_grid_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = lrcone(dir.path(), &["bound", "--alpha", "2.5", "--d", "1", "--r", "1:100:10", "--t", "0.1:10:20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("bound/envelope.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("r,t,envelope,valid"));
    assert_eq!(lines.count(), 200);
    let trace: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("bound/recursion.json")).unwrap()).unwrap();
    assert_eq!(trace["alpha"], 2.5);
    assert_eq!(trace["recursion"]["inputs"]["xi"], 68.0);
}

#[test]
fn bound_domain_and_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = lrcone(dir.path(), &["bound", "--alpha", "3.5", "--d", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("(2, 3)"), "{}", stderr(&o));
    let o = lrcone(dir.path(), &["bound", "--config", "/nonexistent/bound.json"]);
    assert_eq!(o.status.code(), Some(2));
    let typo = dir.path().join("typo.json");
    std::fs::write(&typo, r#"{"alpha": 2.5, "d": 1, "alpah": 2.4}"#).unwrap();
    let o = lrcone(dir.path(), &["bound", "--config", typo.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpah"));
}

#[test]
fn bound_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("b.json");
    std::fs::write(&cfg, r#"{"alpha": 3.5, "d": 1, "r_grid": "1:10:3", "t_grid": "1:2:2"}"#).unwrap();
    let o = lrcone(dir.path(), &["bound", "--config", cfg.to_str().unwrap(), "--alpha", "2.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("bound/envelope.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn fixpoint_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = lrcone(dir.path(), &["fixpoint", "--alpha", "2.5", "--d", "1", "--eta", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o).lines().find(|l| l.starts_with("limit = ")).unwrap().to_string();
    let limit: f64 = line["limit = ".len()..].parse().unwrap();
    assert!((limit - 3.0).abs() < 1e-10);
    assert!(dir.path().join("fixpoint/fixpoint.json").exists());

    let o = lrcone(dir.path(), &["fixpoint", "--alpha", "2.5", "--d", "1", "--eta", "0.7"]);
    assert_eq!(o.status.code(), Some(1));
    let o = lrcone(
        dir.path(),
        &["fixpoint", "--alpha", "2.1", "--d", "1", "--eta", "0.1", "--tol", "1e-12", "--max-iter", "10"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("converge"));
}

#[test]
fn simulate_ising_demo() {
    let dir = tempfile::tempdir().unwrap();
    let o = lrcone(dir.path(), &["simulate", "--config", config("ising2.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("simulate/leakage.csv")).unwrap();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let t: f64 = f[2].parse().unwrap();
        let value: f64 = f[3].parse().unwrap();
        assert!((value - (2.0 * t).sin().abs()).abs() < 1e-12, "t = {t}");
        rows += 1;
    }
    assert_eq!(rows, 64);
}

#[test]
fn simulate_echoes_seed_and_guards_size() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.json");
    std::fs::write(
        &cfg,
        r#"{"lattice": {"d": 1, "extents": [3]}, "alpha": 2.5, "ensemble": "xy", "seed": 918273645,
            "r_grid": [1, 2], "t_grid": [0.5, 1.0]}"#,
    )
    .unwrap();
    let o = lrcone(dir.path(), &["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = std::fs::read_to_string(dir.path().join("simulate/simulate.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(v["seed"], 918273645u64);

    std::fs::write(
        &cfg,
        r#"{"lattice": {"d": 1, "extents": [13]}, "alpha": 2.5, "ensemble": "xy", "seed": 1,
            "r_grid": [1], "t_grid": [0.5]}"#,
    )
    .unwrap();
    let o = lrcone(dir.path(), &["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("13 qubits"), "{}", stderr(&o));
}

#[test]
fn verify_smoke_is_fast_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let o = lrcone(dir.path(), &["verify", "--config", config("smoke.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(start.elapsed().as_secs_f64() < 5.0);
    let runs: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(runs.len(), 1);
    let run = runs[0].as_ref().unwrap().path();
    for f in ["report.json", "leakage.csv", "commutator.csv", "truncation.csv", "correlator.csv"] {
        assert!(run.join(f).exists(), "{f}");
    }
    let header = std::fs::read_to_string(run.join("leakage.csv")).unwrap();
    assert!(header.starts_with("center,r,t,value,norm_kind,seed,alpha,ensemble\n"));
}

#[test]
fn verify_zero_tolerance_fails_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(config("smoke.json")).unwrap()).unwrap();
    cfg["tolerances"] = serde_json::json!({"closed_form": 0.0});
    let path = dir.path().join("strict.json");
    std::fs::write(&path, cfg.to_string()).unwrap();
    let out = dir.path().join("out");
    let o = lrcone(&out, &["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stderr(&o).contains("checks failed"));
    let run = std::fs::read_dir(&out).unwrap().next().unwrap().unwrap().path();
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn verify_list_checks_runs_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let o = lrcone(dir.path(), &["verify", "--list-checks"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in ["closed_form", "sandwich", "dominance", "front_fit", "tail_fit", "truncation", "correlator"] {
        assert!(text.contains(name), "{name}");
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn verify_output_independent_of_jobs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = config("smoke.json");
    assert_eq!(lrcone(a.path(), &["verify", "--config", cfg.to_str().unwrap(), "--jobs", "1"]).status.code(), Some(0));
    assert_eq!(lrcone(b.path(), &["verify", "--config", cfg.to_str().unwrap(), "--jobs", "4"]).status.code(), Some(0));
    let run_a = std::fs::read_dir(a.path()).unwrap().next().unwrap().unwrap().path();
    let run_b = b.path().join(run_a.file_name().unwrap());
    for f in ["leakage.csv", "commutator.csv", "truncation.csv", "correlator.csv", "correlator_bound.csv"] {
        assert_eq!(std::fs::read(run_a.join(f)).unwrap(), std::fs::read(run_b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn out_flag_beats_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = lrcone(
        env_dir.path(),
        &["fixpoint", "--alpha", "2.5", "--d", "1", "--out", flag_dir.path().to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(flag_dir.path().join("fixpoint/fixpoint.json").exists());
    assert!(!env_dir.path().join("fixpoint").exists());
}

#[test]
fn compare_table_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = lrcone(dir.path(), &["compare", "--alpha", "2.5", "--d", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("-19/3") && text.contains("[agree]"));
    assert!(text.contains("-13/3") && text.contains("DISCREPANCY"));

    let o = lrcone(dir.path(), &["compare", "--alpha", "2.5", "--d", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["bounds"][1]["gamma"]["exact"], "25/2");

    let o = lrcone(dir.path(), &["compare", "--alpha", "2", "--d", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["bound", "fixpoint", "simulate", "verify", "compare"] {
        let o = lrcone(dir.path(), &[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{sub}");
        assert!(stdout(&o).contains("Usage"), "{sub}");
    }
}
