use lrcone_core::verify::{run_verification, CheckName, SweepConfig};

fn smoke() -> SweepConfig {
    SweepConfig::from_json(include_str!("../../cli/configs/smoke.json")).unwrap()
}

#[test]
fn smoke_config_passes() {
    let run = run_verification(&smoke(), 2).unwrap();
    for s in &run.report.sections {
        for r in &s.records {
            println!("{} {} {:?}", s.name, r.passed, r);
        }
        println!("{:?}", s.notes);
    }
    assert!(run.passed(), "failed: {:?}", run.report.failed_sections());
    let names: Vec<&str> = run.tables.iter().map(|t| t.0.as_str()).collect();
    assert!(names.contains(&"leakage.csv"));
}

#[test]
fn tables_do_not_depend_on_jobs() {
    let a = run_verification(&smoke(), 1).unwrap();
    let b = run_verification(&smoke(), 3).unwrap();
    assert_eq!(a.tables, b.tables);
}

#[test]
fn zero_tolerance_fails_closed_form() {
    let mut cfg = smoke();
    cfg.tolerances.closed_form = 0.0;
    cfg.checks = vec![CheckName::ClosedForm];
    let run = run_verification(&cfg, 1).unwrap();
    assert!(!run.passed());
    let dir = tempfile::tempdir().unwrap();
    let out = run.write(dir.path()).unwrap();
    assert!(out.join("report.json").exists());
}
