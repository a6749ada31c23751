//! Verification harness: sweeps exact dynamics over `(α, seed, r, t)` grids,
//! checks the inequalities that relate measured quantities, fits fronts and
//! tails, and writes CSV tables plus a JSON report.

pub mod checks;
pub mod config;
pub mod fit;
pub mod report;
pub mod table;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

pub use config::{split_seed, CheckName, SimulateConfig, SweepConfig, Tolerances};
pub use fit::{fit_front, fit_tail, ols, FrontFit, LinearFit};
pub use report::{CheckRecord, Section, VerificationReport};

use crate::error::{Error, Result};
use checks::UnitData;
use table::Row;

/// Output of one harness run: the report and the CSV tables, in memory.
#[derive(Debug, Clone)]
pub struct VerificationRun {
    pub report: VerificationReport,
    /// `(file name, contents)` pairs.
    pub tables: Vec<(String, String)>,
}

impl VerificationRun {
    pub fn passed(&self) -> bool {
        self.report.passed
    }

    /// Write everything under `root/<config hash>/` and return that directory.
    pub fn write(&self, root: &Path) -> Result<PathBuf> {
        let dir = root.join(&self.report.config_hash);
        std::fs::create_dir_all(&dir)?;
        for (name, contents) in &self.tables {
            std::fs::write(dir.join(name), contents)?;
        }
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&self.report)?)?;
        Ok(dir)
    }
}

/// Run a rayon pool of `jobs` threads (0 means one per core). Results come
/// back in input order, so the output does not depend on `jobs`.
pub fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} worker threads: {e}")))?;
    Ok(pool.install(f))
}

pub fn run_verification(config: &SweepConfig, jobs: usize) -> Result<VerificationRun> {
    let sweep = config.resolve()?;
    let tasks: Vec<(f64, u64)> = config
        .alphas
        .iter()
        .flat_map(|&a| sweep.seeds.iter().map(move |&s| (a, s)))
        .collect();
    log::info!("verify: {} realizations on {} sites", tasks.len(), sweep.lattice.num_sites());
    let units: Vec<UnitData> = with_pool(jobs, || {
        tasks
            .par_iter()
            .map(|&(alpha, seed)| checks::measure_unit(config, &sweep, alpha, seed))
            .collect::<Result<Vec<_>>>()
    })??;

    let mut constants = Vec::new();
    let mut exponents = Vec::new();
    let mut sections = Vec::new();
    for check in CheckName::ALL.into_iter().filter(|&c| config.enabled(c)) {
        let section = match check {
            CheckName::ClosedForm => checks::closed_form_section(config, &sweep, &units),
            CheckName::Sandwich => checks::sandwich_section(config, &sweep, &units),
            CheckName::Dominance => checks::dominance_section(config, &sweep, &units, &mut constants),
            CheckName::FrontFit => checks::front_section(config, &sweep, &units, &mut exponents),
            CheckName::TailFit => checks::tail_section(config, &sweep, &units, &mut exponents),
            CheckName::Truncation => checks::truncation_section(config, &sweep, &units, &mut exponents),
            CheckName::Correlator => checks::correlator_section(config, &sweep, &units, &mut constants),
            CheckName::SyntheticRecovery => checks::synthetic_section(config, &sweep),
        };
        sections.push(section);
    }
    let passed = sections.iter().all(|s| !s.asserted || s.passed);
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let report = VerificationReport {
        timestamp,
        config_hash: config.hash(),
        environment: report::Environment::current(jobs),
        master_seed: config.seed,
        seeds: sweep
            .seeds
            .iter()
            .enumerate()
            .map(|(realization, &seed)| report::SeedEcho { realization, seed })
            .collect(),
        config: config.clone(),
        sections,
        fitted_constants: constants,
        fitted_exponents: exponents,
        notes: Vec::new(),
        passed,
    };
    Ok(VerificationRun {
        report,
        tables: tables(config, &sweep, &units),
    })
}

fn tables(config: &SweepConfig, sweep: &config::ResolvedSweep, units: &[UnitData]) -> Vec<(String, String)> {
    let ensemble = config.ensemble.name();
    let mut out = Vec::new();
    let has_dynamics = units.iter().any(|u| !u.times.is_empty());
    if has_dynamics {
        let mut leak = Vec::new();
        let mut comm = Vec::new();
        for u in units {
            for (ri, &r) in sweep.radii.iter().enumerate() {
                for (ti, &t) in u.times.iter().enumerate().filter(|(ti, _)| u.on_grid[*ti]) {
                    let row = |value, norm_kind| Row {
                        center: config.center,
                        r,
                        t,
                        value,
                        norm_kind,
                        seed: u.seed,
                        alpha: u.alpha,
                        ensemble,
                    };
                    leak.push(row(u.leakage[ti][ri], config.norm.name()));
                    comm.push(row(u.sup[ti][ri], "operator"));
                }
            }
        }
        out.push(("leakage.csv".to_string(), table::render(&leak)));
        if config.enabled(CheckName::Sandwich) || config.enabled(CheckName::ClosedForm) {
            out.push(("commutator.csv".to_string(), table::render(&comm)));
        }
    }
    if config.enabled(CheckName::Truncation) {
        let rows: Vec<Row> = units
            .iter()
            .flat_map(|u| {
                u.truncation_radii.iter().enumerate().flat_map(move |(ri, &r)| {
                    sweep.truncation_times.iter().enumerate().map(move |(ti, &t)| Row {
                        center: config.center,
                        r,
                        t,
                        value: u.truncation[ri][ti],
                        norm_kind: "operator",
                        seed: u.seed,
                        alpha: u.alpha,
                        ensemble,
                    })
                })
            })
            .collect();
        out.push(("truncation.csv".to_string(), table::render(&rows)));
    }
    if config.enabled(CheckName::Correlator) {
        let mut values = Vec::new();
        let mut bounds = Vec::new();
        for u in units {
            for &(pi, ti, chain) in &u.correlators {
                let (x, y) = sweep.correlator_pairs[pi];
                let row = |value, norm_kind| Row {
                    center: x,
                    r: sweep.lattice.distance(x, y),
                    t: sweep.correlator_times[ti],
                    value,
                    norm_kind,
                    seed: u.seed,
                    alpha: u.alpha,
                    ensemble,
                };
                values.push(row(chain.correlator.re, "none"));
                bounds.push(row(chain.rhs(), "operator"));
            }
        }
        out.push(("correlator.csv".to_string(), table::render(&values)));
        out.push(("correlator_bound.csv".to_string(), table::render(&bounds)));
    }
    out
}
