//! Machine-readable verification report.

use serde::{Deserialize, Serialize};

use super::config::SweepConfig;
use super::fit::LinearFit;

/// One asserted (or recorded) comparison, aggregated over a set of grid
/// points. `measured`/`reference` are taken at the worst point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub points: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    /// False for sections whose outcome never fails the run.
    pub asserted: bool,
    pub passed: bool,
    pub records: Vec<CheckRecord>,
    pub notes: Vec<String>,
}

impl Section {
    pub fn new(name: &str, asserted: bool) -> Self {
        Section {
            name: name.to_string(),
            asserted,
            passed: true,
            records: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.passed &= record.passed;
        self.records.push(record);
    }

    /// Record a check that could not be evaluated.
    pub fn fail(&mut self, name: String, why: String) {
        self.push(CheckRecord {
            name,
            passed: false,
            measured: f64::NAN,
            reference: f64::NAN,
            tolerance: f64::NAN,
            points: 0,
            failures: 1,
            detail: Some(why),
        });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedConstant {
    pub label: String,
    pub alpha: f64,
    pub seed: Option<u64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedExponent {
    pub label: String,
    pub alpha: f64,
    pub seed: u64,
    pub fit: LinearFit,
    /// Exponent the fit is compared against, when one applies.
    pub reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub tool: String,
    pub version: String,
    pub os: String,
    pub arch: String,
    pub jobs: usize,
}

impl Environment {
    pub fn current(jobs: usize) -> Self {
        Environment {
            tool: "lrcone".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            jobs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedEcho {
    pub realization: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Seconds since the Unix epoch; the only field that differs between
    /// identical runs.
    pub timestamp: u64,
    pub config_hash: String,
    pub environment: Environment,
    pub master_seed: u64,
    pub seeds: Vec<SeedEcho>,
    pub config: SweepConfig,
    pub sections: Vec<Section>,
    pub fitted_constants: Vec<FittedConstant>,
    pub fitted_exponents: Vec<FittedExponent>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    /// Names of asserted sections that failed.
    pub fn failed_sections(&self) -> Vec<&str> {
        self.sections
            .iter()
            .filter(|s| s.asserted && !s.passed)
            .map(|s| s.name.as_str())
            .collect()
    }
}
