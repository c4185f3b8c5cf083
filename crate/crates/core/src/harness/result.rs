//! Experiment results and their persistence.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use super::HarnessError;
use crate::stats::{MomentAccumulator, StatsError, Summary};

pub const SCHEMA_VERSION: u32 = 1;

/// Where a reference value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Closed-form expression.
    Formula,
    /// Quasi-Monte Carlo integration.
    Qmc,
    /// Simulation estimate.
    Empirical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub name: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<f64>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub name: String,
    pub statistic: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
    /// Reported but not part of the experiment verdict.
    #[serde(default)]
    pub informational: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledSummary {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    pub summary: Summary,
}

/// Raw samples, one row per replication.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleTable {
    pub label: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub schema_version: u32,
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub statistics: Vec<LabeledSummary>,
    pub tests: Vec<TestOutcome>,
    pub references: Vec<Reference>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub samples: Vec<SampleTable>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl ExperimentResult {
    pub fn new(config: &ExperimentConfig) -> Self {
        ExperimentResult {
            schema_version: SCHEMA_VERSION,
            experiment: config.experiment,
            seed: config.seed,
            config: config.clone(),
            statistics: Vec::new(),
            tests: Vec::new(),
            references: Vec::new(),
            notes: Vec::new(),
            samples: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    /// True when every non-informational test passed.
    pub fn passed(&self) -> bool {
        self.tests.iter().filter(|t| !t.informational).all(|t| t.passed)
    }

    pub fn test(&self, name: &str) -> Option<&TestOutcome> {
        self.tests.iter().find(|t| t.name == name)
    }

    pub fn reference(&self, name: &str) -> Option<&Reference> {
        self.references.iter().find(|r| r.name == name)
    }

    pub fn statistic(&self, label: &str) -> Option<&Summary> {
        self.statistics.iter().find(|s| s.label == label).map(|s| &s.summary)
    }

    pub(crate) fn summarize(
        &mut self,
        label: impl Into<String>,
        values: &[f64],
        r: Option<f64>,
        time: Option<f64>,
    ) -> Result<Summary, StatsError> {
        let summary = MomentAccumulator::from_slice(values).finalize()?;
        self.statistics.push(LabeledSummary {
            label: label.into(),
            r,
            time,
            summary: summary.clone(),
        });
        Ok(summary)
    }

    pub(crate) fn reference_value(&mut self, name: impl Into<String>, value: f64, error: Option<f64>, provenance: Provenance) {
        self.references.push(Reference {
            name: name.into(),
            value,
            error,
            provenance,
        });
    }

    pub(crate) fn record(&mut self, test: TestOutcome) {
        self.tests.push(test);
    }

    /// Writes `result.json`, `timing.json` and, if enabled, one CSV per
    /// sample table into `dir`. Returns the written paths.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let json = dir.join("result.json");
        fs::write(&json, serde_json::to_string_pretty(self)?)?;
        written.push(json);
        let timing = dir.join("timing.json");
        fs::write(
            &timing,
            serde_json::to_string_pretty(&serde_json::json!({
                "experiment": self.experiment,
                "wall_clock_seconds": self.elapsed.as_secs_f64(),
            }))?,
        )?;
        written.push(timing);
        if self.config.csv {
            for table in &self.samples {
                let path = dir.join(format!("samples_{}.csv", table.label));
                let mut w = csv::Writer::from_path(&path)?;
                w.write_record(&table.columns)?;
                for row in &table.rows {
                    w.write_record(row.iter().map(|v| format!("{v:e}")))?;
                }
                w.flush()?;
                written.push(path);
            }
        }
        Ok(written)
    }
}

/// Reads a sample table written by [`ExperimentResult::write_to`].
pub fn read_samples(path: &Path) -> Result<SampleTable, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    let columns = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        rows.push(row.map_err(|e| HarnessError::Config(format!("bad sample value: {e}")))?);
    }
    let label = path
        .file_stem()
        .and_then(|s| s.to_str())
        .and_then(|s| s.strip_prefix("samples_"))
        .unwrap_or_default()
        .to_string();
    Ok(SampleTable { label, columns, rows })
}
