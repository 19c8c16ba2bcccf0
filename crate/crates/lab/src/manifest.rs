//! Running an experiment into an output directory: CSV files plus a
//! `manifest.json` describing the run.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::experiments::run_experiment;
use crate::table::emit_series;
use crate::LabError;

/// One pass/fail comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CheckOutcome {
    /// Passes when `value ≤ bound` (NaN fails).
    pub fn upper(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, pass: value <= bound }
    }

    /// Informational entry that always passes.
    pub fn report(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), value, bound: f64::INFINITY, pass: true }
    }

    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        if self.bound.is_finite() {
            format!("{verdict} {}: {:e} (bound {:e})", self.name, self.value, self.bound)
        } else {
            format!("{verdict} {}: {}", self.name, self.value)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputRecord {
    pub file: String,
    pub rows: usize,
    pub columns: Vec<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub experiment: String,
    pub figures: Vec<&'static str>,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub threads: usize,
    pub started_unix: u64,
    pub wall_time_s: f64,
    pub outputs: Vec<OutputRecord>,
    pub summary: Value,
    pub checks: Vec<CheckOutcome>,
}

impl Manifest {
    pub fn failed_checks(&self) -> Vec<&CheckOutcome> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// Runs `cfg`, writes one CSV per table and `manifest.json` into `out`, and
/// returns the manifest. Failed checks are written out before being turned
/// into [`LabError::Assertion`].
pub fn run_to_dir(cfg: &ExperimentConfig, out: &Path) -> Result<Manifest, LabError> {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let t0 = Instant::now();
    let outcome = run_experiment(cfg)?;
    std::fs::create_dir_all(out).map_err(|e| LabError::Io(format!("{}: {e}", out.display())))?;
    let mut outputs = Vec::new();
    for table in &outcome.tables {
        let file = format!("{}.csv", table.name);
        emit_series(table, &out.join(&file))?;
        outputs.push(OutputRecord { file, rows: table.rows.len(), columns: table.header.clone() });
    }
    let manifest = Manifest {
        tool: "loe-lab",
        version: env!("CARGO_PKG_VERSION"),
        core_version: loe_core::VERSION,
        experiment: cfg.experiment.name().to_owned(),
        figures: cfg.experiment.figures().to_vec(),
        config_hash: cfg.hash(),
        config: cfg.clone(),
        threads: rayon::current_num_threads(),
        started_unix: started,
        wall_time_s: t0.elapsed().as_secs_f64(),
        outputs,
        summary: outcome.summary,
        checks: outcome.checks,
    };
    let path: PathBuf = out.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| LabError::Io(e.to_string()))?;
    std::fs::write(&path, text + "\n").map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
    let failed = manifest.failed_checks();
    if !failed.is_empty() {
        let names: Vec<&str> = failed.iter().map(|c| c.name.as_str()).collect();
        return Err(LabError::Assertion(names.join("; ")));
    }
    Ok(manifest)
}
