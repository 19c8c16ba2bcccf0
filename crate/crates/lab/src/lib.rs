//! Experiment harness around `loe-core`: JSON configuration, the eight
//! experiments, CSV tables, run manifests and the `check` suites behind the
//! `loe-lab` binary.

pub mod checks;
pub mod cli;
pub mod config;
pub mod experiments;
pub mod manifest;
pub mod oracle;
pub mod table;

pub use config::{ExperimentConfig, ExperimentKind};
pub use experiments::{plan, run_experiment, Outcome};
pub use manifest::{run_to_dir, CheckOutcome, Manifest};
pub use table::{emit_series, read_series, Cell, Table};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{0}")]
    Usage(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("full_space at L = {0} is above the size guard (L <= 8); pass --override-size-guard to run it anyway")]
    SizeGuard(usize),

    #[error("I/O error: {0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] loe_core::Error),

    #[error("assertion failed: {0}")]
    Assertion(String),
}

impl LabError {
    /// 2 for failed assertions, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Assertion(_) => 2,
            _ => 1,
        }
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}
