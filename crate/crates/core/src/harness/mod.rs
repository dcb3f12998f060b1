//! Experiment harness: configuration, dataset materialisation, scenario
//! runners, hyperparameter grids and reports.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::instances::InstanceError;
use crate::metrics::MetricError;
use crate::qaoa::QaoaError;
use crate::solvers::SolverError;

pub mod config;
pub mod dataset;
pub mod grid;
pub mod records;
pub mod report;
pub mod runner;
pub mod seeds;

pub use config::{ExperimentConfig, InstanceSource, Scenario, SolverEntry, SolverSpec};
pub use dataset::{materialize, BenchInstance, Problem};
pub use grid::{check_disjoint, grid_search, GridResult};
pub use records::{read_records, write_records, Real, RunRecord, RunStatus};
pub use report::emit_report;
pub use runner::{compute_oracle, read_oracles, run_experiment, write_oracles, Oracle, Runner};
pub use seeds::{call_seed, derive_seed};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Qaoa(#[from] QaoaError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("tuning and benchmark sets overlap on {0}")]
    Overlap(String),
    #[error("grid has no cells")]
    EmptyGrid,
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.to_path_buf(), source }
    }

    /// True for errors caused by the user's input rather than by a run.
    pub fn is_config(&self) -> bool {
        matches!(self, HarnessError::Config(_) | HarnessError::Overlap(_) | HarnessError::EmptyGrid)
    }
}
