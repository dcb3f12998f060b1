//! Exhaustive hyperparameter grids over one roster entry.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, GridAxis, SolverEntry};
use super::dataset::BenchInstance;
use super::records::RunRecord;
use super::runner::Runner;
use super::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    /// `(key, value)` per axis, in axis order.
    pub assignment: Vec<(String, toml::Value)>,
    pub entry: SolverEntry,
    /// Mean objective over the tuning set; `inf` if any run failed.
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub cells: Vec<GridCell>,
    /// Index of the selected cell.
    pub best: usize,
}

impl GridResult {
    pub fn best_cell(&self) -> &GridCell {
        &self.cells[self.best]
    }

    /// Tab-separated table: one column per axis, then the objective.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        if let Some(first) = self.cells.first() {
            for (k, _) in &first.assignment {
                let _ = write!(out, "{k}\t");
            }
        }
        out.push_str("objective\tselected\n");
        for (i, c) in self.cells.iter().enumerate() {
            for (_, v) in &c.assignment {
                let _ = write!(out, "{v}\t");
            }
            let _ = writeln!(out, "{}\t{}", super::records::Real(c.objective), u8::from(i == self.best));
        }
        out
    }

    pub fn write_tsv(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_tsv()).map_err(|e| HarnessError::io(path, e))
    }

    /// Writes the selected entry as a `[[solvers]]` block.
    pub fn write_best(&self, path: &Path) -> Result<(), HarnessError> {
        let body = toml::to_string(&self.best_cell().entry).map_err(|e| HarnessError::Config(e.to_string()))?;
        std::fs::write(path, format!("[[solvers]]\n{body}")).map_err(|e| HarnessError::io(path, e))
    }
}

/// Errors when the two sets share an instance id or content hash.
pub fn check_disjoint(tuning: &[BenchInstance], benchmark: &[BenchInstance]) -> Result<(), HarnessError> {
    let ids: BTreeSet<&str> = benchmark.iter().map(|b| b.id.as_str()).collect();
    let hashes: BTreeSet<&str> = benchmark.iter().map(|b| b.hash.as_str()).collect();
    for t in tuning {
        if ids.contains(t.id.as_str()) {
            return Err(HarnessError::Overlap(format!("instance id {}", t.id)));
        }
        if hashes.contains(t.hash.as_str()) {
            return Err(HarnessError::Overlap(format!("instance content {} ({})", t.hash, t.id)));
        }
    }
    Ok(())
}

/// Every combination of axis values, last axis varying fastest.
pub fn cartesian(axes: &[GridAxis]) -> Vec<Vec<(String, toml::Value)>> {
    let mut cells: Vec<Vec<(String, toml::Value)>> = vec![Vec::new()];
    for axis in axes {
        cells = cells
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut c = prefix.clone();
                    c.push((axis.key.clone(), v.clone()));
                    c
                })
            })
            .collect();
    }
    if axes.iter().any(|a| a.values.is_empty()) || axes.is_empty() {
        return Vec::new();
    }
    cells
}

/// Copy of `base` with the given keys overridden.
pub fn apply_assignment(base: &SolverEntry, assignment: &[(String, toml::Value)]) -> Result<SolverEntry, HarnessError> {
    let toml::Value::Table(mut table) =
        toml::Value::try_from(base).map_err(|e| HarnessError::Config(format!("serialising {}: {e}", base.id)))?
    else {
        return Err(HarnessError::Config("solver entry is not a table".into()));
    };
    for (k, v) in assignment {
        if k == "id" || k == "kind" {
            return Err(HarnessError::Config(format!("grid key {k:?} cannot be tuned")));
        }
        table.insert(k.clone(), v.clone());
    }
    let entry: SolverEntry = toml::Value::Table(table)
        .try_into()
        .map_err(|e| HarnessError::Config(format!("grid cell {assignment:?}: {e}")))?;
    entry.spec.validate().map_err(|e| HarnessError::Config(format!("grid cell {assignment:?}: {e}")))?;
    Ok(entry)
}

/// Mean of `objective` (a metric key or `best_cost`) over the records.
pub fn objective_value(records: &[RunRecord], objective: &str) -> f64 {
    if records.is_empty() {
        return f64::INFINITY;
    }
    let mut total = 0.0;
    for r in records {
        let v = if !r.is_ok() {
            None
        } else if objective == "best_cost" {
            r.best_cost.map(|c| c.0)
        } else {
            r.metric(objective)
        };
        match v {
            Some(v) => total += v,
            None => return f64::INFINITY,
        }
    }
    total / records.len() as f64
}

/// Evaluates every cell of the tuning grid on `tuning` and returns the
/// minimiser, ties going to the earliest cell.
pub fn grid_search(
    cfg: &ExperimentConfig,
    tuning: &[BenchInstance],
    benchmark: &[BenchInstance],
) -> Result<GridResult, HarnessError> {
    let tune = cfg.tune.as_ref().ok_or_else(|| HarnessError::Config("missing [tune] section".into()))?;
    check_disjoint(tuning, benchmark)?;
    let base = cfg
        .solvers
        .iter()
        .find(|s| s.id == tune.solver)
        .ok_or_else(|| HarnessError::Config(format!("tune.solver {:?} is not in the roster", tune.solver)))?;
    let assignments = cartesian(&tune.grid);
    if assignments.is_empty() {
        return Err(HarnessError::EmptyGrid);
    }
    let runner = Runner::new(cfg);
    let mut cells = Vec::with_capacity(assignments.len());
    for assignment in assignments {
        let entry = apply_assignment(base, &assignment)?;
        let records = runner.run_roster(tuning, std::slice::from_ref(&entry))?;
        let objective = objective_value(&records, &tune.objective);
        log::info!("grid cell {assignment:?}: {objective}");
        cells.push(GridCell { assignment, entry, objective });
    }
    let mut best = 0;
    for (i, c) in cells.iter().enumerate() {
        if c.objective < cells[best].objective {
            best = i;
        }
    }
    Ok(GridResult { cells, best })
}
