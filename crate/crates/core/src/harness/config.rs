//! Experiment configuration, read from TOML.
//!
//! ```toml
//! scenario = "bsf"
//! seed = 7
//! time_limit = 10.0
//!
//! [[instances]]
//! generator = "regular"
//! sizes = [30, 40]
//! count = 5
//!
//! [[solvers]]
//! id = "sa"
//! kind = "sa"
//! sweeps = 20
//! reads = 100
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::seeds::content_hash;
use super::HarnessError;
use crate::instances::WeightLaw;
use crate::model::DEFAULT_EXHAUSTIVE_CAP;
use crate::qaoa::{Encoding, GeneratorParams, QaoaCaps};
use crate::solvers::{GwConfig, SaConfig, TsConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Fixed number of reads per solver; time-to-solution against an oracle.
    Tts,
    /// Repeated calls until a wall-clock budget expires; best solution found.
    Bsf,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Tts => "tts",
            Scenario::Bsf => "bsf",
        }
    }
}

fn default_seed() -> u64 {
    0
}
/// Budget for Max-Cut style rosters.
pub const DEFAULT_TIME_LIMIT: f64 = 10.0;
/// Budget when every instance source is a TSP family.
pub const DEFAULT_TSP_TIME_LIMIT: f64 = 60.0;
fn default_output() -> PathBuf {
    PathBuf::from("results")
}
fn default_jobs() -> usize {
    1
}
fn default_bins() -> usize {
    4
}
fn default_degree() -> usize {
    3
}
fn default_restarts() -> usize {
    1000
}
fn default_layer_time() -> f64 {
    1e-6
}
fn default_shots() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Seconds per (instance, solver) in `bsf` runs; see
    /// [`ExperimentConfig::time_limit`] for the default.
    #[serde(default)]
    pub time_limit: Option<f64>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    /// Equal-frequency node-count bins for `bsf` summaries.
    #[serde(default = "default_bins")]
    pub bins: usize,
    /// Largest instance solved by the exhaustive oracle in `tts` runs.
    #[serde(default = "default_oracle_cap")]
    pub oracle_cap: usize,
    pub instances: Vec<InstanceSource>,
    pub solvers: Vec<SolverEntry>,
    #[serde(default)]
    pub tune: Option<TuneConfig>,
}

fn default_oracle_cap() -> usize {
    DEFAULT_EXHAUSTIVE_CAP
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Configured budget, or 60 s for all-TSP datasets and 10 s otherwise.
    pub fn time_limit(&self) -> f64 {
        self.time_limit.unwrap_or_else(|| {
            if self.instances.iter().all(InstanceSource::is_tsp) {
                DEFAULT_TSP_TIME_LIMIT
            } else {
                DEFAULT_TIME_LIMIT
            }
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.solvers.is_empty() {
            return bad("solver roster is empty".into());
        }
        if self.instances.is_empty() {
            return bad("no instance sources".into());
        }
        let limit = self.time_limit();
        if self.scenario == Scenario::Bsf && !(limit > 0.0 && limit.is_finite()) {
            return bad(format!("time_limit must be > 0, got {limit}"));
        }
        if self.jobs == 0 {
            return bad("jobs must be >= 1".into());
        }
        let mut ids = BTreeSet::new();
        for s in &self.solvers {
            if !ids.insert(s.id.as_str()) {
                return bad(format!("duplicate solver id {:?}", s.id));
            }
            s.spec.validate().map_err(|e| HarnessError::Config(format!("solver {:?}: {e}", s.id)))?;
        }
        for src in &self.instances {
            src.validate()?;
        }
        if let Some(t) = &self.tune {
            if t.instances.is_empty() {
                return bad("tune.instances is empty".into());
            }
            for src in &t.instances {
                src.validate()?;
            }
        }
        Ok(())
    }
}

/// Where benchmark instances come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSource {
    Regular {
        sizes: Vec<usize>,
        count: usize,
        #[serde(default = "default_degree")]
        degree: usize,
    },
    ErdosRenyi {
        sizes: Vec<usize>,
        count: usize,
        density: f64,
        #[serde(default)]
        weights: WeightLaw,
    },
    /// `sizes` count all locations, depot included.
    TspCircular {
        sizes: Vec<usize>,
        count: usize,
        sigma: f64,
        #[serde(default)]
        nn_filter: bool,
    },
    TspPlanar {
        sizes: Vec<usize>,
        count: usize,
        #[serde(default)]
        nn_filter: bool,
    },
    /// Edge-list files matching a glob pattern.
    Files { glob: String },
}

impl InstanceSource {
    pub fn family(&self) -> String {
        match self {
            InstanceSource::Regular { degree, .. } => format!("regular{degree}"),
            InstanceSource::ErdosRenyi { density, .. } => format!("er{}", (density * 100.0).round()),
            InstanceSource::TspCircular { sigma, .. } => format!("circular_s{sigma}"),
            InstanceSource::TspPlanar { .. } => "planar".into(),
            InstanceSource::Files { .. } => "files".into(),
        }
    }

    pub fn is_tsp(&self) -> bool {
        matches!(self, InstanceSource::TspCircular { .. } | InstanceSource::TspPlanar { .. })
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        match self {
            InstanceSource::Regular { sizes, .. }
            | InstanceSource::ErdosRenyi { sizes, .. }
            | InstanceSource::TspCircular { sizes, .. }
            | InstanceSource::TspPlanar { sizes, .. } => {
                if sizes.is_empty() {
                    return bad(format!("{}: sizes is empty", self.family()));
                }
            }
            InstanceSource::Files { glob } => {
                if glob.is_empty() {
                    return bad("files: empty glob".into());
                }
            }
        }
        if let InstanceSource::ErdosRenyi { density, .. } = self {
            if !(*density > 0.0 && *density <= 1.0) {
                return bad(format!("density must lie in (0, 1], got {density}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverEntry {
    pub id: String,
    #[serde(flatten)]
    pub spec: SolverSpec,
}

impl SolverEntry {
    /// Hash of the resolved solver configuration.
    pub fn config_hash(&self) -> String {
        content_hash(serde_json::to_string(&self.spec).expect("serialisable").as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct RestartConfig {
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

impl Default for RestartConfig {
    fn default() -> Self {
        RestartConfig { restarts: default_restarts() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct ExhaustiveConfig {
    #[serde(default = "default_oracle_cap")]
    pub cap: usize,
}

/// Schedule of a QAOA solver: the linear ramp or explicit generator
/// coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Schedule {
    Named(String),
    Generator(GeneratorParams),
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Named("ramp".into())
    }
}

impl Schedule {
    pub fn generator(&self) -> Result<GeneratorParams, HarnessError> {
        match self {
            Schedule::Named(n) if n == "ramp" => Ok(GeneratorParams::linear_ramp(4)),
            Schedule::Named(n) => Err(HarnessError::Config(format!("unknown schedule {n:?}; use \"ramp\" or coefficients"))),
            Schedule::Generator(g) => Ok(g.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct QaoaSolverConfig {
    pub p: usize,
    #[serde(default)]
    pub schedule: Schedule,
    /// Samples drawn per call in time-limited runs.
    #[serde(default = "default_shots")]
    pub shots: usize,
    /// Seconds per CNOT layer when converting layer counts to time.
    #[serde(default = "default_layer_time")]
    pub cnot_layer_time: f64,
    /// TSP encoding; ignored for Max-Cut.
    #[serde(default)]
    pub encoding: Option<Encoding>,
    #[serde(default)]
    pub caps: QaoaCaps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverSpec {
    Sa(SaConfig),
    Ts(TsConfig),
    Ls(RestartConfig),
    /// Same procedure as `ls`, reported under its own name.
    Greedy(RestartConfig),
    Gw(GwConfig),
    Exhaustive(ExhaustiveConfig),
    Qaoa(QaoaSolverConfig),
}

impl SolverSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            SolverSpec::Sa(_) => "sa",
            SolverSpec::Ts(_) => "ts",
            SolverSpec::Ls(_) => "ls",
            SolverSpec::Greedy(_) => "greedy",
            SolverSpec::Gw(_) => "gw",
            SolverSpec::Exhaustive(_) => "exhaustive",
            SolverSpec::Qaoa(_) => "qaoa",
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            SolverSpec::Sa(c) => c.validate().map_err(|e| e.to_string()),
            SolverSpec::Ts(c) => c.validate().map_err(|e| e.to_string()),
            SolverSpec::Ls(c) | SolverSpec::Greedy(c) => {
                if c.restarts == 0 {
                    Err("restarts must be >= 1".into())
                } else {
                    Ok(())
                }
            }
            SolverSpec::Gw(c) => c.validate().map_err(|e| e.to_string()),
            SolverSpec::Exhaustive(_) => Ok(()),
            SolverSpec::Qaoa(c) => {
                if c.p == 0 {
                    return Err("p must be >= 1".into());
                }
                if c.shots == 0 {
                    return Err("shots must be >= 1".into());
                }
                if let Schedule::Named(n) = &c.schedule {
                    if n != "ramp" {
                        return Err(format!("unknown schedule {n:?}"));
                    }
                }
                Ok(())
            }
        }
    }
}

/// One axis of a hyperparameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub key: String,
    pub values: Vec<toml::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuneConfig {
    /// Solver id from the roster whose parameters are searched.
    pub solver: String,
    /// Record metric to minimise (mean over tuning instances), or
    /// `best_cost`.
    pub objective: String,
    pub grid: Vec<GridAxis>,
    pub instances: Vec<InstanceSource>,
}
