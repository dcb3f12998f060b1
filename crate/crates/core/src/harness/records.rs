//! Run records and their line-delimited JSON form. Non-finite reals are
//! written as the strings `"inf"`, `"-inf"` and `"nan"`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::HarnessError;
use crate::metrics::Reference;
use crate::model::Timing;

/// Real number that survives JSON round trips when infinite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            s.serialize_f64(v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct RealVisitor;
        impl Visitor<'_> for RealVisitor {
            type Value = Real;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                match v {
                    "inf" => Ok(Real(f64::INFINITY)),
                    "-inf" => Ok(Real(f64::NEG_INFINITY)),
                    "nan" => Ok(Real(f64::NAN)),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }
        d.deserialize_any(RealVisitor)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.0.is_finite() {
            write!(f, "{}", self.0)
        } else if self.0.is_nan() {
            f.write_str("nan")
        } else if self.0 > 0.0 {
            f.write_str("inf")
        } else {
            f.write_str("-inf")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed,
    Skipped,
}

/// Metric keys written by the runners.
pub mod keys {
    pub const P_STAR: &str = "p_star";
    pub const TTS: &str = "tts";
    pub const TTS_OH: &str = "tts_oh";
    pub const TTS_LAYERS: &str = "tts_layers";
    pub const AR: &str = "ar";
    pub const RATIO: &str = "ratio";
    pub const RELATIVE_ERROR: &str = "relative_error";
    pub const OVERALL_BEST: &str = "overall_best";
    pub const FEASIBILITY: &str = "feasibility";
    pub const TOUR_VALIDITY: &str = "tour_validity";
    pub const COMBINED_ERROR: &str = "combined_error";
    pub const LAYERS: &str = "layers_per_shot";

    /// Keys whose values depend on measured time.
    pub const TIMING: [&str; 2] = [TTS, TTS_OH];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    pub group: String,
    pub instance_id: String,
    pub instance_hash: String,
    pub family: String,
    pub num_nodes: usize,
    pub solver_id: String,
    pub solver_kind: String,
    pub config_hash: String,
    pub seed: u64,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub best_cost: Option<Real>,
    pub best_bitstring: Option<String>,
    pub draws: u64,
    pub calls: u64,
    pub timing: Timing,
    pub cpu_time: f64,
    pub wall_time: f64,
    pub reference: Option<Reference>,
    pub metrics: BTreeMap<String, Real>,
}

impl RunRecord {
    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).map(|r| r.0)
    }

    pub fn set_metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), Real(value));
    }

    pub fn is_ok(&self) -> bool {
        self.status == RunStatus::Ok
    }

    /// The record without anything derived from measured time. In
    /// time-limited runs the number of calls and draws also depends on
    /// timing and is dropped.
    pub fn deterministic_view(&self) -> RunRecord {
        let mut r = self.clone();
        r.timing = Timing::default();
        r.cpu_time = 0.0;
        r.wall_time = 0.0;
        for k in keys::TIMING {
            r.metrics.remove(k);
        }
        if r.scenario == "bsf" {
            r.draws = 0;
            r.calls = 0;
        }
        r
    }
}

pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<(), HarnessError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n").map_err(|e| HarnessError::io(path, e))?;
    }
    out.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, HarnessError> {
    let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = Vec::new();
    for line in std::io::BufReader::new(file).lines() {
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}


#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;

    /// Minimal OK record for `instance` with the given best cost.
    pub fn record(instance: &str, best_cost: f64) -> RunRecord {
        RunRecord {
            scenario: "tts".into(),
            group: "g".into(),
            instance_id: instance.into(),
            instance_hash: "h".into(),
            family: "f".into(),
            num_nodes: 4,
            solver_id: "s".into(),
            solver_kind: "sa".into(),
            config_hash: "c".into(),
            seed: 1,
            status: RunStatus::Ok,
            error: None,
            best_cost: Some(Real(best_cost)),
            best_bitstring: None,
            draws: 1,
            calls: 1,
            timing: Timing::default(),
            cpu_time: 0.0,
            wall_time: 0.0,
            reference: None,
            metrics: BTreeMap::new(),
        }
    }
}
