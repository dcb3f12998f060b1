//! Turns instance sources into concrete, seeded benchmark instances.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::InstanceSource;
use super::seeds::derive_seed;
use super::HarnessError;
use crate::instances::{gen_erdos_renyi, gen_regular, gen_tsp_circular, gen_tsp_planar, nn_filter, read_edge_list};
use crate::instances::{MaxCutInstance, TspInstance};
use crate::solvers::{tsp_exhaustive, DEFAULT_TSP_CAP};

/// Draws allowed per instance before the nearest-neighbour filter gives up.
const FILTER_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum Problem {
    MaxCut(MaxCutInstance),
    Tsp(TspInstance),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchInstance {
    pub id: String,
    pub family: String,
    /// Graph nodes, or locations including the depot.
    pub num_nodes: usize,
    pub hash: String,
    pub problem: Problem,
}

impl BenchInstance {
    fn maxcut(id: String, family: String, g: MaxCutInstance) -> Self {
        BenchInstance { num_nodes: g.num_nodes(), hash: g.content_hash(), id, family, problem: Problem::MaxCut(g) }
    }

    fn tsp(id: String, family: String, t: TspInstance) -> Self {
        BenchInstance { num_nodes: t.num_locations(), hash: t.content_hash(), id, family, problem: Problem::Tsp(t) }
    }
}

/// Builds every instance of `sources`. `salt` separates independent sets
/// drawn from the same master seed; ids of sets other than `bench` carry
/// the salt as a prefix.
pub fn materialize(sources: &[InstanceSource], master: u64, salt: &str) -> Result<Vec<BenchInstance>, HarnessError> {
    let prefix = if salt == "bench" { String::new() } else { format!("{salt}-") };
    let mut out = Vec::new();
    for src in sources {
        let family = src.family();
        match src {
            InstanceSource::Files { glob: pattern } => {
                let paths = glob::glob(pattern).map_err(|e| HarnessError::Config(format!("glob {pattern:?}: {e}")))?;
                let mut paths: Vec<_> = paths.filter_map(Result::ok).collect();
                paths.sort();
                if paths.is_empty() {
                    return Err(HarnessError::Config(format!("glob {pattern:?} matched no files")));
                }
                for p in paths {
                    let g = read_edge_list(&p)?;
                    out.push(BenchInstance::maxcut(file_id(&p), family.clone(), g));
                }
            }
            InstanceSource::Regular { sizes, count, degree } => {
                for_each_slot(&prefix, &family, sizes, *count, |id, n| {
                    let g = gen_regular(n, *degree, derive_seed(master, &id, salt))?;
                    out.push(BenchInstance::maxcut(id, family.clone(), g));
                    Ok(())
                })?;
            }
            InstanceSource::ErdosRenyi { sizes, count, density, weights } => {
                for_each_slot(&prefix, &family, sizes, *count, |id, n| {
                    let g = gen_erdos_renyi(n, *density, *weights, derive_seed(master, &id, salt))?;
                    out.push(BenchInstance::maxcut(id, family.clone(), g));
                    Ok(())
                })?;
            }
            InstanceSource::TspCircular { sizes, count, sigma, nn_filter: filter } => {
                for_each_slot(&prefix, &family, sizes, *count, |id, n| {
                    let t = draw_tsp(&id, master, salt, *filter, |seed| Ok(gen_tsp_circular(n, *sigma, seed)?))?;
                    out.push(BenchInstance::tsp(id, family.clone(), t));
                    Ok(())
                })?;
            }
            InstanceSource::TspPlanar { sizes, count, nn_filter: filter } => {
                for_each_slot(&prefix, &family, sizes, *count, |id, n| {
                    let t = draw_tsp(&id, master, salt, *filter, |seed| Ok(gen_tsp_planar(n, seed)?))?;
                    out.push(BenchInstance::tsp(id, family.clone(), t));
                    Ok(())
                })?;
            }
        }
    }
    Ok(out)
}

fn file_id(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn for_each_slot<F>(prefix: &str, family: &str, sizes: &[usize], count: usize, mut f: F) -> Result<(), HarnessError>
where
    F: FnMut(String, usize) -> Result<(), HarnessError>,
{
    for &n in sizes {
        for i in 0..count {
            f(format!("{prefix}{family}-n{n}-{i:03}"), n)?;
        }
    }
    Ok(())
}

fn draw_tsp<G>(id: &str, master: u64, salt: &str, filter: bool, gen: G) -> Result<TspInstance, HarnessError>
where
    G: Fn(u64) -> Result<TspInstance, HarnessError>,
{
    if !filter {
        return gen(derive_seed(master, id, salt));
    }
    for attempt in 0..FILTER_ATTEMPTS {
        let t = gen(derive_seed(master, id, &format!("{salt}/{attempt}")))?;
        let opt = tsp_exhaustive(&t, DEFAULT_TSP_CAP)?;
        if nn_filter(&t, opt.best_length) {
            return Ok(t);
        }
    }
    Err(HarnessError::Config(format!(
        "{id}: no draw in {FILTER_ATTEMPTS} attempts defeats nearest-neighbour"
    )))
}
