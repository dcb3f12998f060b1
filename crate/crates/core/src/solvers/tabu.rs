//! Tabu search over single-bit flips with a FIFO list of flipped indices.

use std::collections::VecDeque;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{apply_flip, flip_delta, local_fields, SolverError};
use crate::instances::rng_from_seed;
use crate::model::{BinaryPolynomial, Bitstring, QuadraticModel, SampleSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TsConfig {
    /// Tabu list capacity; `None` means `min(20, n)`.
    pub tenure: Option<usize>,
    /// Iterations per restart; `None` means `max(100, 10 n)`.
    pub iterations: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for TsConfig {
    fn default() -> Self {
        TsConfig { tenure: None, iterations: None, restarts: 1, seed: 0 }
    }
}

impl TsConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.iterations == Some(0) {
            return Err(SolverError::InvalidConfig("ts: iterations must be >= 1".into()));
        }
        if self.restarts == 0 {
            return Err(SolverError::InvalidConfig("ts: restarts must be >= 1".into()));
        }
        Ok(())
    }

    pub fn resolved_tenure(&self, n: usize) -> usize {
        self.tenure.unwrap_or(n.min(20))
    }

    pub fn resolved_iterations(&self, n: usize) -> usize {
        self.iterations.unwrap_or((10 * n).max(100))
    }
}

pub fn tabu_search(poly: &BinaryPolynomial, cfg: &TsConfig) -> Result<SampleSet, SolverError> {
    cfg.validate()?;
    let model = poly.to_quadratic()?;
    Ok(search(&model, cfg))
}

/// Tabu search on a prepared quadratic model; one sample per restart.
pub fn search(model: &QuadraticModel, cfg: &TsConfig) -> SampleSet {
    let n = model.num_vars();
    let tenure = cfg.resolved_tenure(n);
    let iterations = cfg.resolved_iterations(n);
    let mut out = SampleSet::new(n);
    let mut rng = rng_from_seed(cfg.seed);
    let started = Instant::now();

    for _ in 0..cfg.restarts {
        let mut x: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
        let mut fields = local_fields(model, &x);
        let mut energy = model.energy(&x);
        let mut best = x.clone();
        let mut best_energy = energy;
        let mut tabu: VecDeque<usize> = VecDeque::with_capacity(tenure + 1);
        let mut is_tabu = vec![0u32; n];

        for _ in 0..iterations {
            if n == 0 {
                break;
            }
            let mut chosen: Option<(usize, f64)> = None;
            for i in 0..n {
                let delta = flip_delta(&x, &fields, i);
                let allowed = is_tabu[i] == 0 || energy + delta < best_energy;
                if allowed && chosen.is_none_or(|(_, d)| delta < d) {
                    chosen = Some((i, delta));
                }
            }
            // every move tabu and none aspirated: release the oldest entry
            let (i, delta) = chosen.unwrap_or_else(|| {
                let i = *tabu.front().expect("a blocked move implies a non-empty list");
                (i, flip_delta(&x, &fields, i))
            });
            apply_flip(model, &mut x, &mut fields, i);
            energy += delta;
            if energy < best_energy {
                best_energy = energy;
                best.copy_from_slice(&x);
            }
            if tenure > 0 {
                tabu.push_back(i);
                is_tabu[i] += 1;
                if tabu.len() > tenure {
                    let old = tabu.pop_front().expect("non-empty");
                    is_tabu[old] -= 1;
                }
            }
        }
        let cost = model.energy(&best);
        out.push(Bitstring::from_bits(best), cost)
            .expect("state has the model dimension");
    }
    out.timing.solve = started.elapsed().as_secs_f64();
    out
}
