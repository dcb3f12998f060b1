//! Goemans-Williamson sampling on a low-rank Max-Cut relaxation.
//!
//! Each node gets a unit vector in `r = min(n, ceil(sqrt(2n)) + 1)`
//! dimensions. The relaxed cut `sum w_ij (1 - v_i.v_j) / 2` is maximised by
//! exact per-row maximisation (each `v_i` is set to the unit vector opposite
//! its weighted neighbour sum), which keeps every row on the unit sphere.
//! Random hyperplanes through the origin then round the vectors to cuts.

use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::instances::{rng_from_seed, MaxCutInstance};
use crate::model::{Bitstring, SampleSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GwConfig {
    pub hyperplanes: usize,
    pub seed: u64,
    /// Relative objective change that counts as converged.
    pub tolerance: f64,
    /// Iterations spanned by the convergence check.
    pub window: usize,
    pub max_iterations: usize,
}

impl Default for GwConfig {
    fn default() -> Self {
        GwConfig { hyperplanes: 1000, seed: 0, tolerance: 1e-7, window: 50, max_iterations: 20_000 }
    }
}

impl GwConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.window == 0 || self.max_iterations == 0 {
            return Err(SolverError::InvalidConfig("gw: window and max_iterations must be >= 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(SolverError::InvalidConfig("gw: tolerance must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwRelaxation {
    pub vectors: Vec<Vec<f64>>,
    pub rank: usize,
    /// Relaxed cut weight, an upper bound on the maximum cut up to the
    /// solver tolerance.
    pub objective: f64,
    pub iterations: usize,
    pub relative_change: f64,
    /// Set when some edge weight is negative; the 0.878 bound then has no
    /// meaning.
    pub negative_weights: bool,
}

#[derive(Debug, Clone)]
pub struct GwOutput {
    pub samples: SampleSet,
    pub relaxation: GwRelaxation,
}

pub fn rank_for(n: usize) -> usize {
    let r = ((2 * n) as f64).sqrt().ceil() as usize + 1;
    r.min(n).max(1)
}

fn relaxed_cut(inst: &MaxCutInstance, v: &[Vec<f64>]) -> f64 {
    inst.edges()
        .iter()
        .map(|e| e.w * (1.0 - dot(&v[e.u], &v[e.v])) / 2.0)
        .sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(a: &mut [f64]) -> bool {
    let norm = dot(a, a).sqrt();
    if norm > 0.0 && norm.is_finite() {
        a.iter_mut().for_each(|x| *x /= norm);
        true
    } else {
        false
    }
}

/// Solves the relaxation from a seeded random start.
pub fn gw_relax(inst: &MaxCutInstance, cfg: &GwConfig) -> Result<GwRelaxation, SolverError> {
    cfg.validate()?;
    let n = inst.num_nodes();
    let rank = rank_for(n);
    let adj = inst.adjacency();
    let mut rng = rng_from_seed(cfg.seed);
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|_| loop {
            let mut row: Vec<f64> = (0..rank).map(|_| rng.sample(StandardNormal)).collect();
            if normalize(&mut row) {
                break row;
            }
        })
        .collect();

    let mut history = vec![relaxed_cut(inst, &v)];
    let mut g = vec![0.0; rank];
    let mut relative_change = f64::INFINITY;
    for it in 1..=cfg.max_iterations {
        for i in 0..n {
            g.iter_mut().for_each(|x| *x = 0.0);
            for &(j, w) in &adj[i] {
                for (gk, vk) in g.iter_mut().zip(&v[j]) {
                    *gk += w * vk;
                }
            }
            g.iter_mut().for_each(|x| *x = -*x);
            if normalize(&mut g) {
                v[i].copy_from_slice(&g);
            }
        }
        let f = relaxed_cut(inst, &v);
        history.push(f);
        if it >= cfg.window {
            let old = history[it - cfg.window];
            relative_change = (f - old).abs() / f.abs().max(f64::MIN_POSITIVE);
            if f == old || relative_change < cfg.tolerance {
                return Ok(GwRelaxation {
                    vectors: v,
                    rank,
                    objective: f,
                    iterations: it,
                    relative_change: if f == old { 0.0 } else { relative_change },
                    negative_weights: inst.has_negative_weights(),
                });
            }
        }
    }
    Err(SolverError::NotConverged { iterations: cfg.max_iterations, residual: relative_change })
}

/// Rounds a relaxation with `hyperplanes` random hyperplanes, one cut each.
pub fn gw_round(inst: &MaxCutInstance, relax: &GwRelaxation, hyperplanes: usize, seed: u64) -> SampleSet {
    let n = inst.num_nodes();
    let mut rng = rng_from_seed(seed);
    let mut out = SampleSet::new(n);
    let started = Instant::now();
    for _ in 0..hyperplanes {
        let r: Vec<f64> = (0..relax.rank).map(|_| rng.sample(StandardNormal)).collect();
        let x: Vec<bool> = relax.vectors.iter().map(|vi| dot(vi, &r) < 0.0).collect();
        let cost = -inst.cut_value(&x);
        out.push(Bitstring::from_bits(x), cost).expect("dimension matches");
    }
    out.timing.solve = started.elapsed().as_secs_f64();
    out
}

/// Relaxation (timed as preprocessing) followed by hyperplane rounding.
pub fn goemans_williamson(inst: &MaxCutInstance, cfg: &GwConfig) -> Result<GwOutput, SolverError> {
    let started = Instant::now();
    let relaxation = gw_relax(inst, cfg)?;
    let preprocess = started.elapsed().as_secs_f64();
    let round_seed = cfg.seed ^ 0x9e37_79b9_7f4a_7c15;
    let mut samples = gw_round(inst, &relaxation, cfg.hyperplanes, round_seed);
    samples.timing.preprocess = preprocess;
    Ok(GwOutput { samples, relaxation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_regular, Edge, InstanceMeta};

    fn cycle(n: usize) -> MaxCutInstance {
        let edges = (0..n).map(|i| Edge { u: i, v: (i + 1) % n, w: 1.0 }).collect();
        MaxCutInstance::new(n, edges, InstanceMeta::default()).unwrap()
    }

    fn mean_cut(s: &SampleSet) -> f64 {
        let total: f64 = s.iter().map(|(_, e)| -e.cost * e.count as f64).sum();
        total / s.total_draws() as f64
    }

    #[test]
    fn single_edge_antipodal() {
        let g = MaxCutInstance::new(2, vec![Edge { u: 0, v: 1, w: 1.5 }], InstanceMeta::default()).unwrap();
        let out = goemans_williamson(&g, &GwConfig { hyperplanes: 200, ..Default::default() }).unwrap();
        let v = &out.relaxation.vectors;
        assert!((dot(&v[0], &v[1]) + 1.0).abs() < 1e-9);
        assert!(out.samples.iter().all(|(_, e)| e.cost == -1.5));
    }

    #[test]
    fn triangle_expected_cut() {
        let out = goemans_williamson(&cycle(3), &GwConfig { hyperplanes: 5000, seed: 2, ..Default::default() }).unwrap();
        assert!((out.relaxation.objective - 2.25).abs() < 1e-6);
        assert!(mean_cut(&out.samples) >= 0.878 * 2.0);
    }

    #[test]
    fn five_cycle_ratio() {
        let out = goemans_williamson(&cycle(5), &GwConfig { hyperplanes: 10_000, seed: 5, ..Default::default() }).unwrap();
        let cuts: Vec<f64> = out
            .samples
            .iter()
            .flat_map(|(_, e)| std::iter::repeat_n(-e.cost / 4.0, e.count as usize))
            .collect();
        let m = cuts.len() as f64;
        let mean = cuts.iter().sum::<f64>() / m;
        let var = cuts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (m - 1.0);
        assert!(mean + 3.0 * (var / m).sqrt() >= 0.878, "mean ratio {mean}");
    }

    #[test]
    fn relaxation_bounds_optimum_and_flip_invariance() {
        let g = gen_regular(12, 3, 9).unwrap();
        let (_, opt) = crate::model::argmin_exhaustive(&g.to_qubo(), 26).unwrap();
        let out = goemans_williamson(&g, &GwConfig { hyperplanes: 300, seed: 1, ..Default::default() }).unwrap();
        assert!(out.relaxation.objective >= -opt - 1e-6);
        for (b, e) in out.samples.iter() {
            assert_eq!(g.cut_value(b.complement().bits()), -e.cost);
        }
        let again = goemans_williamson(&g, &GwConfig { hyperplanes: 300, seed: 1, ..Default::default() }).unwrap();
        let key = |s: &SampleSet| s.iter().map(|(b, e)| (b.clone(), e.count)).collect::<Vec<_>>();
        assert_eq!(key(&out.samples), key(&again.samples));
    }

    #[test]
    fn iteration_cap_reports_residual() {
        let g = gen_regular(30, 3, 3).unwrap();
        let cfg = GwConfig { max_iterations: 3, window: 50, ..Default::default() };
        assert!(matches!(gw_relax(&g, &cfg), Err(SolverError::NotConverged { iterations: 3, .. })));
    }

    #[test]
    fn negative_weights_flagged() {
        let g = MaxCutInstance::new(3, vec![Edge { u: 0, v: 1, w: -1.0 }, Edge { u: 1, v: 2, w: 1.0 }], InstanceMeta::default())
            .unwrap();
        assert!(gw_relax(&g, &GwConfig::default()).unwrap().negative_weights);
    }
}
