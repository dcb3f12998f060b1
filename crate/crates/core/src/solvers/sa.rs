//! Simulated annealing with single-bit-flip moves and a geometric schedule.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{apply_flip, flip_delta, local_fields, SolverError};
use crate::instances::rng_from_seed;
use crate::model::{BinaryPolynomial, Bitstring, QuadraticModel, SampleSet};

const PROBE_FLIPS: usize = 100;
const FINAL_TEMPERATURE_RATIO: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SaConfig {
    /// Monte-Carlo sweeps per read; one sweep proposes `n` flips.
    pub sweeps: usize,
    /// Initial temperature. `None` scales it to the largest `|ΔC|` seen over
    /// 100 random probe flips.
    pub t0: Option<f64>,
    /// Geometric decay per sweep. `None` picks the rate that reaches
    /// `1e-3 · T0` on the last sweep.
    pub alpha: Option<f64>,
    pub reads: usize,
    /// Acceptance constant `k` in `exp(-|ΔC| / kT)`.
    pub k: f64,
    pub seed: u64,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            sweeps: 20,
            t0: None,
            alpha: None,
            reads: 1,
            k: 1.0,
            seed: 0,
        }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::InvalidConfig(m));
        if self.sweeps == 0 {
            return bad("sa: sweeps must be >= 1".into());
        }
        if self.reads == 0 {
            return bad("sa: reads must be >= 1".into());
        }
        if let Some(t0) = self.t0 {
            if !(t0 > 0.0 && t0.is_finite()) {
                return bad(format!("sa: t0 must be > 0, got {t0}"));
            }
        }
        if let Some(alpha) = self.alpha {
            if !(alpha > 0.0 && alpha < 1.0) {
                return bad(format!("sa: alpha must lie in (0, 1), got {alpha}"));
            }
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return bad(format!("sa: k must be > 0, got {}", self.k));
        }
        Ok(())
    }

    /// Decay rate actually used.
    pub fn resolved_alpha(&self) -> f64 {
        self.alpha.unwrap_or_else(|| {
            if self.sweeps > 1 {
                FINAL_TEMPERATURE_RATIO.powf(1.0 / (self.sweeps - 1) as f64)
            } else {
                FINAL_TEMPERATURE_RATIO
            }
        })
    }
}

/// Samples `cfg.reads` annealing runs; each read contributes its best state.
pub fn simulated_annealing(poly: &BinaryPolynomial, cfg: &SaConfig) -> Result<SampleSet, SolverError> {
    cfg.validate()?;
    let model = poly.to_quadratic()?;
    Ok(anneal(&model, cfg))
}

/// Annealing on a prepared quadratic model.
pub fn anneal(model: &QuadraticModel, cfg: &SaConfig) -> SampleSet {
    let n = model.num_vars();
    let mut out = SampleSet::new(n);
    let mut rng = rng_from_seed(cfg.seed);

    let pre = Instant::now();
    let t0 = cfg.t0.unwrap_or_else(|| probe_temperature(model, &mut rng));
    let alpha = cfg.resolved_alpha();
    out.timing.preprocess = pre.elapsed().as_secs_f64();

    let solve = Instant::now();
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..cfg.reads {
        let mut x: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
        let mut fields = local_fields(model, &x);
        let mut energy = model.energy(&x);
        let mut best = x.clone();
        let mut best_energy = energy;
        let mut temperature = t0;
        for _ in 0..cfg.sweeps {
            order.shuffle(&mut rng);
            let kt = cfg.k * temperature;
            for &i in &order {
                let delta = flip_delta(&x, &fields, i);
                if delta < 0.0 || rng.random::<f64>() < (-delta / kt).exp() {
                    apply_flip(model, &mut x, &mut fields, i);
                    energy += delta;
                    if energy < best_energy {
                        best_energy = energy;
                        best.copy_from_slice(&x);
                    }
                }
            }
            temperature *= alpha;
        }
        let cost = model.energy(&best);
        out.push(Bitstring::from_bits(best), cost)
            .expect("state has the model dimension");
    }
    out.timing.solve = solve.elapsed().as_secs_f64();
    out
}

/// Largest `|ΔC|` over a random walk of probe flips; 1 for a flat landscape.
fn probe_temperature(model: &QuadraticModel, rng: &mut impl Rng) -> f64 {
    let n = model.num_vars();
    if n == 0 {
        return 1.0;
    }
    let mut x: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
    let mut fields = local_fields(model, &x);
    let mut max_delta: f64 = 0.0;
    for _ in 0..PROBE_FLIPS {
        let i = rng.random_range(0..n);
        max_delta = max_delta.max(flip_delta(&x, &fields, i).abs());
        apply_flip(model, &mut x, &mut fields, i);
    }
    if max_delta > 0.0 {
        max_delta
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_regular, MaxCutInstance};
    use crate::model::argmin_exhaustive;

    fn triangle() -> BinaryPolynomial {
        MaxCutInstance::new(
            3,
            vec![
                crate::instances::Edge { u: 0, v: 1, w: 1.0 },
                crate::instances::Edge { u: 1, v: 2, w: 1.0 },
                crate::instances::Edge { u: 0, v: 2, w: 1.0 },
            ],
            Default::default(),
        )
        .unwrap()
        .to_qubo()
    }

    #[test]
    fn config_validation() {
        assert!(SaConfig::default().validate().is_ok());
        let bad = [
            SaConfig { sweeps: 0, ..Default::default() },
            SaConfig { alpha: Some(1.0), ..Default::default() },
            SaConfig { alpha: Some(0.0), ..Default::default() },
            SaConfig { t0: Some(0.0), ..Default::default() },
            SaConfig { reads: 0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn auto_alpha_reaches_final_ratio() {
        let cfg = SaConfig { sweeps: 20, ..Default::default() };
        let alpha = cfg.resolved_alpha();
        assert!((alpha.powi(19) - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn single_variable_always_set() {
        let p = BinaryPolynomial::from_terms(1, [(&[0usize][..], -1.0)]).unwrap();
        let cfg = SaConfig { sweeps: 1, reads: 50, seed: 4, ..Default::default() };
        let s = simulated_annealing(&p, &cfg).unwrap();
        assert_eq!(s.total_draws(), 50);
        assert_eq!(s.num_distinct(), 1);
        assert_eq!(s.best_cost(), Some(-1.0));
    }

    #[test]
    fn zero_temperature_is_descent() {
        let g = gen_regular(12, 3, 5).unwrap();
        let q = g.to_qubo();
        let model = q.to_quadratic().unwrap();
        let cfg = SaConfig { sweeps: 3, reads: 1, t0: Some(1e-12), ..Default::default() };
        for seed in 0..20 {
            let cfg = SaConfig { seed, ..cfg.clone() };
            // reproduce the initial state drawn by the read
            let mut rng = rng_from_seed(seed);
            let x0: Vec<bool> = (0..12).map(|_| rng.random::<bool>()).collect();
            let s = anneal(&model, &cfg);
            assert!(s.best_cost().unwrap() <= model.energy(&x0));
        }
    }

    #[test]
    fn triangle_optimum_dominates() {
        let p = triangle();
        let (_, opt) = argmin_exhaustive(&p, 26).unwrap();
        let cfg = SaConfig { sweeps: 20, reads: 1000, seed: 7, ..Default::default() };
        let s = simulated_annealing(&p, &cfg).unwrap();
        let hits: u64 = s.iter().filter(|(_, e)| e.cost <= opt + 1e-9).map(|(_, e)| e.count).sum();
        assert!(hits as f64 / 1000.0 > 0.5);
        assert!(s.verify_costs(&p, 1e-9).unwrap());
    }

    #[test]
    fn deterministic_per_seed() {
        let p = gen_regular(16, 3, 1).unwrap().to_qubo();
        let cfg = SaConfig { reads: 20, seed: 99, ..Default::default() };
        let a = simulated_annealing(&p, &cfg).unwrap();
        let b = simulated_annealing(&p, &cfg).unwrap();
        let strip = |s: &SampleSet| s.iter().map(|(b, e)| (b.clone(), e.count, e.cost)).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
    }
}
