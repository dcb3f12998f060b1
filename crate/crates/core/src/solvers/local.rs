//! First-improvement node-move local search for Max-Cut. Also served as the
//! "greedy" solver.

use std::time::Instant;

use rand::Rng;

use crate::instances::{rng_from_seed, MaxCutInstance};
use crate::model::{Bitstring, SampleSet};

/// Gains below this are treated as zero so float noise cannot cycle.
const GAIN_EPS: f64 = 1e-12;

/// One sample per restart, each a 1-flip-stable bipartition. Costs use the
/// Max-Cut QUBO convention (negated cut weight).
pub fn local_search_maxcut(inst: &MaxCutInstance, restarts: usize, seed: u64) -> SampleSet {
    let n = inst.num_nodes();
    let adj = inst.adjacency();
    let mut rng = rng_from_seed(seed);
    let mut out = SampleSet::new(n);
    let started = Instant::now();
    for _ in 0..restarts {
        let mut x: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
        loop {
            let mut changed = false;
            for i in 0..n {
                if move_gain(&adj, &x, i) > GAIN_EPS {
                    x[i] = !x[i];
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let cost = -inst.cut_value(&x);
        out.push(Bitstring::from_bits(x), cost).expect("dimension matches");
    }
    out.timing.solve = started.elapsed().as_secs_f64();
    out
}

/// Change in cut weight when node `i` switches sides.
pub fn move_gain(adj: &[Vec<(usize, f64)>], x: &[bool], i: usize) -> f64 {
    adj[i]
        .iter()
        .map(|&(j, w)| if x[j] == x[i] { w } else { -w })
        .sum()
}
