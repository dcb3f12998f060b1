//! CNOT-layer accounting per QAOA round and the edge colouring that sets the
//! Max-Cut cost-layer depth.

use serde::{Deserialize, Serialize};

use super::tsp::ceil_log2;
use super::{Encoding, QaoaError};
use crate::instances::MaxCutInstance;
use crate::metrics::{repetitions, DEFAULT_TARGET};

/// Layer counts; `None` marks a count with no closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerLedger {
    pub state_prep_layers: Option<u64>,
    pub cost_layers_per_round: u64,
    pub mixer_layers_per_round: Option<u64>,
    pub qubit_count: u64,
}

impl LayerLedger {
    /// `state_prep + p · (cost + mixer)`.
    pub fn total(&self, p: usize) -> Result<u64, QaoaError> {
        let prep = self.state_prep_layers.ok_or(QaoaError::Unavailable("state preparation layers"))?;
        let mixer = self.mixer_layers_per_round.ok_or(QaoaError::Unavailable("mixer layers"))?;
        Ok(prep + p as u64 * (self.cost_layers_per_round + mixer))
    }
}

/// TSP ledger for `k` free locations.
pub fn tsp_ledger(encoding: Encoding, k: usize) -> LayerLedger {
    let k64 = k as u64;
    let log = ceil_log2(k) as u64;
    match encoding {
        Encoding::Qubo => LayerLedger {
            state_prep_layers: Some(0),
            cost_layers_per_round: 8 * k64,
            mixer_layers_per_round: Some(0),
            qubit_count: k64 * k64,
        },
        Encoding::Hobo => LayerLedger {
            state_prep_layers: Some(0),
            cost_layers_per_round: 2 * k64.pow(3),
            mixer_layers_per_round: Some(0),
            qubit_count: k64 * log,
        },
        Encoding::Xy => LayerLedger {
            state_prep_layers: Some(4 * log),
            cost_layers_per_round: 6 * k64,
            mixer_layers_per_round: Some(if k % 2 == 1 { 12 } else { 8 }),
            qubit_count: k64 * k64,
        },
        Encoding::Perm => LayerLedger {
            state_prep_layers: None,
            cost_layers_per_round: 4 * k64,
            mixer_layers_per_round: None,
            qubit_count: k64 * k64,
        },
    }
}

/// Max-Cut ledger: each colour class is one parallel layer of `R_ZZ`
/// gates, two CNOT layers each; the `R_X` mixer adds none.
pub fn maxcut_ledger(inst: &MaxCutInstance) -> LayerLedger {
    let colors = edge_coloring(inst.num_nodes(), &edge_pairs(inst)).num_colors as u64;
    LayerLedger {
        state_prep_layers: Some(0),
        cost_layers_per_round: 2 * colors,
        mixer_layers_per_round: Some(0),
        qubit_count: inst.num_nodes() as u64,
    }
}

fn edge_pairs(inst: &MaxCutInstance) -> Vec<(usize, usize)> {
    inst.edges().iter().map(|e| (e.u, e.v)).collect()
}

/// CNOT-layer TTS: `layers_total · ceil(log 0.01 / log(1 - p*))`.
pub fn tts_layers(p_star: f64, layers_total: u64) -> f64 {
    match repetitions(p_star.clamp(0.0, 1.0), DEFAULT_TARGET).expect("clamped probability") {
        Some(r) => layers_total as f64 * r as f64,
        None => f64::INFINITY,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoring {
    /// Colour of each input edge.
    pub colors: Vec<usize>,
    pub num_colors: usize,
}

/// Misra-Gries edge colouring with at most `Δ + 1` colours.
pub fn edge_coloring(num_nodes: usize, edges: &[(usize, usize)]) -> EdgeColoring {
    let n = num_nodes;
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let palette = adj.iter().map(Vec::len).max().unwrap_or(0) + 1;
    // col[u][v] for each edge, symmetric
    let mut col: Vec<Vec<Option<usize>>> = vec![vec![None; n]; n];
    let is_free = |col: &Vec<Vec<Option<usize>>>, x: usize, c: usize| adj[x].iter().all(|&y| col[x][y] != Some(c));
    let free_color = |col: &Vec<Vec<Option<usize>>>, x: usize| (0..palette).find(|&c| is_free(col, x, c)).expect("Δ+1 colours");

    for &(u, v) in edges {
        // maximal fan of u starting at v
        let mut fan = vec![v];
        loop {
            let last = *fan.last().expect("non-empty");
            let next = adj[u].iter().copied().find(|&z| {
                !fan.contains(&z) && col[u][z].is_some_and(|c| is_free(&col, last, c))
            });
            match next {
                Some(z) => fan.push(z),
                None => break,
            }
        }
        let c = free_color(&col, u);
        let d = free_color(&col, *fan.last().expect("non-empty"));

        // invert the cd-path from u (starts with a d edge, since c is free on u)
        if c != d {
            let mut path = Vec::new();
            let (mut x, mut want, mut prev) = (u, d, usize::MAX);
            while let Some(y) = adj[x].iter().copied().find(|&y| y != prev && col[x][y] == Some(want)) {
                path.push((x, y));
                prev = x;
                x = y;
                want = if want == d { c } else { d };
            }
            for &(x, y) in &path {
                let swapped = if col[x][y] == Some(c) { d } else { c };
                col[x][y] = Some(swapped);
                col[y][x] = Some(swapped);
            }
        }

        // first w in the fan with d free whose prefix is still a fan
        let mut w = 0;
        for (i, &f) in fan.iter().enumerate() {
            if i > 0 && !col[u][f].is_some_and(|cf| is_free(&col, fan[i - 1], cf)) {
                break;
            }
            if is_free(&col, f, d) {
                w = i;
                break;
            }
        }
        for i in 0..w {
            let shifted = col[u][fan[i + 1]];
            col[u][fan[i]] = shifted;
            col[fan[i]][u] = shifted;
        }
        col[u][fan[w]] = Some(d);
        col[fan[w]][u] = Some(d);
    }

    let colors: Vec<usize> = edges.iter().map(|&(u, v)| col[u][v].expect("every edge coloured")).collect();
    let mut used: Vec<usize> = colors.clone();
    used.sort_unstable();
    used.dedup();
    EdgeColoring { num_colors: used.len(), colors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_erdos_renyi, gen_regular, Edge, InstanceMeta, WeightLaw};

    fn assert_proper(n: usize, edges: &[(usize, usize)], c: &EdgeColoring) {
        let mut seen = std::collections::HashSet::new();
        for (&(u, v), &k) in edges.iter().zip(&c.colors) {
            assert!(seen.insert((u, k)), "node {u} repeats colour {k}");
            assert!(seen.insert((v, k)), "node {v} repeats colour {k}");
        }
        let mut deg = vec![0; n];
        for &(u, v) in edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let delta = deg.into_iter().max().unwrap_or(0);
        assert!(c.num_colors <= delta + 1 && c.colors.iter().all(|&k| k <= delta));
    }

    #[test]
    fn table_cells() {
        for k in 3..=6u64 {
            let ku = k as usize;
            let log = ceil_log2(ku) as u64;
            let q = tsp_ledger(Encoding::Qubo, ku);
            assert_eq!((q.cost_layers_per_round, q.qubit_count), (8 * k, k * k));
            let h = tsp_ledger(Encoding::Hobo, ku);
            assert_eq!((h.cost_layers_per_round, h.qubit_count), (2 * k * k * k, k * log));
            let x = tsp_ledger(Encoding::Xy, ku);
            assert_eq!((x.cost_layers_per_round, x.qubit_count), (6 * k, k * k));
            assert_eq!(x.state_prep_layers, Some(4 * log));
            assert_eq!(x.mixer_layers_per_round, Some(if k % 2 == 1 { 12 } else { 8 }));
            let p = tsp_ledger(Encoding::Perm, ku);
            assert_eq!((p.cost_layers_per_round, p.qubit_count), (4 * k, k * k));
            assert!(matches!(p.total(3), Err(QaoaError::Unavailable(_))));
        }
        let x4 = tsp_ledger(Encoding::Xy, 4);
        assert_eq!((x4.state_prep_layers, x4.cost_layers_per_round, x4.mixer_layers_per_round), (Some(8), 24, Some(8)));
        assert_eq!(x4.total(2).unwrap(), 8 + 2 * 32);
        let h5 = tsp_ledger(Encoding::Hobo, 5);
        assert_eq!((h5.qubit_count, h5.cost_layers_per_round), (15, 250));
    }

    #[test]
    fn single_edge_two_layers() {
        let g = MaxCutInstance::new(2, vec![Edge { u: 0, v: 1, w: 1.0 }], InstanceMeta::default()).unwrap();
        assert_eq!(maxcut_ledger(&g).cost_layers_per_round, 2);
    }

    #[test]
    fn colorings_are_proper() {
        for seed in 0..30 {
            let g = gen_erdos_renyi(14, 0.4, WeightLaw::Unit, seed).unwrap();
            let e = edge_pairs(&g);
            assert_proper(14, &e, &edge_coloring(14, &e));
            let g = gen_regular(16, 3, seed).unwrap();
            let e = edge_pairs(&g);
            assert_proper(16, &e, &edge_coloring(16, &e));
        }
        let complete: Vec<(usize, usize)> = (0..7).flat_map(|u| (u + 1..7).map(move |v| (u, v))).collect();
        assert_proper(7, &complete, &edge_coloring(7, &complete));
    }

    #[test]
    fn tts_layer_cases() {
        assert_eq!(tts_layers(1.0, 40), 40.0);
        assert_eq!(tts_layers(0.0, 40), f64::INFINITY);
        assert_eq!(tts_layers(0.5, 10), 70.0);
    }
}
