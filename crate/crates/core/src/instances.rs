//! Max-Cut and TSP instances: seeded generators, the nearest-neighbour
//! hardness filter and the edge-list file format.
//!
//! Every generator is a pure function of its parameters and seed. Randomness
//! comes from [`rng_from_seed`], a ChaCha8 generator (counter-based stream
//! cipher, 64-bit block counter) keyed by expanding the `u64` seed with
//! `SeedableRng::seed_from_u64`; draws are consumed in the order documented on
//! each generator, so output is identical across runs and platforms.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::BinaryPolynomial;
use crate::solvers::tsp::nearest_neighbor_tsp;

/// Tolerance used when comparing tour lengths.
pub const LENGTH_TOL: f64 = 1e-9;

const MAX_PAIRING_ATTEMPTS: usize = 10_000;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("n * degree must be even (n = {n}, degree = {degree})")]
    Parity { n: usize, degree: usize },
    #[error("pairing model found no simple {degree}-regular graph on {n} nodes after {attempts} attempts")]
    PairingFailed {
        n: usize,
        degree: usize,
        attempts: usize,
    },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Where an instance came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub generator: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub source: Option<String>,
}

impl InstanceMeta {
    fn generated(generator: &str, params: &[(&str, f64)], seed: u64) -> Self {
        InstanceMeta {
            generator: generator.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            seed: Some(seed),
            source: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Edge weight law for random graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightLaw {
    #[default]
    Unit,
    /// Uniform on [0, 1), drawn right after the edge's inclusion draw.
    Uniform,
}

/// Undirected weighted graph `G = (V, E, w)`, edges stored with `u < v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxCutInstance {
    num_nodes: usize,
    edges: Vec<Edge>,
    pub meta: InstanceMeta,
}

impl MaxCutInstance {
    /// Validates and normalizes an edge list (endpoints reordered to `u < v`).
    pub fn new(num_nodes: usize, edges: Vec<Edge>, meta: InstanceMeta) -> Result<Self, InstanceError> {
        if num_nodes < 2 {
            return Err(InstanceError::InvalidGraph(format!(
                "need at least 2 nodes, got {num_nodes}"
            )));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut normalized = Vec::with_capacity(edges.len());
        for e in edges {
            let (u, v) = if e.u < e.v { (e.u, e.v) } else { (e.v, e.u) };
            if u == v {
                return Err(InstanceError::InvalidGraph(format!("self-loop on node {u}")));
            }
            if v >= num_nodes {
                return Err(InstanceError::InvalidGraph(format!(
                    "node {v} out of range for {num_nodes} nodes"
                )));
            }
            if !e.w.is_finite() {
                return Err(InstanceError::InvalidGraph(format!("non-finite weight on ({u}, {v})")));
            }
            if !seen.insert((u, v)) {
                return Err(InstanceError::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
            normalized.push(Edge { u, v, w: e.w });
        }
        Ok(MaxCutInstance {
            num_nodes,
            edges: normalized,
            meta,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_nodes];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn has_negative_weights(&self) -> bool {
        self.edges.iter().any(|e| e.w < 0.0)
    }

    /// Weighted adjacency lists.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for e in &self.edges {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
        }
        adj
    }

    /// Total weight of edges crossing the partition.
    pub fn cut_value(&self, x: &[bool]) -> f64 {
        self.edges
            .iter()
            .filter(|e| x[e.u] != x[e.v])
            .map(|e| e.w)
            .sum()
    }

    /// `C(x) = sum_{(i,j) in E} (2 x_i x_j - x_i - x_j) w_ij`, i.e. the negated cut.
    pub fn to_qubo(&self) -> BinaryPolynomial {
        let mut poly = BinaryPolynomial::new(self.num_nodes);
        for e in &self.edges {
            // indices validated at construction
            poly.add_term(&[e.u, e.v], 2.0 * e.w).expect("valid edge");
            poly.add_term(&[e.u], -e.w).expect("valid edge");
            poly.add_term(&[e.v], -e.w).expect("valid edge");
        }
        poly
    }

    /// Content hash over node count and edge list (metadata excluded).
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_edge_list().as_bytes());
        hex::encode(&hasher.finalize()[..8])
    }

    /// Serializes to the `n m` / `u v w` format with 1-based node indices.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.num_nodes, self.edges.len());
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.u + 1, e.v + 1, e.w);
        }
        out
    }
}

/// Erdős–Rényi graph: each pair `u < v` (lexicographic order) is kept when a
/// uniform draw falls below `density`.
pub fn gen_erdos_renyi(
    n: usize,
    density: f64,
    weights: WeightLaw,
    seed: u64,
) -> Result<MaxCutInstance, InstanceError> {
    if n < 2 {
        return Err(InstanceError::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(InstanceError::InvalidParameter(format!(
            "density must lie in (0, 1], got {density}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < density {
                let w = match weights {
                    WeightLaw::Unit => 1.0,
                    WeightLaw::Uniform => rng.random::<f64>(),
                };
                edges.push(Edge { u, v, w });
            }
        }
    }
    let weight_code = match weights {
        WeightLaw::Unit => 0.0,
        WeightLaw::Uniform => 1.0,
    };
    MaxCutInstance::new(
        n,
        edges,
        InstanceMeta::generated(
            "erdos-renyi",
            &[("n", n as f64), ("density", density), ("uniform_weights", weight_code)],
            seed,
        ),
    )
}

/// Random `degree`-regular graph from the pairing (configuration) model,
/// rejecting pairings with loops or multi-edges. Unit weights.
pub fn gen_regular(n: usize, degree: usize, seed: u64) -> Result<MaxCutInstance, InstanceError> {
    if n <= degree {
        return Err(InstanceError::InvalidParameter(format!(
            "need n > degree, got n = {n}, degree = {degree}"
        )));
    }
    if (n * degree) % 2 != 0 {
        return Err(InstanceError::Parity { n, degree });
    }
    let mut rng = rng_from_seed(seed);
    let mut points: Vec<usize> = (0..n * degree).map(|p| p / degree).collect();
    'attempt: for _ in 0..MAX_PAIRING_ATTEMPTS {
        points.sort_unstable();
        points.shuffle(&mut rng);
        let mut seen = HashSet::with_capacity(points.len() / 2);
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
        }
        let mut edges: Vec<Edge> = seen.into_iter().map(|(u, v)| Edge { u, v, w: 1.0 }).collect();
        edges.sort_by_key(|e| (e.u, e.v));
        return MaxCutInstance::new(
            n,
            edges,
            InstanceMeta::generated("regular", &[("n", n as f64), ("degree", degree as f64)], seed),
        );
    }
    Err(InstanceError::PairingFailed {
        n,
        degree,
        attempts: MAX_PAIRING_ATTEMPTS,
    })
}

/// Parses the edge-list format: a header `n m`, then `m` lines `u v w` with
/// 1-based node indices. Blank lines are ignored.
pub fn parse_edge_list(text: &str) -> Result<MaxCutInstance, InstanceError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (header_line, header) = lines.next().ok_or(InstanceError::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [n, m] = fields[..] else {
        return Err(InstanceError::Parse {
            line: header_line,
            msg: format!("expected header `n m`, got {header:?}"),
        });
    };
    let parse_count = |s: &str| {
        s.parse::<usize>().map_err(|e| InstanceError::Parse {
            line: header_line,
            msg: format!("bad count {s:?}: {e}"),
        })
    };
    let (n, m) = (parse_count(n)?, parse_count(m)?);
    let mut edges = Vec::with_capacity(m);
    for (line, body) in lines {
        let fields: Vec<&str> = body.split_whitespace().collect();
        let [u, v, w] = fields[..] else {
            return Err(InstanceError::Parse {
                line,
                msg: format!("expected `u v w`, got {body:?}"),
            });
        };
        let node = |s: &str| -> Result<usize, InstanceError> {
            let idx = s.parse::<usize>().map_err(|e| InstanceError::Parse {
                line,
                msg: format!("bad node index {s:?}: {e}"),
            })?;
            if idx == 0 || idx > n {
                return Err(InstanceError::Parse {
                    line,
                    msg: format!("node index {idx} outside 1..={n}"),
                });
            }
            Ok(idx - 1)
        };
        let w = w.parse::<f64>().map_err(|e| InstanceError::Parse {
            line,
            msg: format!("bad weight {w:?}: {e}"),
        })?;
        edges.push(Edge {
            u: node(u)?,
            v: node(v)?,
            w,
        });
    }
    if edges.len() != m {
        return Err(InstanceError::Parse {
            line: header_line,
            msg: format!("header announces {m} edges, body has {}", edges.len()),
        });
    }
    MaxCutInstance::new(
        n,
        edges,
        InstanceMeta {
            generator: "edge-list".into(),
            ..Default::default()
        },
    )
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<MaxCutInstance, InstanceError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut inst = parse_edge_list(&text)?;
    inst.meta.source = Some(path.display().to_string());
    Ok(inst)
}

/// Complete graph on `k + 1` locations; location 0 is the fixed start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspInstance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<[f64; 2]>>,
    dist: Vec<Vec<f64>>,
    pub meta: InstanceMeta,
}

impl TspInstance {
    pub fn from_coords(coords: Vec<[f64; 2]>, meta: InstanceMeta) -> Result<Self, InstanceError> {
        if coords.len() < 3 {
            return Err(InstanceError::InvalidParameter(format!(
                "need at least 3 locations, got {}",
                coords.len()
            )));
        }
        let dist = coords
            .iter()
            .map(|a| {
                coords
                    .iter()
                    .map(|b| (a[0] - b[0]).hypot(a[1] - b[1]))
                    .collect()
            })
            .collect();
        Ok(TspInstance {
            coords: Some(coords),
            dist,
            meta,
        })
    }

    pub fn from_matrix(dist: Vec<Vec<f64>>, meta: InstanceMeta) -> Result<Self, InstanceError> {
        let n = dist.len();
        if n < 3 {
            return Err(InstanceError::InvalidParameter(format!(
                "need at least 3 locations, got {n}"
            )));
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(InstanceError::InvalidMatrix(format!("row {i} has {} entries", row.len())));
            }
            if row[i] != 0.0 {
                return Err(InstanceError::InvalidMatrix(format!("nonzero diagonal at {i}")));
            }
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 || d != dist[j][i] {
                    return Err(InstanceError::InvalidMatrix(format!(
                        "entry ({i}, {j}) must be finite, nonnegative and symmetric"
                    )));
                }
            }
        }
        Ok(TspInstance {
            coords: None,
            dist,
            meta,
        })
    }

    /// Number of locations `k + 1`.
    pub fn num_locations(&self) -> usize {
        self.dist.len()
    }

    /// Number of locations to order, `k`.
    pub fn k(&self) -> usize {
        self.dist.len() - 1
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn max_distance(&self) -> f64 {
        self.dist
            .iter()
            .flat_map(|r| r.iter().copied())
            .fold(0.0, f64::max)
    }

    /// Length of the tour `0 -> perm[0] -> ... -> perm[k-1] -> 0`, where
    /// `perm` orders the locations `1..=k`.
    pub fn tour_length(&self, perm: &[usize]) -> f64 {
        self.closed_walk_length(0, perm)
    }

    /// Length of `start -> rest[0] -> ... -> rest[last] -> start`.
    pub fn closed_walk_length(&self, start: usize, rest: &[usize]) -> f64 {
        let mut len = 0.0;
        let mut prev = start;
        for &loc in rest {
            len += self.dist[prev][loc];
            prev = loc;
        }
        len + self.dist[prev][start]
    }

    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for row in &self.dist {
            for d in row {
                hasher.update(d.to_le_bytes());
            }
        }
        hex::encode(&hasher.finalize()[..8])
    }
}

/// Locations on the unit circle at angles `2πi/(k+1)`, each displaced in a
/// uniform random direction by a uniform distance in `[0, σ·2π/(k+1)]`.
/// Per location the direction is drawn before the distance.
pub fn gen_tsp_circular(k_plus_1: usize, sigma: f64, seed: u64) -> Result<TspInstance, InstanceError> {
    if k_plus_1 < 3 {
        return Err(InstanceError::InvalidParameter(format!(
            "need at least 3 locations, got {k_plus_1}"
        )));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(InstanceError::InvalidParameter(format!("sigma must be >= 0, got {sigma}")));
    }
    let mut rng = rng_from_seed(seed);
    let tau = std::f64::consts::TAU;
    let spacing = tau / k_plus_1 as f64;
    let coords = (0..k_plus_1)
        .map(|i| {
            let angle = spacing * i as f64;
            let direction = rng.random::<f64>() * tau;
            let radius = rng.random::<f64>() * sigma * spacing;
            [
                angle.cos() + radius * direction.cos(),
                angle.sin() + radius * direction.sin(),
            ]
        })
        .collect();
    TspInstance::from_coords(
        coords,
        InstanceMeta::generated("tsp-circular", &[("locations", k_plus_1 as f64), ("sigma", sigma)], seed),
    )
}

/// Locations i.i.d. uniform on the unit square (x drawn before y).
pub fn gen_tsp_planar(k_plus_1: usize, seed: u64) -> Result<TspInstance, InstanceError> {
    if k_plus_1 < 3 {
        return Err(InstanceError::InvalidParameter(format!(
            "need at least 3 locations, got {k_plus_1}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let coords = (0..k_plus_1)
        .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
        .collect();
    TspInstance::from_coords(
        coords,
        InstanceMeta::generated("tsp-planar", &[("locations", k_plus_1 as f64)], seed),
    )
}

/// Keeps an instance only if nearest-neighbour fails from every start,
/// i.e. each greedy tour is longer than `optimal_length + 1e-9`.
pub fn nn_filter(inst: &TspInstance, optimal_length: f64) -> bool {
    (0..inst.num_locations()).all(|start| {
        let tour = nearest_neighbor_tsp(inst, start).expect("start in range");
        tour.length > optimal_length + LENGTH_TOL
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::tsp::tsp_exhaustive;

    #[test]
    fn complete_graph_at_full_density() {
        let g = gen_erdos_renyi(5, 1.0, WeightLaw::Unit, 3).unwrap();
        assert_eq!(g.num_edges(), 10);
    }

    #[test]
    fn erdos_renyi_is_deterministic() {
        let a = gen_erdos_renyi(10, 0.5, WeightLaw::Uniform, 11).unwrap();
        let b = gen_erdos_renyi(10, 0.5, WeightLaw::Uniform, 11).unwrap();
        assert_eq!(a, b);
        let c = gen_erdos_renyi(10, 0.5, WeightLaw::Uniform, 12).unwrap();
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn erdos_renyi_edge_count_within_binomial_band() {
        // Binomial(190, 0.25): mean 47.5, sd sqrt(35.625)
        let sd = (190.0f64 * 0.25 * 0.75).sqrt();
        for seed in 0..20 {
            let g = gen_erdos_renyi(20, 0.25, WeightLaw::Unit, seed).unwrap();
            assert!((g.num_edges() as f64 - 47.5).abs() <= 4.0 * sd, "seed {seed}");
        }
    }

    #[test]
    fn erdos_renyi_rejects_bad_density() {
        assert!(gen_erdos_renyi(5, 0.0, WeightLaw::Unit, 0).is_err());
        assert!(gen_erdos_renyi(5, 1.5, WeightLaw::Unit, 0).is_err());
        assert!(gen_erdos_renyi(1, 0.5, WeightLaw::Unit, 0).is_err());
    }

    #[test]
    fn regular_on_four_nodes_is_k4() {
        let g = gen_regular(4, 3, 9).unwrap();
        assert_eq!(g.num_edges(), 6);
    }

    #[test]
    fn regular_degrees_are_exact() {
        for n in [10, 12, 14, 20, 60] {
            let g = gen_regular(n, 3, n as u64).unwrap();
            assert!(g.degrees().iter().all(|&d| d == 3));
        }
    }

    #[test]
    fn regular_parity_error() {
        assert!(matches!(gen_regular(11, 3, 0), Err(InstanceError::Parity { .. })));
        assert!(gen_regular(3, 3, 0).is_err());
    }

    #[test]
    fn circular_square_geometry() {
        let t = gen_tsp_circular(4, 0.0, 1).unwrap();
        assert!((t.d(0, 1) - 2f64.sqrt()).abs() < 1e-12);
        assert!((t.d(0, 2) - 2.0).abs() < 1e-12);
        let again = gen_tsp_circular(4, 0.0, 1).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn circular_polygon_optimum_is_perimeter() {
        let t = gen_tsp_circular(6, 0.0, 5).unwrap();
        let opt = tsp_exhaustive(&t, 10).unwrap();
        let side = 2.0 * (std::f64::consts::PI / 6.0).sin();
        assert!((opt.best_length - 6.0 * side).abs() < 1e-9);
        assert!(!nn_filter(&t, opt.best_length));
    }

    #[test]
    fn circular_displacement_is_bounded() {
        let sigma = 1.4;
        let t = gen_tsp_circular(7, sigma, 2).unwrap();
        let spacing = std::f64::consts::TAU / 7.0;
        for (i, c) in t.coords().unwrap().iter().enumerate() {
            let a = spacing * i as f64;
            let r = (c[0] - a.cos()).hypot(c[1] - a.sin());
            assert!(r <= sigma * spacing + 1e-12);
        }
    }

    #[test]
    fn planar_distances_bounded_and_symmetric() {
        let t = gen_tsp_planar(8, 4).unwrap();
        for i in 0..8 {
            assert_eq!(t.d(i, i), 0.0);
            for j in 0..8 {
                assert!(t.d(i, j) <= 2f64.sqrt());
                assert_eq!(t.d(i, j), t.d(j, i));
            }
        }
        assert_eq!(t, gen_tsp_planar(8, 4).unwrap());
    }

    #[test]
    fn triangle_inequality_holds() {
        for seed in 0..5 {
            let t = gen_tsp_circular(6, 1.0, seed).unwrap();
            for i in 0..6 {
                for j in 0..6 {
                    for k in 0..6 {
                        assert!(t.d(i, k) <= t.d(i, j) + t.d(j, k) + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn nn_filter_rejects_when_nn_from_zero_is_optimal() {
        let t = gen_tsp_planar(4, 0).unwrap();
        let nn0 = nearest_neighbor_tsp(&t, 0).unwrap();
        assert!(!nn_filter(&t, nn0.length));
    }

    #[test]
    fn nn_filter_finds_hard_five_location_instance() {
        // rejection sampling against the exhaustive oracle
        let mut found = false;
        for seed in 0..2000 {
            let t = gen_tsp_planar(5, seed).unwrap();
            let opt = tsp_exhaustive(&t, 10).unwrap();
            if nn_filter(&t, opt.best_length) {
                for start in 0..5 {
                    assert!(nearest_neighbor_tsp(&t, start).unwrap().length > opt.best_length + 1e-9);
                }
                found = true;
                break;
            }
        }
        assert!(found, "no 5-location instance fails nearest neighbour from all starts");
    }

    #[test]
    fn parse_simple_edge_list() {
        let g = parse_edge_list("3 2\n1 2 1.0\n2 3 -1.5\n").unwrap();
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.edges(), &[Edge { u: 0, v: 1, w: 1.0 }, Edge { u: 1, v: 2, w: -1.5 }]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_edge_list("3 3\n1 2 1.0\n2 3 1.0\n"), Err(InstanceError::Parse { .. })));
        assert!(matches!(parse_edge_list(""), Err(InstanceError::Parse { .. })));
        assert!(matches!(parse_edge_list("3 1\n1 4 1.0\n"), Err(InstanceError::Parse { .. })));
        assert!(matches!(parse_edge_list("3 1\n0 2 1.0\n"), Err(InstanceError::Parse { .. })));
        assert!(matches!(parse_edge_list("3 1\n1 2\n"), Err(InstanceError::Parse { .. })));
        assert!(matches!(parse_edge_list("3 1\n1 1 2.0\n"), Err(InstanceError::InvalidGraph(_))));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = gen_erdos_renyi(9, 0.6, WeightLaw::Uniform, 77).unwrap();
        let back = parse_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(back.edges(), g.edges());
        assert_eq!(back.content_hash(), g.content_hash());
    }

    #[test]
    fn read_edge_list_records_source() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        std::fs::write(&path, "2 1\n1 2 3.5\n").unwrap();
        let g = read_edge_list(&path).unwrap();
        assert_eq!(g.meta.source.as_deref(), Some(path.display().to_string().as_str()));
        assert_eq!(g.cut_value(&[true, false]), 3.5);
    }

    #[test]
    fn qubo_is_negated_cut() {
        let g = gen_erdos_renyi(7, 0.7, WeightLaw::Uniform, 1).unwrap();
        let q = g.to_qubo();
        for idx in 0..128u64 {
            let x = crate::model::Bitstring::from_index(idx, 7);
            let c = q.evaluate_bits(&x).unwrap();
            assert!((c + g.cut_value(x.bits())).abs() < 1e-12);
        }
    }
}
