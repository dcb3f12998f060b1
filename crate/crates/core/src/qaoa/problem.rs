//! Prepared QAOA problems: a diagonal cost over a basis, a mixer, and the
//! data needed to turn an output state into metrics.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sim;
use super::tsp::{
    ceil_log2, hobo_cost, hobo_decode, onehot_qubit, permutations, slots_to_tour, tsp_qubo, TspPenalties,
};
use super::QaoaError;
use crate::instances::{TspInstance, LENGTH_TOL};
use crate::metrics::{self, MetricError, COST_TOL};
use crate::model::{BinaryPolynomial, Bitstring, DEFAULT_EXHAUSTIVE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    /// Penalty QUBO (or any polynomial) with the transverse-field mixer.
    Qubo,
    /// Binary-integer slots with the transverse-field mixer.
    Hobo,
    /// One-hot slots with the XY mixer.
    Xy,
    /// Permutation basis with the Grover mixer.
    Perm,
}

impl Encoding {
    pub const ALL: [Encoding; 4] = [Encoding::Qubo, Encoding::Hobo, Encoding::Xy, Encoding::Perm];

    pub fn name(self) -> &'static str {
        match self {
            Encoding::Qubo => "qubo",
            Encoding::Hobo => "hobo",
            Encoding::Xy => "xy",
            Encoding::Perm => "perm",
        }
    }
}

impl std::str::FromStr for Encoding {
    type Err = QaoaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Encoding::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| QaoaError::Unknown(format!("encoding {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Basis {
    /// All `2^n` computational basis states.
    Full { qubits: usize },
    /// `k^k` product of one-hot blocks.
    OneHot { k: usize },
    /// `k!` permutations in lexicographic order.
    Permutation { k: usize },
}

impl Basis {
    pub fn dim(&self) -> usize {
        match *self {
            Basis::Full { qubits } => 1 << qubits,
            Basis::OneHot { k } => k.pow(k as u32),
            Basis::Permutation { k } => (1..=k).product(),
        }
    }
}

/// Simulator size limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QaoaCaps {
    pub max_qubits: usize,
    pub max_onehot_dim: usize,
    pub max_perm_k: usize,
}

impl Default for QaoaCaps {
    fn default() -> Self {
        QaoaCaps { max_qubits: DEFAULT_EXHAUSTIVE_CAP, max_onehot_dim: 6usize.pow(6), max_perm_k: 9 }
    }
}

/// Reference data for TSP problems, indexed like the basis.
#[derive(Debug, Clone)]
pub struct TspTables {
    /// Tour length of each basis state, NaN when it is not a valid tour.
    pub lengths: Arc<Vec<f64>>,
    pub optimal_length: f64,
    pub worst_length: f64,
}

#[derive(Debug, Clone)]
pub struct QaoaProblem {
    pub encoding: Encoding,
    pub basis: Basis,
    costs: Arc<Vec<f64>>,
    /// Cost the approximation ratio is normalised by.
    pub reference_cost: f64,
    success: Arc<Vec<bool>>,
    /// States inside the encoding's constraint space; `None` means all.
    valid: Option<Arc<Vec<bool>>>,
    pub tsp: Option<TspTables>,
}

fn cap_err(what: &str, size: usize, cap: usize) -> QaoaError {
    QaoaError::TooLarge { what: what.to_string(), size, cap }
}

impl QaoaProblem {
    /// Transverse-field QAOA on a polynomial of any degree; successes are
    /// the states attaining the exhaustive minimum.
    pub fn from_polynomial(poly: &BinaryPolynomial, caps: &QaoaCaps) -> Result<Self, QaoaError> {
        let n = poly.num_vars();
        if n > caps.max_qubits {
            return Err(cap_err("qubits", n, caps.max_qubits));
        }
        let costs = poly.indexed()?.cost_table();
        let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
        let success = costs.iter().map(|&c| c <= min + COST_TOL).collect();
        Ok(QaoaProblem {
            encoding: Encoding::Qubo,
            basis: Basis::Full { qubits: n },
            costs: Arc::new(costs),
            reference_cost: min,
            success: Arc::new(success),
            valid: None,
            tsp: None,
        })
    }

    pub fn tsp(inst: &TspInstance, encoding: Encoding, pen: TspPenalties, caps: &QaoaCaps) -> Result<Self, QaoaError> {
        let k = inst.k();
        if k < 2 {
            return Err(QaoaError::Unknown(format!("TSP encodings need k >= 2, got {k}")));
        }
        let (basis, costs, lengths, valid) = match encoding {
            Encoding::Qubo => {
                let n = k * k;
                if n > caps.max_qubits {
                    return Err(cap_err("qubits", n, caps.max_qubits));
                }
                let costs = tsp_qubo(inst, pen)?.indexed()?.cost_table();
                let lengths: Vec<f64> = (0..1u64 << n)
                    .into_par_iter()
                    .map(|idx| onehot_tour(idx, k).map_or(f64::NAN, |t| inst.tour_length(&t)))
                    .collect();
                let valid = lengths.iter().map(|l| !l.is_nan()).collect();
                (Basis::Full { qubits: n }, costs, lengths, Some(valid))
            }
            Encoding::Hobo => {
                let n = k * ceil_log2(k);
                if n > caps.max_qubits {
                    return Err(cap_err("qubits", n, caps.max_qubits));
                }
                let (costs, lengths): (Vec<f64>, Vec<f64>) = (0..1u64 << n)
                    .into_par_iter()
                    .map(|idx| {
                        let values = hobo_decode(idx, k);
                        let len = slots_to_tour(&values, k).map_or(f64::NAN, |t| inst.tour_length(&t));
                        (hobo_cost(&values, inst, pen), len)
                    })
                    .unzip();
                let valid = lengths.iter().map(|l| !l.is_nan()).collect();
                (Basis::Full { qubits: n }, costs, lengths, Some(valid))
            }
            Encoding::Xy => {
                let dim = k.checked_pow(k as u32).unwrap_or(usize::MAX);
                if dim > caps.max_onehot_dim {
                    return Err(cap_err("one-hot dimension", dim, caps.max_onehot_dim));
                }
                let qubo = tsp_qubo(inst, pen)?;
                let (costs, lengths): (Vec<f64>, Vec<f64>) = (0..dim)
                    .into_par_iter()
                    .map(|s| {
                        let bits = xy_embed(s, k);
                        let cost = qubo.evaluate(bits.bits()).expect("dimension matches");
                        let values = xy_digits(s, k);
                        let len = slots_to_tour(&values, k).map_or(f64::NAN, |t| inst.tour_length(&t));
                        (cost, len)
                    })
                    .unzip();
                (Basis::OneHot { k }, costs, lengths, None)
            }
            Encoding::Perm => {
                if k > caps.max_perm_k {
                    return Err(cap_err("permutation k", k, caps.max_perm_k));
                }
                let lengths: Vec<f64> = permutations(k).iter().map(|p| inst.tour_length(p)).collect();
                let costs = lengths.iter().map(|l| pen.a * l).collect();
                (Basis::Permutation { k }, costs, lengths, None)
            }
        };
        let finite = lengths.iter().copied().filter(|l| !l.is_nan());
        let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), l| (lo.min(l), hi.max(l)));
        let success = lengths.iter().map(|&l| !l.is_nan() && l <= lo + LENGTH_TOL).collect();
        Ok(QaoaProblem {
            encoding,
            basis,
            costs: Arc::new(costs),
            reference_cost: pen.a * lo,
            success: Arc::new(success),
            valid: valid.map(Arc::new),
            tsp: Some(TspTables { lengths: Arc::new(lengths), optimal_length: lo, worst_length: hi }),
        })
    }

    pub fn dim(&self) -> usize {
        self.costs.len()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn success_mask(&self) -> &[bool] {
        &self.success
    }

    /// Initial state: uniform over the basis (W-state product for one-hot,
    /// uniform permutation state for the Grover mixer).
    pub fn initial_state(&self) -> Vec<num_complex::Complex64> {
        sim::uniform_state(self.dim())
    }

    fn apply_mixer(&self, state: &mut [num_complex::Complex64], beta: f64) {
        match self.basis {
            Basis::Full { qubits } => sim::apply_transverse(state, qubits, beta),
            Basis::OneHot { k } => sim::apply_xy_subspace(state, k, beta),
            Basis::Permutation { .. } => sim::apply_grover(state, beta),
        }
    }

    /// Runs the circuit `U_M(β_p) U_C(γ_p) … U_M(β_1) U_C(γ_1)` on the
    /// initial state.
    pub fn simulate(&self, beta: &[f64], gamma: &[f64]) -> Result<OutputDistribution, QaoaError> {
        if beta.len() != gamma.len() {
            return Err(QaoaError::ParameterLength { beta: beta.len(), gamma: gamma.len() });
        }
        if beta.is_empty() {
            return Err(QaoaError::ZeroDepth);
        }
        let mut state = self.initial_state();
        for (&b, &g) in beta.iter().zip(gamma) {
            sim::apply_phase(&mut state, &self.costs, g);
            self.apply_mixer(&mut state, b);
        }
        Ok(self.distribution(sim::probabilities(&state)))
    }

    /// Wraps externally computed probabilities over this problem's basis.
    pub fn distribution(&self, probabilities: Vec<f64>) -> OutputDistribution {
        let p_star = probabilities.iter().zip(self.success.iter()).filter(|(_, &s)| s).map(|(p, _)| p).sum();
        OutputDistribution { problem: self.clone(), probabilities, p_star }
    }

    /// Tour encoded by a basis state, if it is a valid tour.
    pub fn decode_tour(&self, index: usize) -> Option<Vec<usize>> {
        match (self.encoding, self.basis) {
            (Encoding::Qubo, Basis::Full { qubits }) if self.tsp.is_some() => {
                let k = (qubits as f64).sqrt().round() as usize;
                onehot_tour(index as u64, k)
            }
            (Encoding::Hobo, Basis::Full { qubits }) => {
                let k = self.k_from_hobo(qubits);
                slots_to_tour(&hobo_decode(index as u64, k), k)
            }
            (_, Basis::OneHot { k }) => slots_to_tour(&xy_digits(index, k), k),
            (_, Basis::Permutation { k }) => Some(unrank_permutation(index, k)),
            _ => None,
        }
    }

    fn k_from_hobo(&self, qubits: usize) -> usize {
        (2..=qubits).find(|&k| k * ceil_log2(k) == qubits).unwrap_or(qubits)
    }
}

fn onehot_tour(index: u64, k: usize) -> Option<Vec<usize>> {
    let bits = Bitstring::from_index(index, k * k);
    super::tsp::decode_onehot(bits.bits(), k)
}

/// Hot positions `a_t` of a one-hot subspace index `Σ a_t k^t`.
pub fn xy_digits(mut index: usize, k: usize) -> Vec<usize> {
    (0..k)
        .map(|_| {
            let d = index % k;
            index /= k;
            d
        })
        .collect()
}

/// Full `k²`-qubit bitstring of a one-hot subspace index.
pub fn xy_embed(index: usize, k: usize) -> Bitstring {
    let mut bits = vec![false; k * k];
    for (t, a) in xy_digits(index, k).into_iter().enumerate() {
        bits[onehot_qubit(k, a + 1, t)] = true;
    }
    Bitstring::from_bits(bits)
}

/// Lexicographic rank `index` permutation of `1..=k`.
pub fn unrank_permutation(mut index: usize, k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (1..=k).collect();
    let mut fact: usize = (1..k).product::<usize>().max(1);
    let mut out = Vec::with_capacity(k);
    for remaining in (1..=k).rev() {
        let pos = index / fact;
        index %= fact;
        out.push(pool.remove(pos));
        if remaining > 1 {
            fact /= remaining - 1;
        }
    }
    out
}

/// Exact measurement distribution of a QAOA state.
#[derive(Debug, Clone)]
pub struct OutputDistribution {
    pub problem: QaoaProblem,
    pub probabilities: Vec<f64>,
    /// Probability mass on optimal solutions.
    pub p_star: f64,
}

impl OutputDistribution {
    pub fn basis(&self) -> Basis {
        self.problem.basis
    }

    pub fn total_probability(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn expected_cost(&self) -> f64 {
        self.probabilities.iter().zip(self.problem.costs.iter()).map(|(p, c)| p * c).sum()
    }

    pub fn approximation_ratio(&self) -> Result<f64, MetricError> {
        metrics::ratio(self.expected_cost(), self.problem.reference_cost)
    }

    /// Mass inside the encoding's constraint space (one-hot or permutation
    /// validity for the penalty encodings; 1 by construction for XY and
    /// permutation bases).
    /// Normalised by the total mass, so rounding in the state norm cancels.
    pub fn feasibility_ratio(&self) -> f64 {
        let total = self.total_probability();
        let feasible: f64 = match &self.problem.valid {
            None => total,
            Some(v) => self.probabilities.iter().zip(v.iter()).filter(|(_, &ok)| ok).map(|(p, _)| p).sum(),
        };
        feasible / total
    }

    /// Mass on basis states that decode to a valid tour.
    pub fn tour_validity(&self) -> Option<f64> {
        let t = self.problem.tsp.as_ref()?;
        Some(self.probabilities.iter().zip(t.lengths.iter()).filter(|(_, l)| !l.is_nan()).map(|(p, _)| p).sum())
    }

    /// Combined TSP error with invalid tours counted at the worst length.
    pub fn tsp_combined_error(&self) -> Result<f64, MetricError> {
        let t = self.problem.tsp.as_ref().ok_or(MetricError::Empty)?;
        let outcomes = self
            .probabilities
            .iter()
            .zip(t.lengths.iter())
            .map(|(&p, &l)| (p, if l.is_nan() { None } else { Some(l) }));
        metrics::tsp_combined_error(outcomes, t.optimal_length, t.worst_length)
    }

    /// Largest deviation from the uniform distribution.
    pub fn max_uniform_deviation(&self) -> f64 {
        let u = 1.0 / self.probabilities.len() as f64;
        self.probabilities.iter().map(|p| (p - u).abs()).fold(0.0, f64::max)
    }

    /// Draws basis indices by inverse-CDF sampling.
    pub fn sample_indices(&self, draws: usize, rng: &mut impl Rng) -> Vec<usize> {
        let mut cdf = Vec::with_capacity(self.probabilities.len());
        let mut acc = 0.0;
        for p in &self.probabilities {
            acc += p;
            cdf.push(acc);
        }
        (0..draws)
            .map(|_| {
                let u = rng.random::<f64>() * acc;
                cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
            })
            .collect()
    }
}
