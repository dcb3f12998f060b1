//! TSP cost functions for the one-hot, binary-integer and permutation
//! encodings.
//!
//! One-hot: variable `x_{i,t}` (location `i` in `1..=k` at slot `t` in
//! `0..k`) is qubit `t·k + (i - 1)`. Binary-integer: slot `t` holds
//! `b = ceil(log2 k)` bits at qubits `t·b .. t·b + b`, least significant first;
//! value `v < k` names location `v + 1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::instances::TspInstance;
use crate::model::{BinaryPolynomial, ModelError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TspPenalties {
    /// Weight of the tour length.
    pub a: f64,
    /// Weight of each constraint violation.
    pub b: f64,
}

impl TspPenalties {
    /// `B = 1`, `A = 1 / (1 + max d)`.
    pub fn for_instance(inst: &TspInstance) -> Self {
        TspPenalties { a: 1.0 / (1.0 + inst.max_distance()), b: 1.0 }
    }
}

pub fn ceil_log2(k: usize) -> usize {
    if k <= 1 {
        0
    } else {
        (usize::BITS - (k - 1).leading_zeros()) as usize
    }
}

pub fn onehot_qubit(k: usize, location: usize, slot: usize) -> usize {
    slot * k + (location - 1)
}

/// One-hot QUBO with length terms and squared slot and location constraints.
pub fn tsp_qubo(inst: &TspInstance, pen: TspPenalties) -> Result<BinaryPolynomial, ModelError> {
    let k = inst.k();
    let mut q = BinaryPolynomial::new(k * k);
    let TspPenalties { a, b } = pen;
    for i in 1..=k {
        q.add_term(&[onehot_qubit(k, i, 0)], a * inst.d(0, i))?;
        q.add_term(&[onehot_qubit(k, i, k - 1)], a * inst.d(i, 0))?;
    }
    for i in 1..=k {
        for j in 1..=k {
            if i == j {
                continue;
            }
            for t in 0..k.saturating_sub(1) {
                q.add_term(&[onehot_qubit(k, i, t), onehot_qubit(k, j, t + 1)], a * inst.d(i, j))?;
            }
        }
    }
    // B (1 - sum x)^2 = B - B sum x + 2B sum_{a<b} x_a x_b over each group
    let mut group = |vars: Vec<usize>| -> Result<(), ModelError> {
        q.add_constant(b)?;
        for (n, &u) in vars.iter().enumerate() {
            q.add_term(&[u], -b)?;
            for &v in &vars[n + 1..] {
                q.add_term(&[u, v], 2.0 * b)?;
            }
        }
        Ok(())
    };
    for t in 0..k {
        group((1..=k).map(|i| onehot_qubit(k, i, t)).collect())?;
    }
    for i in 1..=k {
        group((0..k).map(|t| onehot_qubit(k, i, t)).collect())?;
    }
    Ok(q)
}

/// Permutation of `1..=k` if the bits form a permutation matrix.
pub fn decode_onehot(bits: &[bool], k: usize) -> Option<Vec<usize>> {
    let mut used = vec![false; k + 1];
    let mut perm = Vec::with_capacity(k);
    for t in 0..k {
        let block = &bits[t * k..(t + 1) * k];
        let mut hot = block.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i + 1);
        let loc = hot.next()?;
        if hot.next().is_some() || used[loc] {
            return None;
        }
        used[loc] = true;
        perm.push(loc);
    }
    Some(perm)
}

/// Slot values of a binary-integer basis index.
pub fn hobo_decode(index: u64, k: usize) -> Vec<usize> {
    let b = ceil_log2(k);
    let mask = (1u64 << b) - 1;
    (0..k).map(|t| ((index >> (t * b)) & mask) as usize).collect()
}

/// Tour as locations `1..=k` if every slot is in range and distinct.
pub fn slots_to_tour(values: &[usize], k: usize) -> Option<Vec<usize>> {
    let mut used = vec![false; k];
    for &v in values {
        if v >= k || used[v] {
            return None;
        }
        used[v] = true;
    }
    Some(values.iter().map(|v| v + 1).collect())
}

/// `A · length + B · (range violations + repeated slot pairs)`. Length legs
/// touching an out-of-range slot are dropped.
pub fn hobo_cost(values: &[usize], inst: &TspInstance, pen: TspPenalties) -> f64 {
    let k = inst.k();
    let valid = |v: usize| v < k;
    let mut length = 0.0;
    if valid(values[0]) {
        length += inst.d(0, values[0] + 1);
    }
    for t in 0..k - 1 {
        if valid(values[t]) && valid(values[t + 1]) {
            length += inst.d(values[t] + 1, values[t + 1] + 1);
        }
    }
    if valid(values[k - 1]) {
        length += inst.d(values[k - 1] + 1, 0);
    }
    let mut violations = values.iter().filter(|&&v| !valid(v)).count();
    for t in 0..k {
        for u in t + 1..k {
            if valid(values[t]) && values[t] == values[u] {
                violations += 1;
            }
        }
    }
    pen.a * length + pen.b * violations as f64
}

type Expansion = BTreeMap<Vec<usize>, f64>;

/// Multilinear expansion of `[slot t holds v]`.
fn indicator(t: usize, v: usize, b: usize) -> Expansion {
    let mut out: Expansion = BTreeMap::from([(Vec::new(), 1.0)]);
    for r in 0..b {
        let q = t * b + r;
        let mut next = Expansion::new();
        for (vars, c) in out {
            let mut with = vars.clone();
            with.push(q);
            if (v >> r) & 1 == 1 {
                *next.entry(with).or_default() += c;
            } else {
                *next.entry(vars).or_default() += c;
                *next.entry(with).or_default() -= c;
            }
        }
        out = next;
    }
    out
}

fn product(x: &Expansion, y: &Expansion) -> Expansion {
    let mut out = Expansion::new();
    for (vx, cx) in x {
        for (vy, cy) in y {
            let mut vars: Vec<usize> = vx.iter().chain(vy).copied().collect();
            vars.sort_unstable();
            vars.dedup();
            *out.entry(vars).or_default() += cx * cy;
        }
    }
    out
}

fn add_scaled(poly: &mut BinaryPolynomial, e: &Expansion, scale: f64) -> Result<(), ModelError> {
    for (vars, c) in e {
        poly.add_term(vars, scale * c)?;
    }
    Ok(())
}

/// Higher-order polynomial whose value equals [`hobo_cost`] on every basis
/// state.
pub fn hobo_polynomial(inst: &TspInstance, pen: TspPenalties) -> Result<BinaryPolynomial, ModelError> {
    let k = inst.k();
    let b = ceil_log2(k);
    let values = 1usize << b;
    let mut poly = BinaryPolynomial::new(k * b);
    let ind: Vec<Vec<Expansion>> = (0..k).map(|t| (0..values).map(|v| indicator(t, v, b)).collect()).collect();
    for v in 0..k {
        add_scaled(&mut poly, &ind[0][v], pen.a * inst.d(0, v + 1))?;
        add_scaled(&mut poly, &ind[k - 1][v], pen.a * inst.d(v + 1, 0))?;
    }
    for t in 0..k - 1 {
        for u in 0..k {
            for v in 0..k {
                if u != v {
                    add_scaled(&mut poly, &product(&ind[t][u], &ind[t + 1][v]), pen.a * inst.d(u + 1, v + 1))?;
                }
            }
        }
    }
    for slot in &ind {
        for e in &slot[k..] {
            add_scaled(&mut poly, e, pen.b)?;
        }
    }
    for t in 0..k {
        for u in t + 1..k {
            for v in 0..k {
                add_scaled(&mut poly, &product(&ind[t][v], &ind[u][v]), pen.b)?;
            }
        }
    }
    Ok(poly)
}

/// Permutations of `1..=k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (1..=k).collect();
    let mut out = vec![perm.clone()];
    while crate::solvers::tsp::next_permutation(&mut perm) {
        out.push(perm.clone());
    }
    out
}
