//! Binary optimization models shared by every solver.
//!
//! [`BinaryPolynomial`] is the canonical cost function: a sparse multilinear
//! polynomial over `{0,1}^n`. QUBOs are the degree-2 case, HOBO cost
//! functions use arbitrary degree. [`IsingModel`] is the spin form obtained
//! through `s_i = 1 - 2 x_i`, and [`QuadraticModel`] is an adjacency view used
//! by the local-search samplers for O(degree) flip updates.
//!
//! Bit order convention: variable 0 is the least significant bit of the
//! canonical integer encoding (`index = sum_i x_i 2^i`). The textual form of a
//! [`Bitstring`] lists `x_0` first.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Default cap on the number of variables for exhaustive enumeration.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 26;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },
    #[error("unsupported degree {degree}, at most {max} is allowed here")]
    UnsupportedDegree { degree: usize, max: usize },
    #[error("{num_vars} variables exceed the enumeration cap of {cap}")]
    TooLarge { num_vars: usize, cap: usize },
    #[error("coefficient {0} is not finite")]
    NonFinite(f64),
    #[error("invalid bitstring character {0:?}")]
    BadBitstring(char),
}

/// An assignment `x ∈ {0,1}^n`. Ordering is lexicographic over `x_0, x_1, ...`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bitstring(Vec<bool>);

impl Bitstring {
    pub fn zeros(n: usize) -> Self {
        Bitstring(vec![false; n])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Bitstring(bits)
    }

    /// Decodes the canonical integer encoding (bit `i` of `index` is `x_i`).
    pub fn from_index(index: u64, n: usize) -> Self {
        Bitstring((0..n).map(|i| i < 64 && (index >> i) & 1 == 1).collect())
    }

    /// Canonical integer encoding; `None` above 64 variables.
    pub fn to_index(&self) -> Option<u64> {
        if self.0.len() > 64 {
            return None;
        }
        Some(
            self.0
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i)),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    /// Bitwise complement; a Max-Cut partition and its complement have the same cut.
    pub fn complement(&self) -> Self {
        Bitstring(self.0.iter().map(|b| !b).collect())
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

impl From<Vec<bool>> for Bitstring {
    fn from(bits: Vec<bool>) -> Self {
        Bitstring(bits)
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitstring({self})")
    }
}

impl FromStr for Bitstring {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ModelError::BadBitstring(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Bitstring)
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Sparse multilinear polynomial over binary variables.
///
/// Terms are keyed by strictly increasing variable-index tuples; the empty
/// tuple holds the constant. `x_i^2 = x_i` is applied on insertion and exact
/// zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryPolynomial {
    num_vars: usize,
    terms: BTreeMap<Vec<usize>, f64>,
}

impl BinaryPolynomial {
    pub fn new(num_vars: usize) -> Self {
        BinaryPolynomial {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<'a, I>(num_vars: usize, terms: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (&'a [usize], f64)>,
    {
        let mut poly = BinaryPolynomial::new(num_vars);
        for (vars, coeff) in terms {
            poly.add_term(vars, coeff)?;
        }
        Ok(poly)
    }

    /// Adds `coeff * prod_{i in vars} x_i`, accumulating into an existing term.
    pub fn add_term(&mut self, vars: &[usize], coeff: f64) -> Result<(), ModelError> {
        if !coeff.is_finite() {
            return Err(ModelError::NonFinite(coeff));
        }
        if let Some(&index) = vars.iter().find(|&&i| i >= self.num_vars) {
            return Err(ModelError::IndexOutOfRange {
                index,
                num_vars: self.num_vars,
            });
        }
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        match self.terms.entry(key) {
            Entry::Vacant(slot) => {
                if coeff != 0.0 {
                    slot.insert(coeff);
                }
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if *slot.get() == 0.0 {
                    slot.remove();
                }
            }
        }
        Ok(())
    }

    pub fn add_constant(&mut self, c: f64) -> Result<(), ModelError> {
        self.add_term(&[], c)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.terms.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn coefficient(&self, vars: &[usize]) -> f64 {
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        self.terms.get(&key).copied().unwrap_or(0.0)
    }

    pub fn constant(&self) -> f64 {
        self.coefficient(&[])
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Cost of assignment `x`.
    pub fn evaluate(&self, x: &[bool]) -> Result<f64, ModelError> {
        if x.len() != self.num_vars {
            return Err(ModelError::DimensionMismatch {
                expected: self.num_vars,
                got: x.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .filter(|(vars, _)| vars.iter().all(|&i| x[i]))
            .map(|(_, &c)| c)
            .sum())
    }

    pub fn evaluate_bits(&self, x: &Bitstring) -> Result<f64, ModelError> {
        self.evaluate(x.bits())
    }

    /// Applies a relabeling: variable `i` becomes `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self, ModelError> {
        if perm.len() != self.num_vars {
            return Err(ModelError::DimensionMismatch {
                expected: self.num_vars,
                got: perm.len(),
            });
        }
        let mut out = BinaryPolynomial::new(self.num_vars);
        for (vars, c) in self.terms() {
            let mapped: Vec<usize> = vars.iter().map(|&i| perm[i]).collect();
            out.add_term(&mapped, c)?;
        }
        Ok(out)
    }

    /// Fast evaluator over the canonical integer encoding (at most 64 variables).
    pub fn indexed(&self) -> Result<IndexedPolynomial, ModelError> {
        if self.num_vars > 64 {
            return Err(ModelError::TooLarge {
                num_vars: self.num_vars,
                cap: 64,
            });
        }
        Ok(IndexedPolynomial {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(vars, &c)| (vars.iter().fold(0u64, |m, &i| m | (1 << i)), c))
                .collect(),
        })
    }

    /// Spin form under `s_i = 1 - 2 x_i`.
    pub fn to_ising(&self) -> Result<IsingModel, ModelError> {
        let degree = self.degree();
        if degree > 2 {
            return Err(ModelError::UnsupportedDegree { degree, max: 2 });
        }
        let mut ising = IsingModel::new(self.num_vars);
        for (vars, c) in self.terms() {
            match *vars {
                [] => ising.offset += c,
                [i] => {
                    // c x_i = c/2 - c/2 s_i
                    ising.offset += c / 2.0;
                    ising.h[i] -= c / 2.0;
                }
                [i, j] => {
                    // c x_i x_j = c/4 (1 - s_i - s_j + s_i s_j)
                    let q = c / 4.0;
                    ising.offset += q;
                    ising.h[i] -= q;
                    ising.h[j] -= q;
                    *ising.j.entry((i, j)).or_insert(0.0) += q;
                }
                _ => unreachable!(),
            }
        }
        ising.j.retain(|_, v| *v != 0.0);
        Ok(ising)
    }

    /// Adjacency view for single-flip local search (degree ≤ 2).
    pub fn to_quadratic(&self) -> Result<QuadraticModel, ModelError> {
        let degree = self.degree();
        if degree > 2 {
            return Err(ModelError::UnsupportedDegree { degree, max: 2 });
        }
        let mut model = QuadraticModel {
            offset: 0.0,
            linear: vec![0.0; self.num_vars],
            neighbors: vec![Vec::new(); self.num_vars],
        };
        for (vars, c) in self.terms() {
            match *vars {
                [] => model.offset += c,
                [i] => model.linear[i] += c,
                [i, j] => {
                    model.neighbors[i].push((j, c));
                    model.neighbors[j].push((i, c));
                }
                _ => unreachable!(),
            }
        }
        Ok(model)
    }
}

/// A [`BinaryPolynomial`] with each term stored as a bit mask, for evaluating
/// integer-encoded assignments. Terms are summed in the same order as
/// [`BinaryPolynomial::evaluate`], so both give bit-identical results.
#[derive(Debug, Clone)]
pub struct IndexedPolynomial {
    num_vars: usize,
    terms: Vec<(u64, f64)>,
}

impl IndexedPolynomial {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    #[inline]
    pub fn evaluate(&self, index: u64) -> f64 {
        self.terms
            .iter()
            .filter(|(mask, _)| index & mask == *mask)
            .map(|(_, c)| c)
            .sum()
    }

    /// All `2^n` costs indexed by the canonical encoding.
    pub fn cost_table(&self) -> Vec<f64> {
        let dim = 1u64 << self.num_vars;
        (0..dim).into_par_iter().map(|i| self.evaluate(i)).collect()
    }
}

/// Spin model `sum_i h_i s_i + sum_{i<j} J_ij s_i s_j + offset` over `s ∈ {-1,+1}^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub h: Vec<f64>,
    pub j: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingModel {
    pub fn new(num_spins: usize) -> Self {
        IsingModel {
            h: vec![0.0; num_spins],
            j: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn num_spins(&self) -> usize {
        self.h.len()
    }

    pub fn evaluate(&self, spins: &[i8]) -> Result<f64, ModelError> {
        if spins.len() != self.h.len() {
            return Err(ModelError::DimensionMismatch {
                expected: self.h.len(),
                got: spins.len(),
            });
        }
        let field: f64 = self
            .h
            .iter()
            .zip(spins)
            .map(|(h, &s)| h * f64::from(s))
            .sum();
        let coupling: f64 = self
            .j
            .iter()
            .map(|(&(a, b), j)| j * f64::from(spins[a]) * f64::from(spins[b]))
            .sum();
        Ok(self.offset + field + coupling)
    }

    /// Back to binary form with `x_i = (1 - s_i) / 2`.
    pub fn to_polynomial(&self) -> Result<BinaryPolynomial, ModelError> {
        let n = self.h.len();
        let mut poly = BinaryPolynomial::new(n);
        poly.add_constant(self.offset)?;
        for (i, &h) in self.h.iter().enumerate() {
            // h (1 - 2 x_i)
            poly.add_constant(h)?;
            poly.add_term(&[i], -2.0 * h)?;
        }
        for (&(a, b), &j) in &self.j {
            // j (1 - 2x_a)(1 - 2x_b)
            poly.add_constant(j)?;
            poly.add_term(&[a], -2.0 * j)?;
            poly.add_term(&[b], -2.0 * j)?;
            poly.add_term(&[a, b], 4.0 * j)?;
        }
        Ok(poly)
    }
}

/// Maps `x_i` to the spin `1 - 2 x_i`.
pub fn spins_from_bits(x: &[bool]) -> Vec<i8> {
    x.iter().map(|&b| if b { -1 } else { 1 }).collect()
}

/// Degree-2 model as linear terms plus a symmetric adjacency list.
#[derive(Debug, Clone)]
pub struct QuadraticModel {
    pub offset: f64,
    pub linear: Vec<f64>,
    pub neighbors: Vec<Vec<(usize, f64)>>,
}

impl QuadraticModel {
    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn energy(&self, x: &[bool]) -> f64 {
        let mut e = self.offset;
        for i in 0..x.len() {
            if !x[i] {
                continue;
            }
            e += self.linear[i];
            for &(j, q) in &self.neighbors[i] {
                if j > i && x[j] {
                    e += q;
                }
            }
        }
        e
    }

    /// Cost change from flipping variable `i`.
    #[inline]
    pub fn flip_delta(&self, x: &[bool], i: usize) -> f64 {
        let field: f64 = self.linear[i]
            + self.neighbors[i]
                .iter()
                .filter(|(j, _)| x[*j])
                .map(|(_, q)| q)
                .sum::<f64>();
        if x[i] {
            -field
        } else {
            field
        }
    }
}

/// Global minimum by enumeration of all `2^n` assignments.
///
/// Ties go to the lexicographically smallest bitstring (`x_0` compared first).
pub fn argmin_exhaustive(
    poly: &BinaryPolynomial,
    cap: usize,
) -> Result<(Bitstring, f64), ModelError> {
    let n = poly.num_vars();
    if n > cap.min(63) {
        return Err(ModelError::TooLarge { num_vars: n, cap });
    }
    let indexed = poly.indexed()?;
    let dim = 1u64 << n;
    let chunk = 1u64 << 12;
    let num_chunks = dim.div_ceil(chunk);
    let (best_index, best_cost) = (0..num_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * chunk;
            let hi = (lo + chunk).min(dim);
            let mut best = (lo, indexed.evaluate(lo));
            for i in lo + 1..hi {
                let cost = indexed.evaluate(i);
                if better(n, (i, cost), best) {
                    best = (i, cost);
                }
            }
            best
        })
        .reduce_with(|a, b| if better(n, b, a) { b } else { a })
        .unwrap_or((0, poly.constant()));
    Ok((Bitstring::from_index(best_index, n), best_cost))
}

fn better(n: usize, cand: (u64, f64), best: (u64, f64)) -> bool {
    if cand.1 != best.1 {
        return cand.1 < best.1;
    }
    lex_key(cand.0, n) < lex_key(best.0, n)
}

// x_0 is compared first, so the lexicographic key is the bit-reversed index.
fn lex_key(index: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        index.reverse_bits() >> (64 - n)
    }
}

/// Wall-clock split of a solver call, in seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub preprocess: f64,
    pub solve: f64,
    pub postprocess: f64,
}

impl Timing {
    pub fn total(&self) -> f64 {
        self.preprocess + self.solve + self.postprocess
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleEntry {
    pub count: u64,
    pub cost: f64,
}

/// Multiset of sampled bitstrings with their costs and the call's timing.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    num_vars: usize,
    samples: BTreeMap<Bitstring, SampleEntry>,
    pub timing: Timing,
}

impl SampleSet {
    pub fn new(num_vars: usize) -> Self {
        SampleSet {
            num_vars,
            samples: BTreeMap::new(),
            timing: Timing::default(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Records `count` draws of `bits`.
    pub fn add(&mut self, bits: Bitstring, cost: f64, count: u64) -> Result<(), ModelError> {
        if bits.len() != self.num_vars {
            return Err(ModelError::DimensionMismatch {
                expected: self.num_vars,
                got: bits.len(),
            });
        }
        if count == 0 {
            return Ok(());
        }
        self.samples
            .entry(bits)
            .and_modify(|e| e.count += count)
            .or_insert(SampleEntry { count, cost });
        Ok(())
    }

    pub fn push(&mut self, bits: Bitstring, cost: f64) -> Result<(), ModelError> {
        self.add(bits, cost, 1)
    }

    /// Total number of draws `M`.
    pub fn total_draws(&self) -> u64 {
        self.samples.values().map(|e| e.count).sum()
    }

    pub fn num_distinct(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Bitstring, &SampleEntry)> {
        self.samples.iter()
    }

    /// Lowest-cost sample; ties resolve to the lexicographically smallest bitstring.
    pub fn best(&self) -> Option<(&Bitstring, f64)> {
        self.samples
            .iter()
            .fold(None, |acc: Option<(&Bitstring, f64)>, (b, e)| match acc {
                Some((_, c)) if c <= e.cost => acc,
                _ => Some((b, e.cost)),
            })
    }

    pub fn best_cost(&self) -> Option<f64> {
        self.best().map(|(_, c)| c)
    }

    /// Count-weighted mean cost.
    pub fn mean_cost(&self) -> Option<f64> {
        let m = self.total_draws();
        if m == 0 {
            return None;
        }
        let sum: f64 = self.samples.values().map(|e| e.cost * e.count as f64).sum();
        Some(sum / m as f64)
    }

    /// Re-evaluates every stored cost against `poly`.
    pub fn verify_costs(&self, poly: &BinaryPolynomial, tol: f64) -> Result<bool, ModelError> {
        for (bits, e) in &self.samples {
            if (poly.evaluate_bits(bits)? - e.cost).abs() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Pools two sample sets: counts add, solve and postprocess times add,
    /// preprocessing is taken from `a` (it is computed once and cached).
    pub fn merge(a: &SampleSet, b: &SampleSet) -> Result<SampleSet, ModelError> {
        if a.num_vars != b.num_vars {
            return Err(ModelError::DimensionMismatch {
                expected: a.num_vars,
                got: b.num_vars,
            });
        }
        let mut out = a.clone();
        out.absorb(b)?;
        Ok(out)
    }

    /// In-place form of [`SampleSet::merge`].
    pub fn absorb(&mut self, other: &SampleSet) -> Result<(), ModelError> {
        if self.num_vars != other.num_vars {
            return Err(ModelError::DimensionMismatch {
                expected: self.num_vars,
                got: other.num_vars,
            });
        }
        for (bits, e) in &other.samples {
            self.add(bits.clone(), e.cost, e.count)?;
        }
        self.timing.solve += other.timing.solve;
        self.timing.postprocess += other.timing.postprocess;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.parse::<Bitstring>().unwrap().bits().to_vec()
    }

    fn triangle() -> BinaryPolynomial {
        // 2 x_i x_j - x_i - x_j per unit edge
        let mut p = BinaryPolynomial::new(3);
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            p.add_term(&[i, j], 2.0).unwrap();
            p.add_term(&[i], -1.0).unwrap();
            p.add_term(&[j], -1.0).unwrap();
        }
        p
    }

    #[test]
    fn evaluate_small_polynomial() {
        let p = BinaryPolynomial::from_terms(
            2,
            [(&[0usize, 1][..], 2.0), (&[0][..], -1.0), (&[1][..], -1.0)],
        )
        .unwrap();
        assert_eq!(p.evaluate(&bits("00")).unwrap(), 0.0);
        assert_eq!(p.evaluate(&bits("01")).unwrap(), -1.0);
        assert_eq!(p.evaluate(&bits("11")).unwrap(), 0.0);
    }

    #[test]
    fn evaluate_rejects_wrong_length() {
        let p = BinaryPolynomial::new(3);
        assert_eq!(
            p.evaluate(&[true]),
            Err(ModelError::DimensionMismatch {
                expected: 3,
                got: 1
            })
        );
    }

    #[test]
    fn triangle_cut_values() {
        let p = triangle();
        // every assignment: cost = -cut
        for idx in 0..8u64 {
            let x = Bitstring::from_index(idx, 3);
            let cut = [(0, 1), (1, 2), (0, 2)]
                .iter()
                .filter(|(i, j)| x.get(*i) != x.get(*j))
                .count();
            assert_eq!(p.evaluate_bits(&x).unwrap(), -(cut as f64));
        }
        assert_eq!(p.evaluate(&bits("011")).unwrap(), -2.0);
    }

    #[test]
    fn multilinear_reduction_and_zero_pruning() {
        let mut p = BinaryPolynomial::new(3);
        p.add_term(&[2, 0, 2], 1.5).unwrap();
        assert_eq!(p.coefficient(&[0, 2]), 1.5);
        p.add_term(&[0, 2], -1.5).unwrap();
        assert_eq!(p.num_terms(), 0);
        assert!(matches!(
            p.add_term(&[3], 1.0),
            Err(ModelError::IndexOutOfRange { index: 3, .. })
        ));
    }

    #[test]
    fn ising_of_zero_polynomial() {
        let ising = BinaryPolynomial::new(2).to_ising().unwrap();
        assert_eq!(ising.h, vec![0.0, 0.0]);
        assert!(ising.j.is_empty());
        assert_eq!(ising.offset, 0.0);
    }

    #[test]
    fn ising_of_single_quadratic_term() {
        let p = BinaryPolynomial::from_terms(2, [(&[0usize, 1][..], 4.0)]).unwrap();
        let ising = p.to_ising().unwrap();
        assert_eq!(ising.j[&(0, 1)], 1.0);
        assert_eq!(ising.h, vec![-1.0, -1.0]);
        assert_eq!(ising.offset, 1.0);
    }

    #[test]
    fn ising_of_single_maxcut_edge() {
        let p = BinaryPolynomial::from_terms(
            2,
            [(&[0usize, 1][..], 2.0), (&[0][..], -1.0), (&[1][..], -1.0)],
        )
        .unwrap();
        let ising = p.to_ising().unwrap();
        assert_eq!(ising.j[&(0, 1)], 0.5);
        assert_eq!(ising.h, vec![0.0, 0.0]);
        assert_eq!(ising.offset, -0.5);
    }

    #[test]
    fn ising_rejects_cubic() {
        let p = BinaryPolynomial::from_terms(3, [(&[0usize, 1, 2][..], 1.0)]).unwrap();
        assert_eq!(
            p.to_ising(),
            Err(ModelError::UnsupportedDegree { degree: 3, max: 2 })
        );
    }

    #[test]
    fn ising_round_trip() {
        let p = triangle();
        let back = p.to_ising().unwrap().to_polynomial().unwrap();
        for idx in 0..8 {
            let x = Bitstring::from_index(idx, 3);
            let a = p.evaluate_bits(&x).unwrap();
            let b = back.evaluate_bits(&x).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn argmin_constant_polynomial_ties_to_zeros() {
        let mut p = BinaryPolynomial::new(4);
        p.add_constant(3.5).unwrap();
        let (x, c) = argmin_exhaustive(&p, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!(x, Bitstring::zeros(4));
        assert_eq!(c, 3.5);
    }

    #[test]
    fn argmin_triangle_and_four_cycle() {
        let (x, c) = argmin_exhaustive(&triangle(), 26).unwrap();
        assert_eq!(c, -2.0);
        // lexicographically smallest optimum with x_0 first: 001
        assert_eq!(x.to_string(), "001");

        let mut cycle = BinaryPolynomial::new(4);
        for (i, j) in [(0, 1), (1, 2), (2, 3), (0, 3)] {
            cycle.add_term(&[i, j], 2.0).unwrap();
            cycle.add_term(&[i], -1.0).unwrap();
            cycle.add_term(&[j], -1.0).unwrap();
        }
        let (x, c) = argmin_exhaustive(&cycle, 26).unwrap();
        assert_eq!(c, -4.0);
        assert_eq!(x.to_string(), "0101");
    }

    #[test]
    fn argmin_respects_cap() {
        let p = BinaryPolynomial::new(12);
        assert_eq!(
            argmin_exhaustive(&p, 10),
            Err(ModelError::TooLarge {
                num_vars: 12,
                cap: 10
            })
        );
    }

    #[test]
    fn lexicographic_tie_break_across_chunks() {
        // minimum attained at x_12 = 1 (index 4096, second chunk) and x_0 = 1 (index 1);
        // lexicographic order prefers the one with x_0 = 0.
        let mut p = BinaryPolynomial::new(13);
        p.add_term(&[0], -1.0).unwrap();
        p.add_term(&[12], -1.0).unwrap();
        p.add_term(&[0, 12], 1.0).unwrap();
        let (x, c) = argmin_exhaustive(&p, 26).unwrap();
        assert_eq!(c, -1.0);
        assert!(!x.get(0) && x.get(12));
    }

    #[test]
    fn bitstring_index_round_trip() {
        let x = Bitstring::from_index(0b1011, 5);
        assert_eq!(x.to_string(), "11010");
        assert_eq!(x.to_index(), Some(0b1011));
        assert_eq!("11010".parse::<Bitstring>().unwrap(), x);
        assert!("10a".parse::<Bitstring>().is_err());
    }

    #[test]
    fn quadratic_view_matches_polynomial() {
        let p = triangle();
        let q = p.to_quadratic().unwrap();
        for idx in 0..8 {
            let x = Bitstring::from_index(idx, 3);
            let e = q.energy(x.bits());
            assert_eq!(e, p.evaluate_bits(&x).unwrap());
            for i in 0..3 {
                let mut y = x.clone();
                y.flip(i);
                let d = p.evaluate_bits(&y).unwrap() - e;
                assert!((q.flip_delta(x.bits(), i) - d).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn merge_with_empty_is_identity() {
        let mut x = SampleSet::new(2);
        x.push(Bitstring::from_index(1, 2), -1.0).unwrap();
        x.timing.solve = 0.3;
        x.timing.preprocess = 0.1;
        let merged = SampleSet::merge(&x, &SampleSet::new(2)).unwrap();
        assert_eq!(merged, x);
    }

    #[test]
    fn merge_adds_counts_and_solve_time() {
        let mut a = SampleSet::new(2);
        a.push(Bitstring::from_index(2, 2), -1.0).unwrap();
        a.timing = Timing {
            preprocess: 0.5,
            solve: 0.3,
            postprocess: 0.0,
        };
        let mut b = SampleSet::new(2);
        b.push(Bitstring::from_index(2, 2), -1.0).unwrap();
        b.timing = Timing {
            preprocess: 0.9,
            solve: 0.4,
            postprocess: 0.0,
        };
        let m = SampleSet::merge(&a, &b).unwrap();
        assert_eq!(m.total_draws(), 2);
        assert_eq!(m.num_distinct(), 1);
        assert!((m.timing.solve - 0.7).abs() < 1e-15);
        assert_eq!(m.timing.preprocess, 0.5);
        assert!(SampleSet::merge(&a, &SampleSet::new(3)).is_err());
    }
}
