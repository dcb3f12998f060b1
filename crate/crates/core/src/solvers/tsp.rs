//! Nearest-neighbour tours and the exhaustive TSP oracle.

use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::instances::TspInstance;

/// Largest `k` (locations besides the depot) enumerated by default.
pub const DEFAULT_TSP_CAP: usize = 10;

/// Closed tour listed from its starting location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspOptimum {
    /// Order of the locations `1..=k` after the depot.
    pub best_perm: Vec<usize>,
    pub best_length: f64,
    pub worst_length: f64,
    pub permutations: u64,
}

/// Greedy tour: always move to the closest unvisited location, smaller index
/// first on ties.
pub fn nearest_neighbor_tsp(inst: &TspInstance, start: usize) -> Result<Tour, SolverError> {
    let m = inst.num_locations();
    if start >= m {
        return Err(SolverError::BadStart { start, num_locations: m });
    }
    let mut visited = vec![false; m];
    visited[start] = true;
    let mut order = Vec::with_capacity(m);
    order.push(start);
    let mut current = start;
    for _ in 1..m {
        let mut next = usize::MAX;
        let mut best = f64::INFINITY;
        for (j, &seen) in visited.iter().enumerate() {
            if !seen && inst.d(current, j) < best {
                best = inst.d(current, j);
                next = j;
            }
        }
        visited[next] = true;
        order.push(next);
        current = next;
    }
    let length = inst.closed_walk_length(start, &order[1..]);
    Ok(Tour { order, length })
}

/// Enumerates all `k!` orders of `1..=k` after the depot `0`.
pub fn tsp_exhaustive(inst: &TspInstance, cap: usize) -> Result<TspOptimum, SolverError> {
    let k = inst.k();
    if k > cap {
        return Err(SolverError::TooLarge { k, cap });
    }
    let mut perm: Vec<usize> = (1..=k).collect();
    let mut best_perm = perm.clone();
    let mut best_length = inst.tour_length(&perm);
    let mut worst_length = best_length;
    let mut permutations = 1u64;
    // lexicographic order, so the first strict minimum is the smallest
    while next_permutation(&mut perm) {
        permutations += 1;
        let len = inst.tour_length(&perm);
        if len < best_length {
            best_length = len;
            best_perm.copy_from_slice(&perm);
        }
        if len > worst_length {
            worst_length = len;
        }
    }
    Ok(TspOptimum { best_perm, best_length, worst_length, permutations })
}

/// Advances to the next lexicographic permutation; false after the last one.
pub(crate) fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}
