//! Classical samplers and exhaustive oracles.
//!
//! Every sampler is single-threaded, deterministic per seed and returns a
//! [`SampleSet`] whose costs are the model costs of the sampled bitstrings.

use std::time::Instant;

use thiserror::Error;

use crate::model::{argmin_exhaustive, BinaryPolynomial, ModelError, SampleSet};

pub mod gw;
pub mod local;
pub mod sa;
pub mod tabu;
pub mod tsp;

pub use gw::{goemans_williamson, gw_relax, gw_round, GwConfig, GwOutput, GwRelaxation};
pub use local::local_search_maxcut;
pub use sa::{simulated_annealing, SaConfig};
pub use tabu::{tabu_search, TsConfig};
pub use tsp::{nearest_neighbor_tsp, tsp_exhaustive, Tour, TspOptimum, DEFAULT_TSP_CAP};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("relaxation did not converge after {iterations} iterations (relative change {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("instance with k = {k} exceeds the enumeration cap {cap}")]
    TooLarge { k: usize, cap: usize },
    #[error("location {start} out of range for {num_locations} locations")]
    BadStart { start: usize, num_locations: usize },
}

/// Exhaustive minimum packaged as a one-draw sample set; `t_solve` is the
/// enumeration time.
pub fn exhaustive_sampler(poly: &BinaryPolynomial, cap: usize) -> Result<SampleSet, SolverError> {
    let started = Instant::now();
    let (x, cost) = argmin_exhaustive(poly, cap)?;
    let mut out = SampleSet::new(poly.num_vars());
    out.push(x, cost)?;
    out.timing.solve = started.elapsed().as_secs_f64();
    Ok(out)
}

/// Local field `h_i = linear_i + sum_j q_ij x_j` for every variable.
pub(crate) fn local_fields(model: &crate::model::QuadraticModel, x: &[bool]) -> Vec<f64> {
    (0..model.num_vars())
        .map(|i| {
            model.linear[i]
                + model.neighbors[i]
                    .iter()
                    .filter(|(j, _)| x[*j])
                    .map(|(_, q)| q)
                    .sum::<f64>()
        })
        .collect()
}

/// Flips `x_i` and updates the neighbours' local fields.
#[inline]
pub(crate) fn apply_flip(
    model: &crate::model::QuadraticModel,
    x: &mut [bool],
    fields: &mut [f64],
    i: usize,
) {
    x[i] = !x[i];
    let sign = if x[i] { 1.0 } else { -1.0 };
    for &(j, q) in &model.neighbors[i] {
        fields[j] += sign * q;
    }
}

/// Cost change of flipping `x_i` given its local field.
#[inline]
pub(crate) fn flip_delta(x: &[bool], fields: &[f64], i: usize) -> f64 {
    if x[i] {
        -fields[i]
    } else {
        fields[i]
    }
}
