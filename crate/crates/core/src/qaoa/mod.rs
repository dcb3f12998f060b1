//! Exact QAOA simulation for penalty QUBOs, binary-integer HOBOs, the XY
//! mixer on one-hot subspaces and the Grover mixer on permutations, plus
//! schedule generators and CNOT-layer accounting.

use thiserror::Error;

use crate::instances::TspInstance;
use crate::metrics::MetricError;
use crate::model::{BinaryPolynomial, ModelError};

pub mod ledger;
pub mod problem;
pub mod sim;
pub mod train;
pub mod tsp;

pub use ledger::{edge_coloring, maxcut_ledger, tsp_ledger, tts_layers, EdgeColoring, LayerLedger};
pub use problem::{Basis, Encoding, OutputDistribution, QaoaCaps, QaoaProblem};
pub use train::{expand_generator, mean_ratio, train_generator, GeneratorParams, TrainConfig, TrainResult};
pub use tsp::TspPenalties;

#[derive(Debug, Error)]
pub enum QaoaError {
    #[error("{what} {size} exceeds the simulator cap {cap}")]
    TooLarge { what: String, size: usize, cap: usize },
    #[error("schedule lengths differ: {beta} betas, {gamma} gammas")]
    ParameterLength { beta: usize, gamma: usize },
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("{0} are not available for this ansatz")]
    Unavailable(&'static str),
    #[error("{0}")]
    Unknown(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Transverse-field QAOA on a polynomial model.
pub fn qaoa_qubo_simulate(poly: &BinaryPolynomial, beta: &[f64], gamma: &[f64]) -> Result<OutputDistribution, QaoaError> {
    QaoaProblem::from_polynomial(poly, &QaoaCaps::default())?.simulate(beta, gamma)
}

pub fn qaoa_hobo_tsp_simulate(
    inst: &TspInstance,
    beta: &[f64],
    gamma: &[f64],
    pen: TspPenalties,
) -> Result<OutputDistribution, QaoaError> {
    QaoaProblem::tsp(inst, Encoding::Hobo, pen, &QaoaCaps::default())?.simulate(beta, gamma)
}

pub fn qaoa_xy_simulate(
    inst: &TspInstance,
    beta: &[f64],
    gamma: &[f64],
    pen: TspPenalties,
) -> Result<OutputDistribution, QaoaError> {
    QaoaProblem::tsp(inst, Encoding::Xy, pen, &QaoaCaps::default())?.simulate(beta, gamma)
}

pub fn qaoa_perm_simulate(
    inst: &TspInstance,
    beta: &[f64],
    gamma: &[f64],
    pen: TspPenalties,
) -> Result<OutputDistribution, QaoaError> {
    QaoaProblem::tsp(inst, Encoding::Perm, pen, &QaoaCaps::default())?.simulate(beta, gamma)
}
