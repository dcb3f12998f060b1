//! Benchmarking toolkit for sampling-based optimisation: QUBO/HOBO models,
//! instance generators, classical heuristics, a QAOA statevector simulator,
//! quality and time-to-solution metrics, and an experiment harness.

pub mod instances;
pub mod model;
pub mod solvers;
pub mod metrics;
pub mod qaoa;
pub mod harness;
