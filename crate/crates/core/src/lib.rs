//! Compile a desired two-body Hamiltonian `K` into a schedule of exact
//! local-unitary layers interleaved with timed evolutions under a fixed
//! entangling drift Hamiltonian `H`, with analytic error bounds and dense
//! verification.

pub mod bounds;
pub mod cli;
pub mod decouple;
pub mod dense;
pub mod error;
pub mod local;
pub mod pauli;
pub mod program;
pub mod route;
pub mod schedule;
pub mod synth;

pub use error::{Error, Result};
