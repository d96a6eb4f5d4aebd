//! Exact simulation of tripartite mixed-state entanglement in the kicked-field
//! Ising chain, together with replica transfer matrices and Haar references.

pub mod circuit;
pub mod error;
pub mod experiment;
pub mod haar;
pub mod measures;
pub mod replica;
pub mod states;
pub mod verify;

pub use circuit::{CircuitParams, FloquetOperator, StateVector, C64};
pub use error::{Error, Result};
