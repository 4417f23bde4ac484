//! Frame potential estimation for random quantum circuit ensembles.
//!
//! Traces `Tr(U†V)` of sampled circuit pairs are evaluated as single
//! amplitudes of an ancilla-doubled circuit, contracted as a tensor network.
//! Their moments give the frame potential, whose decay with depth is fitted
//! to find the depth at which an ensemble becomes an ε-approximate k-design.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, threading and
//! the command-line driver live in the `framepot` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod circuit;
pub mod error;
pub mod estimator;
pub mod haar;
pub mod linalg;
pub mod oracle;
pub mod stats;
pub mod tensornet;

pub use circuit::{Circuit, EnsembleSpec, Entangler, Family, Gate, GateKind, HaarMode, Wires};
pub use error::{Error, Result};
pub use estimator::{FramePotentialEstimate, TerminationPolicy, TraceSample, TraceSampleStore};
pub use linalg::C64;
pub use tensornet::{BasisState, Contractor, EliminationOrder, Heuristic, TensorNetwork};
