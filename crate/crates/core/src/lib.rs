//! Simulation toolkit for toric-code and surface-code experiments.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: geometry, stabilizers, entropy blocks and the analytic entropy oracle.
//! * [`logical`]: nearest-codeword decoding, logical tomography and drift decay.
//! * [`pauli`], [`circuit`], [`transpile`]: Pauli algebra, layered circuits and rewriting passes.
//! * [`sim`]: stabilizer-tableau and dense-statevector execution.
//! * [`braiding`]: interferometric braiding and exchange phases.
//! * [`entropy`]: randomized-measurement Rényi entropies and `S_topo`.
//! * [`mitigation`]: response matrices and iterative Bayesian unfolding.
//! * [`noise`]: readout, depolarizing and drift models.
//! * [`prep`]: ground-state, logical-state, injection and interferometry circuits.

pub mod braiding;
pub mod circuit;
pub mod entropy;
pub mod error;
pub mod gf2;
pub mod lattice;
pub mod logical;
pub mod mat2;
pub mod mitigation;
pub mod noise;
pub mod pauli;
pub mod prep;
pub mod sim;
pub mod transpile;

pub use circuit::{Circuit, Gate, GateKind};
pub use error::{Error, Result};
pub use lattice::{build_lattice, Boundary, LatticeSpec};
pub use pauli::{Pauli, PauliString};
pub use sim::{Backend, ProbDist, QuantumState};
