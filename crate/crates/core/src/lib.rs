//! Exact simulation of variational quantum circuits under stochastic
//! gate-parameter noise.
//!
//! A gate `e^{iAθ}` with an involutory generator `A` (`A² = 1`) whose angle is
//! perturbed by a random `δ` produces, on average, a mixed state. This crate
//! evaluates the resulting energy shift three independent ways (Monte Carlo
//! sampling, the exact averaged channel on density matrices, and the
//! first-order expansion in the gate error probabilities `aₖ = ⟨sin²δₖ⟩`) and
//! provides the surrounding machinery: problem Hamiltonians, VQE/QAOA ansätze,
//! parameter-shift optimizers, stability-lemma bounds and power-law fits.

pub mod analysis;
pub mod ansatz;
pub mod circuit;
pub mod config;
pub mod density;
pub mod error;
pub mod hamiltonian;
pub mod instances;
pub mod io;
pub mod linalg;
pub mod noise;
pub mod optimize;
pub mod pauli;
pub mod problems;
pub mod spectrum;
pub mod state;

pub use error::{Error, Result};

/// Absolute tolerance for norm, trace and Hermiticity checks.
pub const NUM_TOL: f64 = 1e-10;

/// Eigenvalues closer than this are treated as one energy level.
pub const LEVEL_TOL: f64 = 1e-9;

/// Largest register simulated as a state vector.
pub const MAX_STATE_QUBITS: usize = 14;

/// Default largest register simulated as a density matrix.
pub const DEFAULT_MAX_DM_QUBITS: usize = 10;
