//! Spectra, dynamics, and entanglement of `N` qubits inhomogeneously coupled
//! to a single bosonic mode, treated without the rotating-wave approximation.
//!
//! The working basis is the displaced Fock basis: each σ^z product
//! configuration drags its own oscillator displacement, and global parity
//! folds the problem onto half of the configurations. On top of that basis
//! the crate provides
//!
//! - exact diagonalization of the folded Hamiltonian plus an independent
//!   product-basis brute-force oracle ([`exact`]),
//! - closed-form single-block and two-block spectra with the
//!   pseudo-solution filter, general block-window truncations, and the
//!   quasi-exact eigenstates ([`analytic`]),
//! - population dynamics for displaced-coherent preparations, including the
//!   collapse–revival series ([`dynamics`]),
//! - two-qubit concurrence from the reduced density matrix, analytic and
//!   via exact partial trace ([`entanglement`]),
//! - parameter sweeps, level-crossing detection, and convergence control
//!   ([`analysis`]).
//!
//! Energies and frequencies are in units of the mode frequency ω_c
//! throughout. With the default `parallel` feature, sweeps and propagation
//! fan out over a rayon pool; results are assembled in input order either
//! way, so outputs are identical with or without it.

pub mod analysis;
pub mod analytic;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod exact;
pub mod linalg;
pub mod model;
mod parallel;
pub mod state;

pub use error::{Error, Result};
pub use model::{kept_configs, ModelParams, ParitySector, SpinConfig, Truncation};
pub use state::{Frame, QuantumState, StateBasis};
