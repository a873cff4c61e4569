//! Closed-form spectra in the displaced basis: the single-block (adiabatic)
//! approximation, the two-block quartic with its pseudo-solution filter,
//! generic block-window truncations, and the quasi-exact eigenstates.

mod block;
mod first_order;
mod quartic;
mod quasi;
mod zeroth;

pub use block::block_truncated_spectrum;
pub use first_order::{
    first_order_folded_coeffs, first_order_levels, first_order_spectrum, FirstOrderLevel,
};
pub use quartic::{quartic_coeffs, solve_quartic, QuarticCoeffs, QuarticRoots, Sign};
pub use quasi::{hamiltonian_residual, quasi_exact_states, QuasiCondition, QuasiExactState};
pub use zeroth::{zeroth_spectrum, Branch, ZerothLevel};

pub(crate) use zeroth::ZerothBlock;

use crate::error::{Error, Result};
use crate::model::ModelParams;

pub(crate) fn require_two_qubits(params: &ModelParams) -> Result<()> {
    if params.n_qubits() != 2 {
        return Err(Error::InvalidParams(format!(
            "closed forms are two-qubit only, got N = {}",
            params.n_qubits()
        )));
    }
    Ok(())
}
