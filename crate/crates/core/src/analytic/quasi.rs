//! Quasi-exact eigenstates of the two-qubit model.
//!
//! For equal couplings `g1 = g2 = g` three parameter lines carry closed-form
//! eigenstates with finite Fock support:
//!
//! - symmetric detuning `ω1 + ω2 = 2ω_c`: an even state at `E = ω_c`,
//! - asymmetric detuning `ω1 - ω2 = 2ω_c`: an odd state at `E = ω_c`,
//! - identical qubits `ω1 = ω2`: the singlet ladder `(|10> - |01>)|m>/√2`
//!   at `E = mω_c`.
//!
//! The detuned states are eigenstates of the unrotated Hamiltonian; the
//! singlet ladder lives in the rotated frame. Both frames share one
//! spectrum, so every energy here must appear in the exact diagonalization.

use num_complex::Complex64;

use crate::error::Result;
use crate::exact::fock_hamiltonian;
use crate::model::{ModelParams, ParitySector};
use crate::state::{Frame, QuantumState};

/// Which parameter condition produced a quasi-exact state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuasiCondition {
    SymmetricDetuning,
    AsymmetricDetuning,
    SingletLadder(usize),
}

impl QuasiCondition {
    pub fn label(&self) -> String {
        match self {
            QuasiCondition::SymmetricDetuning => "symmetric-detuning".into(),
            QuasiCondition::AsymmetricDetuning => "asymmetric-detuning".into(),
            QuasiCondition::SingletLadder(m) => format!("singlet-ladder({m})"),
        }
    }
}

/// A closed-form eigenstate with finite Fock support.
#[derive(Debug, Clone)]
pub struct QuasiExactState {
    /// Energy in units of ω_c.
    pub energy: f64,
    pub state: QuantumState,
    pub condition: QuasiCondition,
    /// Mixing amplitude q for the detuned states; the sign is fixed by
    /// residual minimization over both candidates `±2g/(ω1 ∓ ω2)`.
    pub q: Option<f64>,
}

const CONDITION_TOL: f64 = 1e-12;

/// Every quasi-exact state the parameters support, the singlet ladder up to
/// quantum `m_max`. Empty when no condition holds within 1e-12.
pub fn quasi_exact_states(params: &ModelParams, m_max: usize) -> Result<Vec<QuasiExactState>> {
    if params.n_qubits() != 2 {
        return Ok(Vec::new());
    }
    let (g1, g2) = (params.coupling(1), params.coupling(2));
    if (g1 - g2).abs() > CONDITION_TOL {
        return Ok(Vec::new());
    }
    let g = g1;
    let (w1, w2) = (params.omega(1), params.omega(2));
    let wc = params.omega_c();
    let mut states = Vec::new();

    let identical = (w1 - w2).abs() <= CONDITION_TOL;
    if !identical && (w1 + w2 - 2.0 * wc).abs() <= CONDITION_TOL {
        states.push(detuned_state(params, g, QuasiCondition::SymmetricDetuning)?);
    }
    if (w1 - w2 - 2.0 * wc).abs() <= CONDITION_TOL {
        states.push(detuned_state(
            params,
            g,
            QuasiCondition::AsymmetricDetuning,
        )?);
    }
    if identical {
        for m in 0..=m_max {
            states.push(singlet_state(params, m));
        }
    }
    Ok(states)
}

/// `ψ_e = (q(|01> - |10>)|1> + |11>|0>)/√(2q²+1)` or
/// `ψ_o = (q(|00> - |11>)|1> + |01>|0>)/√(2q²+1)`, unrotated frame,
/// `E = ω_c`, with the q sign chosen by residual minimization.
fn detuned_state(
    params: &ModelParams,
    g: f64,
    condition: QuasiCondition,
) -> Result<QuasiExactState> {
    let (w1, w2) = (params.omega(1), params.omega(2));
    let energy = params.omega_c();
    let q_mag = match condition {
        QuasiCondition::SymmetricDetuning => 2.0 * g / (w1 - w2),
        _ => 2.0 * g / (w1 + w2),
    };
    let mut best: Option<(f64, QuantumState, f64)> = None;
    for q in [q_mag, -q_mag] {
        let state = build_detuned(params, q, condition);
        let residual = hamiltonian_residual(params, &state, energy)?;
        if best.as_ref().is_none_or(|(_, _, r)| residual < *r) {
            best = Some((q, state, residual));
        }
    }
    let (q, state, _) = best.expect("two candidates evaluated");
    Ok(QuasiExactState {
        energy,
        state,
        condition,
        q: Some(q),
    })
}

fn build_detuned(params: &ModelParams, q: f64, condition: QuasiCondition) -> QuantumState {
    let norm = (2.0 * q * q + 1.0).sqrt();
    let mut psi = QuantumState::fock_zero(params, Frame::Unrotated, 2);
    // config order |11>, |10>, |01>, |00>
    match condition {
        QuasiCondition::SymmetricDetuning => {
            psi.set_amp(2, 1, Complex64::new(q / norm, 0.0)); // |01>|1>
            psi.set_amp(1, 1, Complex64::new(-q / norm, 0.0)); // |10>|1>
            psi.set_amp(0, 0, Complex64::new(1.0 / norm, 0.0)); // |11>|0>
            psi.set_parity(Some(ParitySector::Even));
        }
        _ => {
            psi.set_amp(3, 1, Complex64::new(q / norm, 0.0)); // |00>|1>
            psi.set_amp(0, 1, Complex64::new(-q / norm, 0.0)); // |11>|1>
            psi.set_amp(2, 0, Complex64::new(1.0 / norm, 0.0)); // |01>|0>
            psi.set_parity(Some(ParitySector::Odd));
        }
    }
    psi
}

/// `(|10> - |01>)|m>/√2` in the rotated frame, `E = mω_c`, parity
/// even (odd) for odd (even) m.
fn singlet_state(params: &ModelParams, m: usize) -> QuasiExactState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = QuantumState::fock_zero(params, Frame::Rotated, m + 1);
    psi.set_amp(1, m, Complex64::new(s, 0.0)); // |10>|m>
    psi.set_amp(2, m, Complex64::new(-s, 0.0)); // |01>|m>
    psi.set_parity(Some(if m % 2 == 1 {
        ParitySector::Even
    } else {
        ParitySector::Odd
    }));
    QuasiExactState {
        energy: m as f64 * params.omega_c(),
        state: psi,
        condition: QuasiCondition::SingletLadder(m),
        q: None,
    }
}

/// `‖Hψ - Eψ‖` in the state's own frame, with the grid padded by one
/// quantum so the residual of a finite-support state is exact.
pub fn hamiltonian_residual(
    params: &ModelParams,
    state: &QuantumState,
    energy: f64,
) -> Result<f64> {
    let n_quanta = state.n_quanta() + 1;
    let padded = state.with_quanta(n_quanta)?;
    let h = fock_hamiltonian(params, n_quanta, padded.frame());
    let dim = padded.amps().len();
    let re = nalgebra::DVector::from_iterator(dim, padded.amps().iter().map(|z| z.re));
    let im = nalgebra::DVector::from_iterator(dim, padded.amps().iter().map(|z| z.im));
    let r_re = &h * &re - energy * &re;
    let r_im = &h * &im - energy * &im;
    Ok((r_re.norm_squared() + r_im.norm_squared()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn symmetric_detuning_state() {
        let p = ModelParams::two_qubit(1.3, 0.7, 0.2, 0.2).unwrap();
        let states = quasi_exact_states(&p, 5).unwrap();
        assert_eq!(states.len(), 1);
        let s = &states[0];
        assert_eq!(s.condition, QuasiCondition::SymmetricDetuning);
        assert_abs_diff_eq!(s.energy, 1.0, epsilon = 1e-15);
        assert!(hamiltonian_residual(&p, &s.state, s.energy).unwrap() <= 1e-12);
        assert_eq!(s.state.parity(), Some(ParitySector::Even));
        assert_eq!(s.state.frame(), Frame::Unrotated);
        // substitution fixes q = -2g/(ω1-ω2)
        assert_abs_diff_eq!(s.q.unwrap(), -2.0 * 0.2 / 0.6, epsilon = 1e-15);
    }

    #[test]
    fn asymmetric_detuning_state() {
        let p = ModelParams::two_qubit(2.7, 0.7, 0.2, 0.2).unwrap();
        let states = quasi_exact_states(&p, 5).unwrap();
        assert_eq!(states.len(), 1);
        let s = &states[0];
        assert_eq!(s.condition, QuasiCondition::AsymmetricDetuning);
        assert_abs_diff_eq!(s.energy, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.q.unwrap().abs(), 0.4 / 3.4, epsilon = 1e-15);
        assert!(hamiltonian_residual(&p, &s.state, s.energy).unwrap() <= 1e-12);
        assert_eq!(s.state.parity(), Some(ParitySector::Odd));
    }

    #[test]
    fn singlet_ladder_states() {
        let p = ModelParams::two_qubit(0.25, 0.25, 0.15, 0.15).unwrap();
        let states = quasi_exact_states(&p, 5).unwrap();
        assert_eq!(states.len(), 6);
        for (m, s) in states.iter().enumerate() {
            assert_eq!(s.condition, QuasiCondition::SingletLadder(m));
            assert_abs_diff_eq!(s.energy, m as f64, epsilon = 1e-15);
            assert!(hamiltonian_residual(&p, &s.state, s.energy).unwrap() <= 1e-12);
            let want = if m % 2 == 1 {
                ParitySector::Even
            } else {
                ParitySector::Odd
            };
            assert_eq!(s.state.parity(), Some(want));
        }
    }

    #[test]
    fn no_condition_no_states() {
        let p = ModelParams::two_qubit(0.9, 0.7, 0.2, 0.2).unwrap();
        assert!(quasi_exact_states(&p, 5).unwrap().is_empty());
        let p = ModelParams::two_qubit(1.3, 0.7, 0.2, 0.3).unwrap();
        assert!(quasi_exact_states(&p, 5).unwrap().is_empty());
    }

    #[test]
    fn rotated_detuned_state_has_unit_rayleigh_quotient() {
        let p = ModelParams::two_qubit(1.3, 0.7, 0.2, 0.2).unwrap();
        let s = &quasi_exact_states(&p, 0).unwrap()[0];
        let rotated = s.state.rotate_frame().unwrap();
        // Rayleigh quotient under the rotated-frame Hamiltonian
        let n_quanta = rotated.n_quanta() + 1;
        let padded = rotated.with_quanta(n_quanta).unwrap();
        let h = fock_hamiltonian(&p, n_quanta, Frame::Rotated);
        let v = nalgebra::DVector::from_iterator(
            padded.amps().len(),
            padded.amps().iter().map(|z| z.re),
        );
        let rq = (v.transpose() * &h * &v)[(0, 0)] / v.norm_squared();
        assert_abs_diff_eq!(rq, 1.0, epsilon = 1e-10);
        // and the rotated state is still an exact eigenstate
        assert!(hamiltonian_residual(&p, &rotated, 1.0).unwrap() <= 1e-12);
    }
}
