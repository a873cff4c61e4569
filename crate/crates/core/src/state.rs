//! Quantum states over (spin configuration, oscillator quantum) grids, in
//! either the parity-folded displaced basis or the plain Fock basis.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{kept_configs, ModelParams, ParitySector, SpinConfig};

/// Which oscillator basis the amplitudes refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateBasis {
    /// Kept configurations only; quantum `m` counts displaced Fock states
    /// `|m>_{A_i}` of each configuration's own displacement. Requires a
    /// parity label to reconstruct the eliminated half.
    DisplacedFolded,
    /// All `2^N` configurations; quantum `k` counts undisplaced Fock states.
    Fock,
}

/// Frame of reference for the qubit operators.
///
/// `Rotated` is the frame of the working Hamiltonian
/// `ω_c a†a + Σ_j (-ω_j/2 σ_j^x + g_j(a†+a) σ_j^z)`; `Unrotated` is its
/// preimage under `V = exp(iπ/4 Σ_j σ_j^y)`, i.e.
/// `ω_c a†a + Σ_j (ω_j/2 σ_j^z + g_j(a†+a) σ_j^x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Rotated,
    Unrotated,
}

/// Amplitudes over a (configuration, quantum) grid.
///
/// Layout is quantum-major: `amps[q * n_configs + c]`.
#[derive(Debug, Clone)]
pub struct QuantumState {
    basis: StateBasis,
    frame: Frame,
    parity: Option<ParitySector>,
    configs: Vec<SpinConfig>,
    n_quanta: usize,
    amps: Vec<Complex64>,
}

impl QuantumState {
    /// Folded displaced-basis state from real coefficients over
    /// `(kept config i, quantum m)` in quantum-major order.
    pub fn folded(
        params: &ModelParams,
        kappa: ParitySector,
        frame: Frame,
        coeffs: &[f64],
    ) -> Result<Self> {
        let kept: Vec<SpinConfig> = kept_configs(params).into_iter().map(|(k, _)| k).collect();
        if coeffs.is_empty() || !coeffs.len().is_multiple_of(kept.len()) {
            return Err(Error::BasisMismatch(format!(
                "coefficient length {} is not a multiple of {} kept configs",
                coeffs.len(),
                kept.len()
            )));
        }
        let n_quanta = coeffs.len() / kept.len();
        Ok(Self {
            basis: StateBasis::DisplacedFolded,
            frame,
            parity: Some(kappa),
            configs: kept,
            n_quanta,
            amps: coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        })
    }

    /// Zero Fock-basis state over all configurations.
    pub fn fock_zero(params: &ModelParams, frame: Frame, n_quanta: usize) -> Self {
        let configs = params.all_configs();
        let amps = vec![Complex64::new(0.0, 0.0); configs.len() * n_quanta];
        Self {
            basis: StateBasis::Fock,
            frame,
            parity: None,
            configs,
            n_quanta,
            amps,
        }
    }

    /// Fock-basis state from a complex amplitude vector (quantum-major).
    pub fn fock_from_amps(
        params: &ModelParams,
        frame: Frame,
        n_quanta: usize,
        amps: Vec<Complex64>,
    ) -> Result<Self> {
        let configs = params.all_configs();
        if amps.len() != configs.len() * n_quanta {
            return Err(Error::BasisMismatch(format!(
                "{} amplitudes for {} configs x {} quanta",
                amps.len(),
                configs.len(),
                n_quanta
            )));
        }
        Ok(Self {
            basis: StateBasis::Fock,
            frame,
            parity: None,
            configs,
            n_quanta,
            amps,
        })
    }

    pub fn basis(&self) -> StateBasis {
        self.basis
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn parity(&self) -> Option<ParitySector> {
        self.parity
    }

    pub fn set_parity(&mut self, parity: Option<ParitySector>) {
        self.parity = parity;
    }

    pub fn configs(&self) -> &[SpinConfig] {
        &self.configs
    }

    pub fn n_quanta(&self) -> usize {
        self.n_quanta
    }

    pub fn n_qubits(&self) -> usize {
        match self.basis {
            StateBasis::Fock => self.configs.len().trailing_zeros() as usize,
            StateBasis::DisplacedFolded => self.configs.len().trailing_zeros() as usize + 1,
        }
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, config: usize, quantum: usize) -> Complex64 {
        self.amps[quantum * self.configs.len() + config]
    }

    pub fn set_amp(&mut self, config: usize, quantum: usize, value: Complex64) {
        self.amps[quantum * self.configs.len() + config] = value;
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    /// Inner product `<self|other>`; both states must share basis, frame,
    /// and grid shape.
    pub fn inner(&self, other: &QuantumState) -> Result<Complex64> {
        self.check_compatible(other)?;
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub(crate) fn check_compatible(&self, other: &QuantumState) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch("states in different bases".into()));
        }
        if self.frame != other.frame {
            return Err(Error::BasisMismatch("states in different frames".into()));
        }
        if self.n_quanta != other.n_quanta || self.configs.len() != other.configs.len() {
            return Err(Error::BasisMismatch(format!(
                "grid mismatch: {}x{} vs {}x{}",
                self.configs.len(),
                self.n_quanta,
                other.configs.len(),
                other.n_quanta
            )));
        }
        Ok(())
    }

    /// Pad (or error on truncation) a Fock state to a larger quantum grid.
    pub fn with_quanta(&self, n_quanta: usize) -> Result<QuantumState> {
        if n_quanta < self.n_quanta {
            return Err(Error::BasisMismatch(format!(
                "cannot shrink quantum grid {} -> {}",
                self.n_quanta, n_quanta
            )));
        }
        let nc = self.configs.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); nc * n_quanta];
        amps[..nc * self.n_quanta].copy_from_slice(&self.amps);
        Ok(QuantumState {
            n_quanta,
            amps,
            ..self.clone()
        })
    }

    /// Apply the per-qubit frame rotation, toggling the frame tag.
    ///
    /// Going `Unrotated -> Rotated` applies `(1/√2)[[1, 1], [-1, 1]]` in the
    /// `(|1>, |0>)` ordering per qubit; the reverse direction applies the
    /// inverse. Fock basis only: the displaced basis ties the oscillator to
    /// specific σ^z configurations.
    pub fn rotate_frame(&self) -> Result<QuantumState> {
        if self.basis != StateBasis::Fock {
            return Err(Error::BasisMismatch(
                "frame rotation requires the Fock basis".into(),
            ));
        }
        let n_qubits = self.n_qubits();
        let nc = self.configs.len();
        let forward = self.frame == Frame::Unrotated;
        let mut amps = self.amps.clone();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for j in 0..n_qubits {
            let bit = 1usize << j;
            for q in 0..self.n_quanta {
                for c_bits in 0..nc {
                    if c_bits & bit == 0 {
                        continue;
                    }
                    // config index = 2^N - 1 - bits
                    let idx_up = q * nc + (nc - 1 - c_bits);
                    let idx_dn = q * nc + (nc - 1 - (c_bits ^ bit));
                    let up = amps[idx_up];
                    let dn = amps[idx_dn];
                    if forward {
                        amps[idx_up] = s * (up + dn);
                        amps[idx_dn] = s * (dn - up);
                    } else {
                        amps[idx_up] = s * (up - dn);
                        amps[idx_dn] = s * (up + dn);
                    }
                }
            }
        }
        Ok(QuantumState {
            frame: if forward {
                Frame::Rotated
            } else {
                Frame::Unrotated
            },
            amps,
            ..self.clone()
        })
    }
}
