//! Parity-folded Hamiltonian construction, exact diagonalization, and the
//! independent Fock-basis brute-force oracle.
//!
//! The folded matrix acts on coefficients `d_{i,m}` of the kept
//! configurations; its diagonal is `ε_{i,m} = (m - β_i²) ω_c` and its
//! off-diagonal entries come from [`crate::model::omega_element`]. The
//! oracle diagonalizes the same physics in the uncoupled qubit ⊗ Fock
//! product basis, with parity read off the global parity operator, and is
//! the ground truth every other method is checked against.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, symmetric_eigen};
use crate::model::{
    coupling_element, displaced_overlap, kept_configs, ModelParams, ParitySector, SpinConfig,
    Truncation,
};
use crate::state::{Frame, QuantumState, StateBasis};

/// Dense-solver guard on the matrix axis dimension.
pub const MAX_DIM: usize = 200_000;

/// How a spectrum was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    /// Exact diagonalization of the folded displaced-basis Hamiltonian.
    Ed,
    /// Brute-force diagonalization in the qubit ⊗ Fock product basis.
    FockOracle,
    /// Closed-form single-block (adiabatic) approximation.
    Zeroth,
    /// Closed-form two-block approximation after pseudo-solution filtering.
    First,
    /// Numerical diagonalization of (k+1)-block windows.
    BlockK(usize),
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::Ed => "ed".into(),
            Method::FockOracle => "fock-oracle".into(),
            Method::Zeroth => "zeroth".into(),
            Method::First => "first".into(),
            Method::BlockK(k) => format!("block-{k}"),
        }
    }

    /// Parse "ed", "fock-oracle", "zeroth", "first", or "block-<k>".
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ed" => Ok(Method::Ed),
            "fock-oracle" => Ok(Method::FockOracle),
            "zeroth" => Ok(Method::Zeroth),
            "first" => Ok(Method::First),
            _ => {
                if let Some(k) = s.strip_prefix("block-") {
                    let k = k
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidParams(format!("bad block order in '{s}'")))?;
                    Ok(Method::BlockK(k))
                } else {
                    Err(Error::InvalidParams(format!("unknown method '{s}'")))
                }
            }
        }
    }
}

/// One eigenlevel: energy in units of ω_c, parity when known, and (for
/// displaced-basis methods) the coefficient vector over `(i, m)`.
#[derive(Debug, Clone)]
pub struct EigenLevel {
    pub energy: f64,
    pub parity: Option<ParitySector>,
    pub method: Method,
    pub coeffs: Option<Vec<f64>>,
}

/// Eigenlevels in ascending energy order.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub levels: Vec<EigenLevel>,
}

impl SpectrumResult {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    /// Ascending energies of one parity sector.
    pub fn sector_energies(&self, kappa: ParitySector) -> Vec<f64> {
        self.levels
            .iter()
            .filter(|l| l.parity == Some(kappa))
            .map(|l| l.energy)
            .collect()
    }

    /// Merge and re-sort by energy.
    pub fn merged(mut self, other: SpectrumResult) -> SpectrumResult {
        self.levels.extend(other.levels);
        self.levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        self
    }
}

/// The parity-folded Hamiltonian over `(kept config i, quantum m)`, stored
/// quantum-major: row/column index is `m * n_kept + i`.
#[derive(Debug, Clone)]
pub struct FoldedHamiltonian {
    pub kappa: ParitySector,
    pub params: ModelParams,
    pub trunc: Truncation,
    pub matrix: DMatrix<f64>,
}

impl FoldedHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn index(&self, m: usize, i: usize) -> usize {
        m * self.params.n_kept() + i
    }
}

/// Square window of the folded Hamiltonian spanning quanta `m_lo..=m_hi`
/// over all kept configurations.
pub(crate) fn folded_window(
    params: &ModelParams,
    kappa: ParitySector,
    m_lo: usize,
    m_hi: usize,
) -> DMatrix<f64> {
    let kept: Vec<SpinConfig> = kept_configs(params).into_iter().map(|(k, _)| k).collect();
    let nk = kept.len();
    let nq = m_hi - m_lo + 1;
    let dim = nk * nq;
    let omega_c = params.omega_c();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for a in 0..dim {
        let (ma, ia) = (m_lo + a / nk, a % nk);
        let beta = kept[ia].beta();
        // the coupling element is nonzero on the diagonal for N = 1, where
        // the single flip lands on the kept configuration's own partner
        h[(a, a)] = (ma as f64 - beta * beta) * omega_c
            + coupling_element(params, kappa, ia, ma, ia, ma);
        for b in 0..a {
            let (mb, ib) = (m_lo + b / nk, b % nk);
            let v = coupling_element(params, kappa, ia, ma, ib, mb);
            h[(a, b)] = v;
            h[(b, a)] = v;
        }
    }
    h
}

/// Build the folded Hamiltonian of one parity sector.
pub fn build_folded_hamiltonian(
    params: &ModelParams,
    kappa: ParitySector,
    trunc: &Truncation,
) -> Result<FoldedHamiltonian> {
    let dim = params.n_kept() * trunc.n_quanta();
    if dim > MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            limit: MAX_DIM,
        });
    }
    let matrix = folded_window(params, kappa, 0, trunc.n_tr);
    Ok(FoldedHamiltonian {
        kappa,
        params: params.clone(),
        trunc: *trunc,
        matrix,
    })
}

/// Exact diagonalization of one parity sector of the folded Hamiltonian.
pub fn solve_ed(
    params: &ModelParams,
    kappa: ParitySector,
    trunc: &Truncation,
) -> Result<SpectrumResult> {
    let folded = build_folded_hamiltonian(params, kappa, trunc)?;
    let eig = symmetric_eigen(&folded.matrix)?;
    let levels = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &energy)| EigenLevel {
            energy,
            parity: Some(kappa),
            method: Method::Ed,
            coeffs: Some(eig.eigenvectors.column(k).iter().copied().collect()),
        })
        .collect();
    Ok(SpectrumResult { levels })
}

/// Both parity sectors, merged ascending.
pub fn solve_ed_both(params: &ModelParams, trunc: &Truncation) -> Result<SpectrumResult> {
    let even = solve_ed(params, ParitySector::Even, trunc)?;
    let odd = solve_ed(params, ParitySector::Odd, trunc)?;
    Ok(even.merged(odd))
}

/// The Hamiltonian in the uncoupled qubit ⊗ Fock basis at a photon cutoff
/// (`n_quanta = cutoff + 1` Fock states), in either frame. Index layout is
/// quantum-major, configurations in descending bit order.
pub fn fock_hamiltonian(params: &ModelParams, n_quanta: usize, frame: Frame) -> DMatrix<f64> {
    let nc = params.n_configs();
    let omega_c = params.omega_c();
    let dim = nc * n_quanta;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for bits in 0..nc as u32 {
        let c = params.config_index(bits);
        let beta = params.beta_of_bits(bits);
        for k in 0..n_quanta {
            let row = k * nc + c;
            match frame {
                Frame::Rotated => {
                    h[(row, row)] += k as f64 * omega_c;
                    // -ω_j/2 σ_j^x
                    for j in 0..params.n_qubits() {
                        let flipped = params.config_index(bits ^ (1 << j));
                        let col = k * nc + flipped;
                        h[(row, col)] += -0.5 * params.omegas()[j];
                    }
                    // ω_c β_c (a† + a)
                    if k + 1 < n_quanta {
                        let v = omega_c * beta * ((k + 1) as f64).sqrt();
                        h[(row + nc, row)] += v;
                        h[(row, row + nc)] += v;
                    }
                }
                Frame::Unrotated => {
                    let mut diag = k as f64 * omega_c;
                    for j in 0..params.n_qubits() {
                        let sign = if bits >> j & 1 == 1 { 0.5 } else { -0.5 };
                        diag += sign * params.omegas()[j];
                    }
                    h[(row, row)] += diag;
                    // g_j (a† + a) σ_j^x
                    if k + 1 < n_quanta {
                        for j in 0..params.n_qubits() {
                            let flipped = params.config_index(bits ^ (1 << j));
                            let v = params.couplings()[j] * ((k + 1) as f64).sqrt();
                            h[((k + 1) * nc + flipped, row)] += v;
                            h[(row, (k + 1) * nc + flipped)] += v;
                        }
                    }
                }
            }
        }
    }
    h
}

/// Matrix of the global parity operator `Π = Π_j σ_j^x · exp(iπ a†a)` in the
/// same product-basis layout.
pub fn parity_matrix(params: &ModelParams, n_quanta: usize) -> DMatrix<f64> {
    let nc = params.n_configs();
    let dim = nc * n_quanta;
    let mask = nc as u32 - 1;
    let mut pi = DMatrix::<f64>::zeros(dim, dim);
    for bits in 0..nc as u32 {
        let c = params.config_index(bits);
        let cbar = params.config_index(!bits & mask);
        for k in 0..n_quanta {
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            pi[(k * nc + cbar, k * nc + c)] = s;
        }
    }
    pi
}

/// Eigensystem of the product-basis Hamiltonian with parity-pure
/// eigenvectors, kept around for propagation and projections.
#[derive(Debug, Clone)]
pub struct FockEigensystem {
    pub params: ModelParams,
    pub n_quanta: usize,
    pub energies: Vec<f64>,
    pub parities: Vec<ParitySector>,
    pub vectors: DMatrix<f64>,
}

impl FockEigensystem {
    /// Eigenvector `k` as a rotated-frame Fock-basis state.
    pub fn state(&self, k: usize) -> QuantumState {
        let amps = self
            .vectors
            .column(k)
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        let mut s = QuantumState::fock_from_amps(&self.params, Frame::Rotated, self.n_quanta, amps)
            .expect("eigenvector has the builder's own layout");
        s.set_parity(Some(self.parities[k]));
        s
    }

    pub fn spectrum(&self) -> SpectrumResult {
        let levels = self
            .energies
            .iter()
            .zip(&self.parities)
            .map(|(&energy, &parity)| EigenLevel {
                energy,
                parity: Some(parity),
                method: Method::FockOracle,
                coeffs: None,
            })
            .collect();
        SpectrumResult { levels }
    }
}

/// Diagonalize the rotated-frame product-basis Hamiltonian and classify
/// every eigenvector by parity.
///
/// Eigenvectors of (near-)degenerate clusters are rotated to diagonalize Π
/// within the cluster, so each returned vector is parity-pure even when the
/// plain eigensolver mixes sectors. A parity expectation farther than 1e-6
/// from ±1 reports a cutoff failure.
pub fn fock_eigensystem(params: &ModelParams, photon_cutoff: usize) -> Result<FockEigensystem> {
    let n_quanta = photon_cutoff + 1;
    let dim = params.n_configs() * n_quanta;
    if dim > MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            limit: MAX_DIM,
        });
    }
    let h = fock_hamiltonian(params, n_quanta, Frame::Rotated);
    let eig = symmetric_eigen(&h)?;
    let pi = parity_matrix(params, n_quanta);

    let n = dim;
    let mut vectors = eig.eigenvectors;
    let energies = eig.eigenvalues;

    // Parity-purify within near-degenerate clusters, widening the cluster
    // threshold if mixing survives; the eigensolver can blur vectors across
    // gaps far larger than its eigenvalue accuracy near the top of dense
    // spectra.
    let mut parities: Option<Vec<ParitySector>> = None;
    for cluster_tol in [1e-6, 1e-4, 1e-2] {
        let mut pass = Vec::with_capacity(n);
        let mut pure = true;
        let mut start = 0usize;
        while start < n {
            let mut end = start + 1;
            while end < n
                && (energies[end] - energies[end - 1]).abs()
                    < cluster_tol * (1.0 + energies[end].abs())
            {
                end += 1;
            }
            let width = end - start;
            if width > 1 {
                let sub = vectors.columns(start, width).clone_owned();
                let p_sub = sub.transpose() * &pi * &sub;
                let p_eig = symmetric_eigen(&p_sub)?;
                let rotated = &sub * &p_eig.eigenvectors;
                for local in 0..width {
                    let mut col: Vec<f64> = rotated.column(local).iter().copied().collect();
                    linalg::fix_sign(&mut col);
                    for (r, &x) in col.iter().enumerate() {
                        vectors[(r, start + local)] = x;
                    }
                }
            }
            for k in start..end {
                let v = vectors.column(k);
                let expect = (v.transpose() * &pi * v)[(0, 0)];
                if (expect.abs() - 1.0).abs() > 1e-6 {
                    pure = false;
                }
                pass.push(expect);
            }
            start = end;
        }
        if pure {
            let mut out = Vec::with_capacity(n);
            for e in pass {
                out.push(parity_from_expectation(e, photon_cutoff)?);
            }
            parities = Some(out);
            break;
        }
    }
    let parities = match parities {
        Some(p) => p,
        None => {
            // report the worst offender
            let mut worst = 1.0f64;
            for k in 0..n {
                let v = vectors.column(k);
                let expect = (v.transpose() * &pi * v)[(0, 0)];
                if (expect.abs() - 1.0).abs() > (worst.abs() - 1.0).abs() {
                    worst = expect;
                }
            }
            return Err(Error::CutoffTooSmall {
                cutoff: photon_cutoff,
                reason: format!("parity expectation {worst} not within 1e-6 of ±1"),
            });
        }
    };

    Ok(FockEigensystem {
        params: params.clone(),
        n_quanta,
        energies,
        parities,
        vectors,
    })
}

fn parity_from_expectation(expect: f64, cutoff: usize) -> Result<ParitySector> {
    if (expect - 1.0).abs() <= 1e-6 {
        Ok(ParitySector::Even)
    } else if (expect + 1.0).abs() <= 1e-6 {
        Ok(ParitySector::Odd)
    } else {
        Err(Error::CutoffTooSmall {
            cutoff,
            reason: format!("parity expectation {expect} not within 1e-6 of ±1"),
        })
    }
}

/// Brute-force oracle spectrum in the product basis.
pub fn solve_fock_oracle(params: &ModelParams, photon_cutoff: usize) -> Result<SpectrumResult> {
    Ok(fock_eigensystem(params, photon_cutoff)?.spectrum())
}

/// Photon-cutoff heuristic covering the Poisson tails of displaced and
/// coherent preparations: `M = ceil((|z|+β)² + 8(|z|+β) + 20)`.
pub fn photon_cutoff_heuristic(params: &ModelParams, coherent_amplitude: f64) -> usize {
    let r = coherent_amplitude.abs() + params.beta_max();
    (r * r + 8.0 * r + 20.0).ceil() as usize
}

/// Fock-basis amplitudes `<k|m>_A` of the displaced number state with
/// displacement β, for `k = 0..n_quanta`.
pub fn displaced_number_column(beta: f64, m: usize, n_quanta: usize) -> Vec<f64> {
    (0..n_quanta)
        .map(|k| displaced_overlap(k, m, -beta))
        .collect()
}

/// Unfold a parity-folded displaced-basis state into the plain Fock basis.
///
/// Kept amplitudes enter with the bookkeeping factor 1/√2 and the eliminated
/// partners with `κ(-1)^m/√2`; each displaced number state is expanded with
/// the overlap kernel at `β_ij = -β_config`. Errors when the cutoff loses
/// more than 1e-4 of the norm.
pub fn to_fock_representation(
    params: &ModelParams,
    state: &QuantumState,
    n_quanta: usize,
) -> Result<QuantumState> {
    if state.basis() != StateBasis::DisplacedFolded {
        // already plain Fock: pad to the requested grid
        return state.with_quanta(n_quanta);
    }
    let kappa = state
        .parity()
        .ok_or_else(|| Error::BasisMismatch("folded state needs a parity label".into()))?;
    let nc = params.n_configs();
    let mask = nc as u32 - 1;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = QuantumState::fock_zero(params, state.frame(), n_quanta);
    let mut amps = vec![Complex64::new(0.0, 0.0); nc * n_quanta];
    for (i, cfg) in state.configs().iter().enumerate() {
        let kept_c = params.config_index(cfg.bits());
        let partner_c = params.config_index(!cfg.bits() & mask);
        for m in 0..state.n_quanta() {
            let d = state.amp(i, m);
            if d == Complex64::new(0.0, 0.0) {
                continue;
            }
            let kept_col = displaced_number_column(cfg.beta(), m, n_quanta);
            let sign = kappa.partner_sign(m);
            for (k, &x) in kept_col.iter().enumerate() {
                amps[k * nc + kept_c] += d * inv_sqrt2 * x;
                // β_partner = -β: <k|m>_{-A} = (-1)^(k+m) <k|m>_A
                let flip = if (k + m) % 2 == 0 { 1.0 } else { -1.0 };
                amps[k * nc + partner_c] += d * inv_sqrt2 * sign * flip * x;
            }
        }
    }
    for k in 0..n_quanta {
        for c in 0..nc {
            out.set_amp(c, k, amps[k * nc + c]);
        }
    }
    out.set_parity(Some(kappa));
    let input_norm = state.norm();
    let loss = (input_norm * input_norm - out.norm() * out.norm()).abs();
    if loss > 1e-4 {
        return Err(Error::CutoffTooSmall {
            cutoff: n_quanta - 1,
            reason: format!("norm loss {loss:e} converting to the Fock basis"),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_qubit(omega1: f64, omega2: f64, g1: f64, g2: f64) -> ModelParams {
        ModelParams::two_qubit(omega1, omega2, g1, g2).unwrap()
    }

    #[test]
    fn folded_diagonal_entries() {
        let p = two_qubit(0.25, 0.25, 0.1, 0.1);
        let trunc = Truncation {
            n_tr: 4,
            element_tol: 1e-6,
        };
        let h = build_folded_hamiltonian(&p, ParitySector::Even, &trunc).unwrap();
        // (i=0, m=0): β1 = 0.2 → ε = -0.04
        assert_abs_diff_eq!(
            h.matrix[(h.index(0, 0), h.index(0, 0))],
            -0.04,
            epsilon = 1e-15
        );
        // (i=1, m=0): β2 = 0 → ε = 0
        assert_abs_diff_eq!(
            h.matrix[(h.index(0, 1), h.index(0, 1))],
            0.0,
            epsilon = 1e-15
        );
        // (i=0, m=3): 3 - 0.04
        assert_abs_diff_eq!(
            h.matrix[(h.index(3, 0), h.index(3, 0))],
            2.96,
            epsilon = 1e-14
        );
        // exactly symmetric by construction
        for a in 0..h.dim() {
            for b in 0..a {
                assert_eq!(h.matrix[(a, b)], h.matrix[(b, a)]);
            }
        }
    }

    #[test]
    fn folded_decoupled_is_block_diagonal() {
        let p = two_qubit(0.3, 0.7, 0.0, 0.0);
        let trunc = Truncation {
            n_tr: 6,
            element_tol: 1e-6,
        };
        let h = build_folded_hamiltonian(&p, ParitySector::Odd, &trunc).unwrap();
        for a in 0..h.dim() {
            for b in 0..h.dim() {
                let (ma, mb) = (a / 2, b / 2);
                if ma != mb {
                    assert_eq!(h.matrix[(a, b)], 0.0);
                }
            }
        }
    }

    #[test]
    fn dimension_guard() {
        let p = two_qubit(0.25, 0.25, 0.1, 0.1);
        let trunc = Truncation {
            n_tr: 150_000,
            element_tol: 1e-6,
        };
        assert!(matches!(
            build_folded_hamiltonian(&p, ParitySector::Even, &trunc),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn folded_elements_match_fock_sandwich() {
        // <u_im| H |u_jn> in the product basis must reproduce the folded
        // matrix elements, u being the unfolded unit coefficient vectors.
        let p = two_qubit(0.25, 0.4, 0.12, 0.18);
        let trunc = Truncation {
            n_tr: 3,
            element_tol: 1e-6,
        };
        let n_quanta = 40;
        let h_fock = fock_hamiltonian(&p, n_quanta, Frame::Rotated);
        for kappa in ParitySector::BOTH {
            let folded = build_folded_hamiltonian(&p, kappa, &trunc).unwrap();
            let dim = folded.dim();
            let mut us = Vec::new();
            for a in 0..dim {
                let mut coeffs = vec![0.0; dim];
                coeffs[a] = 1.0;
                let st = QuantumState::folded(&p, kappa, Frame::Rotated, &coeffs).unwrap();
                let fock = to_fock_representation(&p, &st, n_quanta).unwrap();
                us.push(nalgebra::DVector::from_iterator(
                    4 * n_quanta,
                    fock.amps().iter().map(|z| z.re),
                ));
            }
            for a in 0..dim {
                for b in 0..dim {
                    let sandwich = (us[a].transpose() * &h_fock * &us[b])[(0, 0)];
                    assert_abs_diff_eq!(sandwich, folded.matrix[(a, b)], epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn ed_ground_matches_oracle() {
        let p = two_qubit(0.25, 0.25, 0.3, 0.3);
        let trunc = Truncation::default();
        let ed = solve_ed(&p, ParitySector::Even, &trunc).unwrap();
        let oracle = solve_fock_oracle(&p, 120).unwrap();
        let oracle_even: Vec<f64> = oracle.sector_energies(ParitySector::Even);
        assert_abs_diff_eq!(ed.levels[0].energy, oracle_even[0], epsilon = 1e-6);
    }

    #[test]
    fn ed_contains_exact_singlet_levels() {
        // identical homogeneous qubits: E = 0 in the odd sector,
        // E = ω_c in the even sector
        let p = two_qubit(0.25, 0.25, 0.15, 0.15);
        let trunc = Truncation::default();
        let odd = solve_ed(&p, ParitySector::Odd, &trunc).unwrap();
        let even = solve_ed(&p, ParitySector::Even, &trunc).unwrap();
        let d0 = odd
            .energies()
            .iter()
            .map(|e| (e - 0.0).abs())
            .fold(f64::MAX, f64::min);
        let d1 = even
            .energies()
            .iter()
            .map(|e| (e - 1.0).abs())
            .fold(f64::MAX, f64::min);
        assert!(d0 < 1e-8, "odd sector misses E=0 by {d0:e}");
        assert!(d1 < 1e-8, "even sector misses E=1 by {d1:e}");
    }

    #[test]
    fn ed_spectrum_symmetric_about_beta1_half() {
        // g1 fixed: spectrum at g2 = x equals spectrum at g2 = -x
        let trunc = Truncation {
            n_tr: 32,
            element_tol: 1e-6,
        };
        for x in [0.1, 0.25] {
            let plus = solve_ed_both(&two_qubit(0.25, 0.25, 0.3, x), &trunc).unwrap();
            let minus = solve_ed_both(&two_qubit(0.25, 0.25, 0.3, -x), &trunc).unwrap();
            for (a, b) in plus.energies().iter().zip(minus.energies()).take(12) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn g_sign_invariance() {
        let trunc = Truncation {
            n_tr: 40,
            element_tol: 1e-6,
        };
        let base = two_qubit(0.25, 0.4, 0.2, 0.35);
        let spectra: Vec<Vec<f64>> = [
            base.clone(),
            base.with_flipped_coupling(1),
            base.with_flipped_coupling(2),
        ]
        .iter()
        .map(|p| solve_ed_both(p, &trunc).unwrap().energies())
        .collect();
        for ((a, b), c) in spectra[0].iter().zip(&spectra[1]).zip(&spectra[2]).take(20) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-9);
            assert_abs_diff_eq!(*a, *c, epsilon = 1e-9);
        }
    }

    #[test]
    fn oracle_decoupled_energies() {
        let p = two_qubit(0.3, 0.5, 0.0, 0.0);
        let spec = solve_fock_oracle(&p, 8).unwrap();
        let mut want = Vec::new();
        for m in 0..=8 {
            for s1 in [-1.0, 1.0] {
                for s2 in [-1.0, 1.0] {
                    want.push(m as f64 + s1 * 0.15 + s2 * 0.25);
                }
            }
        }
        want.sort_by(f64::total_cmp);
        for (got, want) in spec.energies().iter().zip(want).take(16) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
        }
    }

    #[test]
    fn oracle_rabi_degenerate_displaced_oscillator() {
        // N=1 with ω1 = 0: E = nω_c - g²/ω_c, doubly degenerate
        let p = ModelParams::single_qubit(0.0, 0.3).unwrap();
        let spec = solve_fock_oracle(&p, 60).unwrap();
        let e = spec.energies();
        for n in 0..6 {
            let want = n as f64 - 0.09;
            assert_abs_diff_eq!(e[2 * n], want, epsilon = 1e-8);
            assert_abs_diff_eq!(e[2 * n + 1], want, epsilon = 1e-8);
        }
    }

    #[test]
    fn parity_commutes_with_hamiltonian() {
        let p = two_qubit(0.25, 0.4, 0.2, 0.3);
        let n_quanta = 30;
        let h = fock_hamiltonian(&p, n_quanta, Frame::Rotated);
        let pi = parity_matrix(&p, n_quanta);
        let comm = &h * &pi - &pi * &h;
        assert!(comm.amax() <= 1e-12, "commutator norm {}", comm.amax());
        // Π is an involution
        let prod = &pi * &pi;
        assert!((prod - DMatrix::<f64>::identity(h.nrows(), h.nrows())).amax() == 0.0);
    }

    #[test]
    fn folded_and_oracle_spectra_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let trunc = Truncation::default();
        for _ in 0..6 {
            let p = two_qubit(
                rng.gen_range(0.0..0.5),
                rng.gen_range(0.0..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
            );
            let folded = solve_ed_both(&p, &trunc).unwrap();
            let oracle = solve_fock_oracle(&p, 120).unwrap();
            for (a, b) in folded.energies().iter().zip(oracle.energies()).take(20) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn truncation_monotonicity() {
        let p = two_qubit(0.25, 0.25, 0.3, 0.45);
        let solve = |n_tr: usize| {
            solve_ed_both(
                &p,
                &Truncation {
                    n_tr,
                    element_tol: 1e-6,
                },
            )
            .unwrap()
            .energies()
        };
        let (e24, e48, e72) = (solve(24), solve(48), solve(72));
        for k in 0..12 {
            assert!((e24[k] - e48[k]).abs() <= 1e-8, "24->48 moved level {k}");
            assert!((e48[k] - e72[k]).abs() <= 1e-8, "48->72 moved level {k}");
        }
    }

    #[test]
    fn to_fock_zero_displacement_is_identity() {
        let p = two_qubit(0.3, 0.4, 0.0, 0.0);
        let mut coeffs = vec![0.0; 2 * 5];
        coeffs[2 * 3 + 1] = 1.0; // (i=1, m=3)
        let st = QuantumState::folded(&p, ParitySector::Even, Frame::Rotated, &coeffs).unwrap();
        let fock = to_fock_representation(&p, &st, 8).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // kept |10>|3> and partner |01>|3> with κ(-1)^3 = -1
        assert_abs_diff_eq!(fock.amp(1, 3).re, s, epsilon = 1e-14);
        assert_abs_diff_eq!(fock.amp(2, 3).re, -s, epsilon = 1e-14);
        assert_abs_diff_eq!(fock.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn to_fock_displaced_vacuum_is_poissonian() {
        let p = two_qubit(0.3, 0.4, 0.25, 0.25); // β1 = 0.5, β2 = 0
        let mut coeffs = vec![0.0; 2 * 3];
        coeffs[0] = 1.0; // (i=0, m=0), β = 0.5
        let st = QuantumState::folded(&p, ParitySector::Even, Frame::Rotated, &coeffs).unwrap();
        let fock = to_fock_representation(&p, &st, 25).unwrap();
        let beta = 0.5f64;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for k in 0..10 {
            let want = s * (-beta * beta / 2.0).exp() * (-beta).powi(k as i32)
                / (crate::model::ln_factorial(k) / 2.0).exp();
            assert_abs_diff_eq!(fock.amp(0, k).re, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn ed_vector_rayleigh_quotient_matches_oracle() {
        let p = two_qubit(0.25, 0.25, 0.2, 0.1);
        let trunc = Truncation::default();
        let n_quanta = 100;
        let h = fock_hamiltonian(&p, n_quanta, Frame::Rotated);
        for kappa in ParitySector::BOTH {
            let ed = solve_ed(&p, kappa, &trunc).unwrap();
            for level in ed.levels.iter().take(4) {
                let st =
                    QuantumState::folded(&p, kappa, Frame::Rotated, level.coeffs.as_ref().unwrap())
                        .unwrap();
                let fock = to_fock_representation(&p, &st, n_quanta).unwrap();
                let v = nalgebra::DVector::from_iterator(
                    4 * n_quanta,
                    fock.amps().iter().map(|z| z.re),
                );
                let rq = (v.transpose() * &h * &v)[(0, 0)] / v.norm_squared();
                assert_abs_diff_eq!(rq, level.energy, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn to_fock_cutoff_error() {
        let p = two_qubit(0.25, 0.25, 0.6, 0.6); // β1 = 1.2
        let mut coeffs = vec![0.0; 2 * 13];
        coeffs[2 * 12] = 1.0; // m = 12 at β = 1.2 needs far more than 14 quanta
        let st = QuantumState::folded(&p, ParitySector::Even, Frame::Rotated, &coeffs).unwrap();
        assert!(matches!(
            to_fock_representation(&p, &st, 14),
            Err(Error::CutoffTooSmall { .. })
        ));
    }
}
