//! Two-qubit entanglement for the Bell preparation
//! `(|11> + |00>)|z>/√2`: the analytic reduced density matrix in the σ^x
//! product eigenbasis, its closed-form concurrence, the general Wootters
//! concurrence, and an exact partial-trace oracle.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::analytic::ZerothBlock;
use crate::dynamics::{
    poisson_weights, propagate_with, tau_to_t, DynamicsTrace, Observable, TraceMethod,
};
use crate::error::{Error, Result};
use crate::exact::{fock_eigensystem, photon_cutoff_heuristic};
use crate::linalg::hermitian_eigen;
use crate::model::{ModelParams, ParitySector};
use crate::state::{Frame, QuantumState};

/// Default Poisson cutoff for the analytic sums.
pub const DEFAULT_M_CUTOFF: usize = 30;

/// Method tag of a reduced density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityMethod {
    Analytic,
    Oracle,
}

/// Reduced two-qubit density matrix in the σ^x product eigenbasis, ordered
/// `|ee>, |eg>, |ge>, |gg>` with `|e> = (|1>+|0>)/√2`, `|g> = (|1>-|0>)/√2`.
#[derive(Debug, Clone)]
pub struct ReducedDensity {
    pub matrix: DMatrix<Complex64>,
    /// Plain time in units of 1/ω_c.
    pub time: f64,
    pub method: DensityMethod,
}

impl ReducedDensity {
    pub fn trace(&self) -> Complex64 {
        self.matrix.diagonal().iter().sum()
    }
}

/// The per-block coefficients of the reduced density matrix, all unity at
/// t = 0:
/// `q1^± = 1 ∓ 4ξ(ξ²-1)sin²(θt)/(ξ²+1)²`,
/// `q2^± = 1 - 8ξ²sin²(θt)/(ξ²+1)² ± 2iξ sin(2θt)/(ξ²+1)`,
/// with ξ = ξ_m^{κ+}.
#[derive(Debug, Clone, Copy)]
pub struct QCoefficients {
    pub q1_plus: Complex64,
    pub q1_minus: Complex64,
    pub q2_plus: Complex64,
    pub q2_minus: Complex64,
}

/// Evaluate the q coefficients of block `(m, κ)` at plain time `t`. The
/// degenerate ξ → {0, ∞} limit freezes the block (all coefficients 1).
pub fn q_coefficients(
    params: &ModelParams,
    m: usize,
    kappa: ParitySector,
    t: f64,
) -> Result<QCoefficients> {
    let block = ZerothBlock::new(params, kappa, m)?;
    let xi = block.xi_plus;
    let theta = block.theta;
    let (r, uv) = if xi.is_infinite() {
        (0.0, 0.0)
    } else {
        let u = 1.0 / (1.0 + xi * xi);
        (xi * u, (xi * xi - 1.0) * u)
    };
    let s = (theta * t).sin();
    let s2 = s * s;
    let a1 = 4.0 * r * uv * s2; // 4ξ(ξ²-1)sin²/(ξ²+1)²
    let re2 = 1.0 - 8.0 * r * r * s2;
    let im2 = 2.0 * r * (2.0 * theta * t).sin();
    Ok(QCoefficients {
        q1_plus: Complex64::new(1.0 - a1, 0.0),
        q1_minus: Complex64::new(1.0 + a1, 0.0),
        q2_plus: Complex64::new(re2, im2),
        q2_minus: Complex64::new(re2, -im2),
    })
}

/// Parity weight `(1 + κ(-1)^m)/4` of the Bell preparation.
fn bell_weight(kappa: ParitySector, m: usize) -> f64 {
    0.25 * (1.0 + kappa.partner_sign(m))
}

/// Analytic reduced density matrix
/// `ρ_Q(t) = Σ_m Σ_κ p(m)(1+κ(-1)^m)/4 ·
///  [q1⁺|ee><ee| + q2⁺|ee><gg| + q2⁻|gg><ee| + q1⁻|gg><gg|]`.
pub fn reduced_density_analytic(
    params: &ModelParams,
    z: f64,
    m_cutoff: usize,
    t: f64,
) -> Result<ReducedDensity> {
    let weights = poisson_weights(z, m_cutoff)?;
    let mut rho = DMatrix::<Complex64>::zeros(4, 4);
    for (m, &w) in weights.iter().enumerate() {
        for kappa in ParitySector::BOTH {
            let wk = w * bell_weight(kappa, m);
            if wk == 0.0 {
                continue;
            }
            let q = q_coefficients(params, m, kappa, t)?;
            rho[(0, 0)] += wk * q.q1_plus;
            rho[(0, 3)] += wk * q.q2_plus;
            rho[(3, 0)] += wk * q.q2_minus;
            rho[(3, 3)] += wk * q.q1_minus;
        }
    }
    Ok(ReducedDensity {
        matrix: rho,
        time: t,
        method: DensityMethod::Analytic,
    })
}

/// Closed-form concurrence
/// `C(t) = |Σ_m Σ_κ p(m)(1+κ(-1)^m)/2 · q2_m^{κ+}|`, clamped to [0, 1].
pub fn concurrence_analytic(params: &ModelParams, z: f64, m_cutoff: usize, t: f64) -> Result<f64> {
    let weights = poisson_weights(z, m_cutoff)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for (m, &w) in weights.iter().enumerate() {
        for kappa in ParitySector::BOTH {
            let wk = 2.0 * w * bell_weight(kappa, m);
            if wk == 0.0 {
                continue;
            }
            sum += wk * q_coefficients(params, m, kappa, t)?.q2_plus;
        }
    }
    Ok(sum.norm().clamp(0.0, 1.0))
}

/// Analytic concurrence trace on a `ω₁t/2π` grid.
pub fn concurrence_analytic_trace(
    params: &ModelParams,
    z: f64,
    m_cutoff: usize,
    times: &[f64],
) -> Result<DynamicsTrace> {
    let mut values = Vec::with_capacity(times.len());
    for &tau in times {
        values.push(concurrence_analytic(
            params,
            z,
            m_cutoff,
            tau_to_t(params, tau)?,
        )?);
    }
    Ok(DynamicsTrace {
        times: times.to_vec(),
        values,
        observable: Observable::Concurrence,
        method: TraceMethod::Analytic,
    })
}

/// σ_y ⊗ σ_y in the product basis ordering `|11>, |10>, |01>, |00>` (the
/// same anti-diagonal in any local product basis).
fn spin_flip() -> DMatrix<Complex64> {
    let mut f = DMatrix::<Complex64>::zeros(4, 4);
    f[(0, 3)] = Complex64::new(-1.0, 0.0);
    f[(1, 2)] = Complex64::new(1.0, 0.0);
    f[(2, 1)] = Complex64::new(1.0, 0.0);
    f[(3, 0)] = Complex64::new(-1.0, 0.0);
    f
}

/// Wootters concurrence `C = max(0, λ₁-λ₂-λ₃-λ₄)` with λ the descending
/// square roots of the eigenvalues of `ρ·(σ_y⊗σ_y)ρ*(σ_y⊗σ_y)`.
///
/// Evaluated as the singular values of the complex symmetric matrix
/// `τ = Wᵀ(σ_y⊗σ_y)W` with `ρ = WW†`: mathematically identical, but the
/// small λ's come out with absolute error ~ε instead of ~√ε. Rejects
/// non-PSD input beyond 1e-8.
pub fn wootters_concurrence(rho: &ReducedDensity) -> Result<f64> {
    let m = &rho.matrix;
    if m.nrows() != 4 || m.ncols() != 4 {
        return Err(Error::InvalidParams(
            "concurrence needs a 4x4 density matrix".into(),
        ));
    }
    let (vals, vecs) = hermitian_eigen(m)?;
    if vals[0] < -1e-8 {
        return Err(Error::NotPositive {
            min_eigenvalue: vals[0],
        });
    }
    let sqrt_diag = DMatrix::<Complex64>::from_diagonal(&nalgebra::DVector::from_iterator(
        4,
        vals.iter().map(|&x| Complex64::new(x.max(0.0).sqrt(), 0.0)),
    ));
    let w = &vecs * sqrt_diag;
    let tau = w.transpose() * spin_flip() * &w;
    let mut lams: Vec<f64> = tau
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    lams.sort_by(|a, b| b.total_cmp(a));
    Ok((lams[0] - lams[1] - lams[2] - lams[3]).max(0.0))
}

/// Exact reduced density matrix: propagate the Bell ⊗ coherent preparation
/// in the product basis, trace out the field, rotate the qubit basis to the
/// σ^x eigenvectors.
pub fn reduced_density_oracle(
    params: &ModelParams,
    z: f64,
    t: f64,
    photon_cutoff: usize,
) -> Result<ReducedDensity> {
    let w1 = params.omega(1);
    if w1 <= 0.0 {
        return Err(Error::InvalidParams("time unit 2π/ω₁ needs ω₁ > 0".into()));
    }
    let tau = t * w1 / (2.0 * std::f64::consts::PI);
    let mut traces = oracle_density_trace(params, z, &[tau], photon_cutoff)?;
    Ok(traces.pop().expect("one time requested"))
}

/// Oracle reduced densities over a `ω₁t/2π` grid, sharing one
/// eigendecomposition.
pub fn oracle_density_trace(
    params: &ModelParams,
    z: f64,
    times: &[f64],
    photon_cutoff: usize,
) -> Result<Vec<ReducedDensity>> {
    if params.n_qubits() != 2 {
        return Err(Error::InvalidParams("reduced density is two-qubit".into()));
    }
    let eig = fock_eigensystem(params, photon_cutoff)?;
    let initial = bell_initial_state(params, z, photon_cutoff)?;
    let states = propagate_with(&eig, &initial, times)?;
    let basis_change = x_basis_change();
    let mut out = Vec::with_capacity(states.len());
    for (st, &tau) in states.iter().zip(times) {
        let mut rho_z = DMatrix::<Complex64>::zeros(4, 4);
        for k in 0..st.n_quanta() {
            for a in 0..4 {
                for b in 0..4 {
                    rho_z[(a, b)] += st.amp(a, k) * st.amp(b, k).conj();
                }
            }
        }
        let rho_x = basis_change.adjoint() * rho_z * &basis_change;
        out.push(ReducedDensity {
            matrix: rho_x,
            time: tau_to_t(params, tau)?,
            method: DensityMethod::Oracle,
        });
    }
    Ok(out)
}

/// Concurrence of the oracle densities as a trace.
pub fn concurrence_oracle_trace(
    params: &ModelParams,
    z: f64,
    times: &[f64],
    photon_cutoff: usize,
) -> Result<DynamicsTrace> {
    let densities = oracle_density_trace(params, z, times, photon_cutoff)?;
    let values = densities
        .iter()
        .map(wootters_concurrence)
        .collect::<Result<Vec<f64>>>()?;
    Ok(DynamicsTrace {
        times: times.to_vec(),
        values,
        observable: Observable::Concurrence,
        method: TraceMethod::Oracle,
    })
}

/// Default photon cutoff for the oracle at coherent amplitude z.
pub fn oracle_cutoff(params: &ModelParams, z: f64) -> usize {
    photon_cutoff_heuristic(params, z)
}

/// `(|11> + |00>)|z>/√2` in the plain Fock basis.
pub fn bell_initial_state(
    params: &ModelParams,
    z: f64,
    photon_cutoff: usize,
) -> Result<QuantumState> {
    let n_quanta = photon_cutoff + 1;
    let mut psi = QuantumState::fock_zero(params, Frame::Rotated, n_quanta);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    if z == 0.0 {
        psi.set_amp(0, 0, Complex64::new(s, 0.0));
        psi.set_amp(3, 0, Complex64::new(s, 0.0));
        return Ok(psi);
    }
    let ln_abs = z.abs().ln();
    let mut sum = 0.0;
    for k in 0..n_quanta {
        let mag = (-z * z / 2.0 + k as f64 * ln_abs - 0.5 * crate::model::ln_factorial(k)).exp();
        let amp = if z < 0.0 && k % 2 == 1 { -mag } else { mag };
        psi.set_amp(0, k, Complex64::new(s * amp, 0.0));
        psi.set_amp(3, k, Complex64::new(s * amp, 0.0));
        sum += amp * amp;
    }
    if 1.0 - sum > 1e-6 {
        return Err(Error::CutoffTooSmall {
            cutoff: photon_cutoff,
            reason: format!("coherent norm deficit {:e} at amplitude {z}", 1.0 - sum),
        });
    }
    Ok(psi)
}

/// Single-qubit basis change from the σ^z basis `(|1>, |0>)` to the σ^x
/// eigenbasis `(|e>, |g>)`, extended to two qubits.
fn x_basis_change() -> DMatrix<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let t = nalgebra::Matrix2::new(s, s, s, -s);
    let mut out = DMatrix::<Complex64>::zeros(4, 4);
    for a2 in 0..2 {
        for a1 in 0..2 {
            for b2 in 0..2 {
                for b1 in 0..2 {
                    // index 0 = up ("1"/"e"), 1 = down ("0"/"g")
                    let row = a2 * 2 + a1;
                    let col = b2 * 2 + b1;
                    out[(row, col)] = Complex64::new(t[(a2, b2)] * t[(a1, b1)], 0.0);
                }
            }
        }
    }
    out
}
