//! Time evolution of qubit observables for displaced-coherent preparations:
//! single-block probabilities, Poisson-weighted traces, the population
//! inversion, the closed-form collapse–revival series, and an exact
//! propagation oracle built on the product-basis eigensystem.
//!
//! Trace grids are in units of `ω₁t/2π`; block-level functions take plain
//! time in units of `1/ω_c`.

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::ZerothBlock;
use crate::error::{Error, Result};
use crate::exact::{fock_eigensystem, FockEigensystem};
use crate::model::{kept_configs, ln_factorial, ModelParams, ParitySector};
use crate::parallel::map_ordered;
use crate::state::{Frame, QuantumState, StateBasis};

/// Coherent-state preparation: the oscillator starts in the displaced
/// coherent state attached to the initial spin configuration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoherentPrep {
    /// Coherent amplitude z ≥ 0.
    pub z: f64,
    /// Initial spin configuration bits (default `|10>`).
    pub initial_bits: u32,
    /// Poisson cutoff: blocks `m = 0..=m_cutoff` enter the sums.
    pub m_cutoff: usize,
}

impl CoherentPrep {
    pub fn new(z: f64) -> Self {
        Self {
            z,
            initial_bits: 0b10,
            m_cutoff: 30,
        }
    }

    pub fn with_m_cutoff(mut self, m_cutoff: usize) -> Self {
        self.m_cutoff = m_cutoff;
        self
    }
}

/// Which observable a trace records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Observable {
    P11,
    P10,
    P01,
    P00,
    Inversion,
    Concurrence,
}

impl Observable {
    pub fn label(&self) -> &'static str {
        match self {
            Observable::P11 => "p11",
            Observable::P10 => "p10",
            Observable::P01 => "p01",
            Observable::P00 => "p00",
            Observable::Inversion => "inversion",
            Observable::Concurrence => "concurrence",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "p11" => Ok(Observable::P11),
            "p10" => Ok(Observable::P10),
            "p01" => Ok(Observable::P01),
            "p00" => Ok(Observable::P00),
            "inversion" => Ok(Observable::Inversion),
            "concurrence" => Ok(Observable::Concurrence),
            _ => Err(Error::InvalidParams(format!("unknown observable '{s}'"))),
        }
    }
}

/// How a trace was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TraceMethod {
    Zeroth,
    ClosedForm,
    Oracle,
    /// The zeroth-order-based closed form of the concurrence.
    Analytic,
}

impl TraceMethod {
    pub fn label(&self) -> &'static str {
        match self {
            TraceMethod::Zeroth => "zeroth",
            TraceMethod::ClosedForm => "closed-form",
            TraceMethod::Oracle => "oracle",
            TraceMethod::Analytic => "analytic",
        }
    }
}

/// Sampled observable trace; `times` are in units of `ω₁t/2π`.
#[derive(Debug, Clone)]
pub struct DynamicsTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub observable: Observable,
    pub method: TraceMethod,
}

/// Uniform grid of `samples` points over `[0, tau_max]` in `ω₁t/2π` units.
pub fn time_grid(tau_max: f64, samples: usize) -> Vec<f64> {
    if samples < 2 {
        return vec![0.0];
    }
    (0..samples)
        .map(|i| tau_max * i as f64 / (samples - 1) as f64)
        .collect()
}

/// Plain time from a grid value in `ω₁t/2π` units.
pub fn tau_to_t(params: &ModelParams, tau: f64) -> Result<f64> {
    let w1 = params.omega(1);
    if w1 <= 0.0 {
        return Err(Error::InvalidParams("time unit 2π/ω₁ needs ω₁ > 0".into()));
    }
    Ok(tau * 2.0 * std::f64::consts::PI / w1)
}

/// All block-m quantities entering the probability formulas.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BlockDynamics {
    /// θ_m^κ for κ = even, odd.
    theta_even: f64,
    theta_odd: f64,
    /// c_{1m}^κ = ξ^{κ+}/(1 + (ξ^{κ+})²).
    c1_even: f64,
    c1_odd: f64,
    /// c_{2m}.
    c2: f64,
}

fn c1_from_xi(xi: f64) -> f64 {
    if xi.is_infinite() {
        0.0
    } else {
        xi / (1.0 + xi * xi)
    }
}

fn u_from_xi(xi: f64) -> f64 {
    if xi.is_infinite() {
        0.0
    } else {
        1.0 / (1.0 + xi * xi)
    }
}

impl BlockDynamics {
    pub(crate) fn new(params: &ModelParams, m: usize) -> Result<Self> {
        let even = ZerothBlock::new(params, ParitySector::Even, m)?;
        let odd = ZerothBlock::new(params, ParitySector::Odd, m)?;
        let (ue, uo) = (u_from_xi(even.xi_plus), u_from_xi(odd.xi_plus));
        Ok(Self {
            theta_even: even.theta,
            theta_odd: odd.theta,
            c1_even: c1_from_xi(even.xi_plus),
            c1_odd: c1_from_xi(odd.xi_plus),
            c2: ue * (1.0 - uo) + (1.0 - ue) * uo,
        })
    }

    /// D_m = 2c₁⁺c₁⁻ + c₂.
    pub(crate) fn d_m(&self) -> f64 {
        2.0 * self.c1_even * self.c1_odd + self.c2
    }

    fn probability(&self, obs: Observable, t: f64) -> f64 {
        let (te, to) = (self.theta_even, self.theta_odd);
        let diff = ((te - to) * t).cos();
        let sum = ((te + to) * t).cos();
        match obs {
            Observable::P10 | Observable::P01 => {
                let breathing = self.c1_even * self.c1_even * ((2.0 * te * t).cos() - 1.0)
                    + self.c1_odd * self.c1_odd * ((2.0 * to * t).cos() - 1.0);
                let cross = (1.0 - self.c2) * diff + self.c2 * sum;
                match obs {
                    Observable::P10 => 0.5 * (1.0 + breathing + cross),
                    _ => 0.5 * (1.0 + breathing - cross),
                }
            }
            Observable::P11 | Observable::P00 => {
                let se = (te * t).sin();
                let so = (to * t).sin();
                let direct =
                    self.c1_even * self.c1_even * se * se + self.c1_odd * self.c1_odd * so * so;
                let cross = self.c1_even * self.c1_odd * (diff - sum);
                match obs {
                    Observable::P11 => direct + cross,
                    _ => direct - cross,
                }
            }
            Observable::Inversion => {
                let d = self.d_m();
                (d - 1.0) * diff - d * sum
            }
            Observable::Concurrence => f64::NAN,
        }
    }
}

/// Probability of remaining in `|10>|m>_{A₂}` at plain time `t`:
/// four oscillating terms at frequencies `2θ^κ` and `θ⁺ ± θ⁻`.
pub fn p10_block(params: &ModelParams, m: usize, t: f64) -> Result<f64> {
    Ok(BlockDynamics::new(params, m)?.probability(Observable::P10, t))
}

/// Any of the four product-state probabilities of one block.
pub fn probability_block(params: &ModelParams, m: usize, obs: Observable, t: f64) -> Result<f64> {
    match obs {
        Observable::Inversion | Observable::Concurrence => Err(Error::InvalidParams(
            "probability_block takes the four P_ss' only".into(),
        )),
        _ => Ok(BlockDynamics::new(params, m)?.probability(obs, t)),
    }
}

/// Poisson weights `p(m) = e^{-z²} z^{2m}/m!` up to `m_cutoff`, renormalized
/// over the truncated range so the t = 0 anchors are exact. Errors when the
/// raw tail beyond the cutoff exceeds 1e-6.
pub fn poisson_weights(z: f64, m_cutoff: usize) -> Result<Vec<f64>> {
    let lam = z * z;
    let mut w = Vec::with_capacity(m_cutoff + 1);
    let mut pm = (-lam).exp();
    let mut sum = 0.0;
    for m in 0..=m_cutoff {
        w.push(pm);
        sum += pm;
        pm *= lam / (m + 1) as f64;
    }
    let deficit = 1.0 - sum;
    if deficit > 1e-6 {
        return Err(Error::CutoffTooSmall {
            cutoff: m_cutoff,
            reason: format!("Poisson weight deficit {deficit:e} at z = {z}"),
        });
    }
    for x in &mut w {
        *x /= sum;
    }
    Ok(w)
}

fn check_prep(params: &ModelParams, prep: &CoherentPrep) -> Result<()> {
    if params.n_qubits() != 2 {
        return Err(Error::InvalidParams(
            "coherent dynamics formulas are two-qubit".into(),
        ));
    }
    if prep.initial_bits != 0b10 {
        return Err(Error::InvalidParams(
            "closed-form dynamics are derived for the |10> preparation".into(),
        ));
    }
    Ok(())
}

/// Poisson-weighted single-block observable trace.
pub fn coherent_observable(
    params: &ModelParams,
    prep: &CoherentPrep,
    obs: Observable,
    times: &[f64],
) -> Result<DynamicsTrace> {
    if obs == Observable::Concurrence {
        return Err(Error::InvalidParams(
            "concurrence lives in the entanglement module".into(),
        ));
    }
    check_prep(params, prep)?;
    let weights = poisson_weights(prep.z, prep.m_cutoff)?;
    let blocks: Vec<BlockDynamics> = (0..=prep.m_cutoff)
        .map(|m| BlockDynamics::new(params, m))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(times.len());
    for &tau in times {
        let t = tau_to_t(params, tau)?;
        let v: f64 = weights
            .iter()
            .zip(&blocks)
            .map(|(w, b)| w * b.probability(obs, t))
            .sum();
        values.push(v);
    }
    Ok(DynamicsTrace {
        times: times.to_vec(),
        values,
        observable: obs,
        method: TraceMethod::Zeroth,
    })
}

/// Population inversion `<σ₁^z>(t)` of qubit 1 for the `|10>` preparation:
/// `Σ_m p(m){(D_m - 1)cos(θ⁺-θ⁻)t - D_m cos(θ⁺+θ⁻)t}`.
pub fn inversion(
    params: &ModelParams,
    prep: &CoherentPrep,
    times: &[f64],
) -> Result<DynamicsTrace> {
    check_prep(params, prep)?;
    let weights = poisson_weights(prep.z, prep.m_cutoff)?;
    let blocks: Vec<BlockDynamics> = (0..=prep.m_cutoff)
        .map(|m| BlockDynamics::new(params, m))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(times.len());
    for &tau in times {
        let t = tau_to_t(params, tau)?;
        let v: f64 = weights
            .iter()
            .zip(&blocks)
            .map(|(w, b)| w * b.probability(Observable::Inversion, t))
            .sum();
        values.push(v);
    }
    Ok(DynamicsTrace {
        times: times.to_vec(),
        values,
        observable: Observable::Inversion,
        method: TraceMethod::Zeroth,
    })
}

/// Oscillation equilibria of the coherent-preparation probabilities.
#[derive(Debug, Clone, Copy)]
pub struct Equilibria {
    /// B = Σ_m Σ_κ p(m) (c₁m^κ)².
    pub b: f64,
    /// Equilibrium (1-B)/2 of P₁₀ and P₀₁.
    pub p10: f64,
    /// Equilibrium B/2 of P₁₁ and P₀₀.
    pub p11: f64,
}

pub fn equilibria(params: &ModelParams, prep: &CoherentPrep) -> Result<Equilibria> {
    check_prep(params, prep)?;
    let weights = poisson_weights(prep.z, prep.m_cutoff)?;
    let mut b = 0.0;
    for (m, w) in weights.iter().enumerate() {
        let blk = BlockDynamics::new(params, m)?;
        b += w * (blk.c1_even * blk.c1_even + blk.c1_odd * blk.c1_odd);
    }
    Ok(Equilibria {
        b,
        p10: 0.5 * (1.0 - b),
        p11: 0.5 * b,
    })
}

fn require_homogeneous_identical(params: &ModelParams) -> Result<(f64, f64)> {
    if params.n_qubits() != 2 {
        return Err(Error::InvalidParams("revival series is two-qubit".into()));
    }
    let (g1, g2) = (params.coupling(1), params.coupling(2));
    let (w1, w2) = (params.omega(1), params.omega(2));
    if (g1 - g2).abs() > 1e-9 || (w1 - w2).abs() > 1e-9 {
        return Err(Error::InvalidParams(
            "revival series needs identical qubits with equal couplings (β₂ = 0)".into(),
        ));
    }
    let beta1 = kept_configs(params)[0].0.beta();
    Ok((beta1, w1))
}

/// Gaussian revival series `S(t, ω) = Re Σ_k S̄_k`, with revival centers at
/// `μ = μ_k = 2πk(1 + f/2)/β₁²`, `f = z²β₁²`, `μ = ωt e^{-β₁²/2}`. The ω
/// argument is substituted verbatim: μ is recomputed with the passed
/// frequency.
pub fn revival_series(
    params: &ModelParams,
    z: f64,
    omega_arg: f64,
    t: f64,
    k_max: usize,
) -> Result<f64> {
    let (beta1, _) = require_homogeneous_identical(params)?;
    let b2 = beta1 * beta1;
    let f = z * z * b2;
    let mu = omega_arg * t * (-b2 / 2.0).exp();
    let mut total = 0.0;
    for k in 0..=k_max {
        if k > 0 && b2 == 0.0 {
            break;
        }
        let mu_k = if k == 0 {
            0.0
        } else {
            2.0 * std::f64::consts::PI * k as f64 * (1.0 + f / 2.0) / b2
        };
        let pkf = std::f64::consts::PI * k as f64 * f;
        let denom = 1.0 + pkf * pkf;
        let phi_re = -(mu - mu_k) * (mu - mu_k) * f * b2 / (2.0 * denom);
        let phi_im =
            0.5 * pkf.atan() + mu - z * z * (mu * b2 - 2.0 * std::f64::consts::PI * k as f64);
        total += phi_re.exp() * phi_im.cos() / denom.powf(0.25);
    }
    Ok(total)
}

/// Closed-form `P₁₀(z, t) = 3/8 + S(t, ω₁)/2 + S(t, 2ω₁)/8`.
pub fn revival_p10(params: &ModelParams, z: f64, t: f64, k_max: usize) -> Result<f64> {
    let (_, w1) = require_homogeneous_identical(params)?;
    Ok(0.375
        + 0.5 * revival_series(params, z, w1, t, k_max)?
        + 0.125 * revival_series(params, z, 2.0 * w1, t, k_max)?)
}

/// Smallest k whose envelope stays below 1e-8 over the sampled window,
/// capped at 64.
pub fn revival_k_max(params: &ModelParams, z: f64, omega_arg: f64, t_max: f64) -> Result<usize> {
    let (beta1, _) = require_homogeneous_identical(params)?;
    let b2 = beta1 * beta1;
    if b2 == 0.0 {
        return Ok(1);
    }
    let f = z * z * b2;
    let mu_max = omega_arg * t_max * (-b2 / 2.0).exp();
    for k in 1..64usize {
        let mu_k = 2.0 * std::f64::consts::PI * k as f64 * (1.0 + f / 2.0) / b2;
        if mu_k <= mu_max {
            continue;
        }
        let pkf = std::f64::consts::PI * k as f64 * f;
        let denom = 1.0 + pkf * pkf;
        let envelope =
            (-(mu_max - mu_k) * (mu_max - mu_k) * f * b2 / (2.0 * denom)).exp() / denom.powf(0.25);
        if envelope < 1e-8 {
            return Ok(k);
        }
    }
    Ok(64)
}

/// `|bits> ⊗ |z - β_bits>`: the displaced coherent preparation expressed in
/// the plain Fock basis (real amplitudes: real z, real β, phase-free).
pub fn coherent_initial_state(
    params: &ModelParams,
    prep: &CoherentPrep,
    photon_cutoff: usize,
) -> Result<QuantumState> {
    let n_quanta = photon_cutoff + 1;
    let beta = params.beta_of_bits(prep.initial_bits);
    let zp = prep.z - beta;
    let c = params.config_index(prep.initial_bits);
    let mut psi = QuantumState::fock_zero(params, Frame::Rotated, n_quanta);
    if zp == 0.0 {
        psi.set_amp(c, 0, Complex64::new(1.0, 0.0));
        return Ok(psi);
    }
    let ln_abs = zp.abs().ln();
    let mut sum = 0.0;
    for k in 0..n_quanta {
        let mag = (-zp * zp / 2.0 + k as f64 * ln_abs - 0.5 * ln_factorial(k)).exp();
        let amp = if zp < 0.0 && k % 2 == 1 { -mag } else { mag };
        psi.set_amp(c, k, Complex64::new(amp, 0.0));
        sum += amp * amp;
    }
    if 1.0 - sum > 1e-6 {
        return Err(Error::CutoffTooSmall {
            cutoff: photon_cutoff,
            reason: format!("coherent norm deficit {:e} at amplitude {zp}", 1.0 - sum),
        });
    }
    Ok(psi)
}

/// Propagate under a precomputed eigensystem:
/// `|Ψ(t)> = Σ_k e^{-iE_k t} |v_k><v_k|Ψ(0)>`. Times in `ω₁t/2π` units.
pub fn propagate_with(
    eig: &FockEigensystem,
    initial: &QuantumState,
    times: &[f64],
) -> Result<Vec<QuantumState>> {
    if initial.basis() != StateBasis::Fock || initial.frame() != Frame::Rotated {
        return Err(Error::BasisMismatch(
            "oracle propagation needs rotated-frame Fock input".into(),
        ));
    }
    let norm = initial.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidParams(format!(
            "initial state norm {norm}, expected 1"
        )));
    }
    let psi0 = initial.with_quanta(eig.n_quanta)?;
    let dim = psi0.amps().len();
    let re = nalgebra::DVector::from_iterator(dim, psi0.amps().iter().map(|z| z.re));
    let im = nalgebra::DVector::from_iterator(dim, psi0.amps().iter().map(|z| z.im));
    let c_re = eig.vectors.transpose() * re;
    let c_im = eig.vectors.transpose() * im;

    let params = eig.params.clone();
    let w1 = params.omega(1);
    if w1 <= 0.0 {
        return Err(Error::InvalidParams("time unit 2π/ω₁ needs ω₁ > 0".into()));
    }
    let states: Vec<Result<QuantumState>> = map_ordered(times, |&tau| {
        let t = tau * 2.0 * std::f64::consts::PI / w1;
        let mut pr = nalgebra::DVector::zeros(dim);
        let mut pi = nalgebra::DVector::zeros(dim);
        for k in 0..dim {
            let (s, c) = (-eig.energies[k] * t).sin_cos();
            // (c + is)(c_re + i c_im)
            pr[k] = c * c_re[k] - s * c_im[k];
            pi[k] = c * c_im[k] + s * c_re[k];
        }
        let out_re = &eig.vectors * pr;
        let out_im = &eig.vectors * pi;
        let amps: Vec<Complex64> = out_re
            .iter()
            .zip(out_im.iter())
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        let st = QuantumState::fock_from_amps(&params, Frame::Rotated, eig.n_quanta, amps)?;
        let drift = (st.norm() - 1.0).abs();
        if drift > 1e-6 {
            return Err(Error::CutoffTooSmall {
                cutoff: eig.n_quanta - 1,
                reason: format!("norm drift {drift:e} during propagation"),
            });
        }
        Ok(st)
    });
    states.into_iter().collect()
}

/// Ground-truth propagation at a fresh eigendecomposition.
pub fn propagate_oracle(
    params: &ModelParams,
    initial: &QuantumState,
    times: &[f64],
    photon_cutoff: usize,
) -> Result<Vec<QuantumState>> {
    let eig = fock_eigensystem(params, photon_cutoff)?;
    propagate_with(&eig, initial, times)
}

/// Exact observable trace for the coherent preparation.
pub fn oracle_observable(
    params: &ModelParams,
    prep: &CoherentPrep,
    obs: Observable,
    times: &[f64],
    photon_cutoff: usize,
) -> Result<DynamicsTrace> {
    if obs == Observable::Concurrence {
        return Err(Error::InvalidParams(
            "concurrence lives in the entanglement module".into(),
        ));
    }
    let initial = coherent_initial_state(params, prep, photon_cutoff)?;
    let states = propagate_oracle(params, &initial, times, photon_cutoff)?;
    let values = states
        .iter()
        .map(|st| state_observable(params, st, obs))
        .collect();
    Ok(DynamicsTrace {
        times: times.to_vec(),
        values,
        observable: obs,
        method: TraceMethod::Oracle,
    })
}

/// Qubit-configuration probability (field traced out) or inversion of an
/// arbitrary Fock-basis state.
pub fn state_observable(params: &ModelParams, state: &QuantumState, obs: Observable) -> f64 {
    let nc = params.n_configs();
    let mut probs = vec![0.0f64; nc];
    for (idx, amp) in state.amps().iter().enumerate() {
        probs[idx % nc] += amp.norm_sqr();
    }
    let p_of = |bits: u32| probs[params.config_index(bits)];
    match obs {
        Observable::P11 => p_of(0b11),
        Observable::P10 => p_of(0b10),
        Observable::P01 => p_of(0b01),
        Observable::P00 => p_of(0b00),
        // σ₁^z expectation: +1 where the qubit-1 bit is set
        Observable::Inversion => p_of(0b11) + p_of(0b01) - p_of(0b10) - p_of(0b00),
        Observable::Concurrence => f64::NAN,
    }
}
