//! Model parameters, spin-configuration tables, the displaced-Fock overlap
//! kernel, and parity-folded coupling matrix elements.
//!
//! The system is `N` qubits coupled with individual strengths `g_j` to one
//! bosonic mode. In the rotated frame the Hamiltonian is
//!
//! ```text
//! H = ω_c a†a + Σ_j ( -ω_j/2 σ_j^x + g_j (a† + a) σ_j^z )
//! ```
//!
//! Each σ^z product configuration carries its own displacement
//! `β = Σ_j ±g_j/ω_c`, and the global parity operator
//! `Π = Π_j σ_j^x · exp(iπ a†a)` splits the Hilbert space into two sectors.
//! Folding a sector onto the configurations whose highest bit is set halves
//! the basis; the price is the non-orthogonality of displaced Fock states,
//! handled by [`displaced_overlap`].

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters: qubit splittings and coupling strengths in units of
/// the mode frequency `omega_c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    n_qubits: usize,
    omega_c: f64,
    omegas: Vec<f64>,
    couplings: Vec<f64>,
}

impl ModelParams {
    /// Validate and build a parameter set. `omegas[j]` and `couplings[j]`
    /// refer to qubit `j+1` (qubit 1 is the lowest bit).
    pub fn new(omega_c: f64, omegas: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        let n_qubits = omegas.len();
        if n_qubits == 0 {
            return Err(Error::InvalidParams("need at least one qubit".into()));
        }
        if couplings.len() != n_qubits {
            return Err(Error::InvalidParams(format!(
                "{} splittings but {} couplings",
                n_qubits,
                couplings.len()
            )));
        }
        if omega_c <= 0.0 || !omega_c.is_finite() {
            return Err(Error::InvalidParams(format!(
                "omega_c = {omega_c} must be > 0"
            )));
        }
        if omegas.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidParams(
                "qubit splittings must be finite and >= 0".into(),
            ));
        }
        if couplings.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidParams("couplings must be finite".into()));
        }
        Ok(Self {
            n_qubits,
            omega_c,
            omegas,
            couplings,
        })
    }

    /// Two-qubit system with unit mode frequency.
    pub fn two_qubit(omega1: f64, omega2: f64, g1: f64, g2: f64) -> Result<Self> {
        Self::new(1.0, vec![omega1, omega2], vec![g1, g2])
    }

    /// Single qubit (Rabi-model reduction) with unit mode frequency.
    pub fn single_qubit(omega1: f64, g1: f64) -> Result<Self> {
        Self::new(1.0, vec![omega1], vec![g1])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    /// Splitting of qubit `j` (1-based).
    pub fn omega(&self, j: usize) -> f64 {
        self.omegas[j - 1]
    }

    /// Coupling of qubit `j` (1-based).
    pub fn coupling(&self, j: usize) -> f64 {
        self.couplings[j - 1]
    }

    /// Dimensionless displacement of a σ^z product configuration:
    /// `Σ_j (±g_j)/ω_c`, `+` where bit `j` is set.
    pub fn beta_of_bits(&self, bits: u32) -> f64 {
        let mut beta = 0.0;
        for (j, g) in self.couplings.iter().enumerate() {
            if bits >> j & 1 == 1 {
                beta += g / self.omega_c;
            } else {
                beta -= g / self.omega_c;
            }
        }
        beta
    }

    /// Number of spin configurations, `2^N`.
    pub fn n_configs(&self) -> usize {
        1 << self.n_qubits
    }

    /// Number of kept configurations after parity folding, `2^(N-1)`.
    pub fn n_kept(&self) -> usize {
        1 << (self.n_qubits - 1)
    }

    /// All `2^N` configurations in descending bit order, so that for two
    /// qubits the order is `|11>, |10>, |01>, |00>`.
    pub fn all_configs(&self) -> Vec<SpinConfig> {
        (0..self.n_configs() as u32)
            .rev()
            .map(|bits| SpinConfig::new(self, bits))
            .collect()
    }

    /// Index of a configuration in the [`Self::all_configs`] ordering.
    pub fn config_index(&self, bits: u32) -> usize {
        self.n_configs() - 1 - bits as usize
    }

    /// Largest `|β|` over all configurations.
    pub fn beta_max(&self) -> f64 {
        self.couplings.iter().map(|g| g.abs()).sum::<f64>() / self.omega_c
    }

    /// Returns a copy with one coupling sign flipped (spectra are invariant
    /// under this).
    pub fn with_flipped_coupling(&self, j: usize) -> Self {
        let mut p = self.clone();
        p.couplings[j - 1] = -p.couplings[j - 1];
        p
    }
}

/// One σ^z product configuration together with its displacement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinConfig {
    bits: u32,
    n_qubits: usize,
    beta: f64,
}

impl SpinConfig {
    pub fn new(params: &ModelParams, bits: u32) -> Self {
        Self {
            bits,
            n_qubits: params.n_qubits(),
            beta: params.beta_of_bits(bits),
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// State of qubit `j` (1-based): `true` for σ^z-up.
    pub fn bit(&self, j: usize) -> bool {
        self.bits >> (j - 1) & 1 == 1
    }

    /// Bitwise complement within the register; its β is `-β`.
    pub fn complement(&self, params: &ModelParams) -> SpinConfig {
        let mask = (1u32 << self.n_qubits) - 1;
        SpinConfig::new(params, !self.bits & mask)
    }

    /// Bitstring label, highest qubit first (`|10>` → "10").
    pub fn label(&self) -> String {
        (0..self.n_qubits)
            .rev()
            .map(|j| if self.bits >> j & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// Parity sector label κ = ±1 of the global parity operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParitySector {
    Even,
    Odd,
}

impl ParitySector {
    pub const BOTH: [ParitySector; 2] = [ParitySector::Even, ParitySector::Odd];

    pub fn kappa(&self) -> f64 {
        match self {
            ParitySector::Even => 1.0,
            ParitySector::Odd => -1.0,
        }
    }

    /// κ·(-1)^n, the sign picked up by the eliminated partner coefficient.
    pub fn partner_sign(&self, n: usize) -> f64 {
        if n.is_multiple_of(2) {
            self.kappa()
        } else {
            -self.kappa()
        }
    }

    pub fn from_kappa(kappa: f64) -> Result<Self> {
        if (kappa - 1.0).abs() < 1e-6 {
            Ok(ParitySector::Even)
        } else if (kappa + 1.0).abs() < 1e-6 {
            Ok(ParitySector::Odd)
        } else {
            Err(Error::InvalidParams(format!("kappa = {kappa} is not ±1")))
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ParitySector::Even => "1",
            ParitySector::Odd => "-1",
        }
    }
}

/// Truncation of the displaced quantum number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// Maximum displaced quantum retained in the folded basis.
    pub n_tr: usize,
    /// Neglect threshold for inter-block coupling elements beyond `n_tr`.
    pub element_tol: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            n_tr: 48,
            element_tol: 1e-6,
        }
    }
}

impl Truncation {
    pub fn new(n_tr: usize, element_tol: f64) -> Result<Self> {
        if element_tol <= 0.0 || element_tol.is_nan() {
            return Err(Error::InvalidParams(format!(
                "element_tol = {element_tol} must be > 0"
            )));
        }
        Ok(Self { n_tr, element_tol })
    }

    /// Basis size per kept configuration.
    pub fn n_quanta(&self) -> usize {
        self.n_tr + 1
    }
}

/// The `2^(N-1)` retained configurations (highest bit set), in descending
/// bit order, each paired with its eliminated complement. The eliminated
/// coefficients follow from `d_partner,n = κ(-1)^n d_kept,n`.
pub fn kept_configs(params: &ModelParams) -> Vec<(SpinConfig, SpinConfig)> {
    let top = 1u32 << (params.n_qubits() - 1);
    (top..2 * top)
        .rev()
        .map(|bits| {
            let kept = SpinConfig::new(params, bits);
            let partner = kept.complement(params);
            (kept, partner)
        })
        .collect()
}

/// Index of a kept configuration in the [`kept_configs`] ordering.
/// Valid only when the highest bit of `bits` is set.
pub(crate) fn kept_index(params: &ModelParams, bits: u32) -> usize {
    params.n_configs() - 1 - bits as usize
}

const LN_FACT_LEN: usize = 4096;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0f64; LN_FACT_LEN];
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for (k, slot) in t.iter_mut().enumerate().skip(1) {
            let y = (k as f64).ln() - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
            *slot = sum;
        }
        t
    })
}

/// ln(n!), tabulated.
pub fn ln_factorial(n: usize) -> f64 {
    let t = ln_fact_table();
    assert!(n < t.len(), "factorial table exhausted at n = {n}");
    t[n]
}

/// Generalized Laguerre polynomial L_n^(α)(x) by the three-term recurrence.
fn assoc_laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut lkm1 = 1.0;
    let mut lk = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let lkp1 = ((2.0 * kf + 1.0 + alpha - x) * lk - (kf + alpha) * lkm1) / (kf + 1.0);
        lkm1 = lk;
        lk = lkp1;
    }
    lk
}

/// Overlap `<m|n>` between Fock states displaced by β_i and β_j, as a
/// function of `beta_ij = β_i - β_j`.
///
/// Evaluated through the associated-Laguerre form of the displacement matrix
/// element, which stays accurate where the direct alternating sum
/// ([`displaced_overlap_series`]) loses digits to cancellation. Swapping
/// `m` and `n` or flipping the sign of β multiplies the result by
/// `(-1)^(m+n)`.
pub fn displaced_overlap(m: usize, n: usize, beta_ij: f64) -> f64 {
    if beta_ij == 0.0 {
        return if m == n { 1.0 } else { 0.0 };
    }
    let x = beta_ij * beta_ij;
    // <m|D(b)|n> = sqrt(n!/m!) b^(m-n) e^(-b²/2) L_n^(m-n)(b²) for m >= n.
    let (lo, hi, flip) = if m >= n { (n, m, false) } else { (m, n, true) };
    let diff = hi - lo;
    let ln_mag =
        0.5 * (ln_factorial(lo) - ln_factorial(hi)) + diff as f64 * beta_ij.abs().ln() - 0.5 * x;
    let mut sign = if beta_ij < 0.0 && diff % 2 == 1 {
        -1.0
    } else {
        1.0
    };
    if flip {
        // (m,n) swap contributes (-1)^(m+n) = (-1)^diff.
        if diff % 2 == 1 {
            sign = -sign;
        }
    }
    sign * ln_mag.exp() * assoc_laguerre(lo, diff as f64, x)
}

/// The same overlap evaluated by the direct alternating sum over `l` with
/// log-factorials and compensated summation. Reliable for moderate `m + n`
/// and `|β|`; retained as an independent cross-check of the kernel.
pub fn displaced_overlap_series(m: usize, n: usize, beta_ij: f64) -> f64 {
    if beta_ij == 0.0 {
        return if m == n { 1.0 } else { 0.0 };
    }
    let ln_abs = beta_ij.abs().ln();
    let neg_beta = beta_ij < 0.0;
    let pref = 0.5 * (ln_factorial(m) + ln_factorial(n));
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for l in 0..=m.min(n) {
        let k = m + n - 2 * l;
        let ln_mag =
            pref - ln_factorial(l) - ln_factorial(n - l) - ln_factorial(m - l) + k as f64 * ln_abs;
        let mut term = ln_mag.exp();
        let negative = ((n - l) % 2 == 1) ^ (neg_beta && k % 2 == 1);
        if negative {
            term = -term;
        }
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    (-0.5 * beta_ij * beta_ij).exp() * sum
}

/// Folded coupling element between kept basis states `(i, m)` and `(j, n)`.
///
/// Every single-bit flip from kept configuration `i` lands either on kept
/// configuration `j` (weight `-ω_b/2`) or on the eliminated partner of `j`
/// (weight `-ω_b/2 · κ(-1)^n`); each contributes the displaced overlap at
/// the corresponding β difference. Zero when `i` and `j` differ in more than
/// one bit after accounting for the partner map. Satisfies
/// `omega_element(i,m,j,n) = omega_element(j,n,i,m)`.
pub fn omega_element(
    params: &ModelParams,
    trunc: &Truncation,
    kappa: ParitySector,
    i: usize,
    m: usize,
    j: usize,
    n: usize,
) -> Result<f64> {
    let n_kept = params.n_kept();
    if i >= n_kept || j >= n_kept {
        return Err(Error::IndexOutOfRange(format!(
            "kept config index ({i}, {j}) with {n_kept} kept configs"
        )));
    }
    if m > trunc.n_tr || n > trunc.n_tr {
        return Err(Error::IndexOutOfRange(format!(
            "quantum ({m}, {n}) beyond n_tr = {}",
            trunc.n_tr
        )));
    }
    Ok(coupling_element(params, kappa, i, m, j, n))
}

/// Unchecked kernel behind [`omega_element`]; also used by the Hamiltonian
/// builder and the closed-form spectra.
pub(crate) fn coupling_element(
    params: &ModelParams,
    kappa: ParitySector,
    i: usize,
    m: usize,
    j: usize,
    n: usize,
) -> f64 {
    let n_all = params.n_configs() as u32;
    let top = n_all >> 1;
    let bits_i = n_all - 1 - i as u32;
    let beta_i = params.beta_of_bits(bits_i);
    let mut total = 0.0;
    for b in 0..params.n_qubits() {
        let flipped = bits_i ^ (1 << b);
        let w = -0.5 * params.omegas()[b];
        if flipped >= top {
            if kept_index(params, flipped) == j {
                total += w * displaced_overlap(m, n, beta_i - params.beta_of_bits(flipped));
            }
        } else {
            let partner_of = !flipped & (n_all - 1);
            if kept_index(params, partner_of) == j {
                total += w
                    * kappa.partner_sign(n)
                    * displaced_overlap(m, n, beta_i - params.beta_of_bits(flipped));
            }
        }
    }
    total
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
    fn params_validation() {
        assert!(ModelParams::new(1.0, vec![], vec![]).is_err());
        assert!(ModelParams::new(1.0, vec![0.1], vec![0.1, 0.2]).is_err());
        assert!(ModelParams::new(0.0, vec![0.1], vec![0.1]).is_err());
        assert!(ModelParams::new(-1.0, vec![0.1], vec![0.1]).is_err());
        assert!(ModelParams::new(1.0, vec![-0.1], vec![0.1]).is_err());
    }

    #[test]
    fn kept_configs_two_qubits() {
        let p = two_qubit(0.25, 0.25, 0.1, 0.3);
        let kept = kept_configs(&p);
        assert_eq!(kept.len(), 2);
        assert_eq!(kept[0].0.label(), "11");
        assert_eq!(kept[0].1.label(), "00");
        assert_eq!(kept[1].0.label(), "10");
        assert_eq!(kept[1].1.label(), "01");
        // β1 = (g2+g1)/ωc, β2 = (g2-g1)/ωc, partners negated
        assert_abs_diff_eq!(kept[0].0.beta(), 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(kept[1].0.beta(), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(kept[0].1.beta(), -0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(kept[1].1.beta(), -0.2, epsilon = 1e-15);
    }

    #[test]
    fn kept_configs_single_qubit() {
        let p = ModelParams::single_qubit(0.5, 0.2).unwrap();
        let kept = kept_configs(&p);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].0.label(), "1");
        assert_eq!(kept[0].1.label(), "0");
    }

    #[test]
    fn kept_configs_three_qubits_against_enumeration() {
        let (g1, g2, g3) = (0.11, 0.23, 0.37);
        let p = ModelParams::new(1.0, vec![0.1, 0.2, 0.3], vec![g1, g2, g3]).unwrap();
        let kept = kept_configs(&p);
        assert_eq!(kept.len(), 4);
        let expected = [g3 + g2 + g1, g3 + g2 - g1, g3 - g2 + g1, g3 - g2 - g1];
        for (pair, want) in kept.iter().zip(expected) {
            assert_abs_diff_eq!(pair.0.beta(), want, epsilon = 1e-15);
        }
        // brute force over all 8 configurations: σ^z eigenvalues ±1 per bit
        let gs = [g1, g2, g3];
        for bits in 0u32..8 {
            let mut beta = 0.0;
            for (j, g) in gs.iter().enumerate() {
                beta += if bits >> j & 1 == 1 { *g } else { -*g };
            }
            assert_abs_diff_eq!(p.beta_of_bits(bits), beta, epsilon = 1e-15);
        }
        // complements negate β
        for (k, pt) in kept.iter() {
            assert_abs_diff_eq!(k.beta(), -pt.beta(), epsilon = 1e-15);
        }
    }

    #[test]
    fn overlap_undisplaced_is_kronecker() {
        for m in 0..6 {
            for n in 0..6 {
                let want = if m == n { 1.0 } else { 0.0 };
                assert_eq!(displaced_overlap(m, n, 0.0), want);
            }
        }
    }

    #[test]
    fn overlap_pinned_values() {
        assert_abs_diff_eq!(
            displaced_overlap(0, 0, 0.6),
            (-0.18f64).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(displaced_overlap(0, 0, 0.6), 0.835270, epsilon = 1e-6);
        let want = (-0.125f64).exp() * (1.0 - 0.25);
        assert_abs_diff_eq!(displaced_overlap(1, 1, 0.5), want, epsilon = 1e-15);
        assert_abs_diff_eq!(displaced_overlap(1, 1, 0.5), 0.661873, epsilon = 1e-6);
    }

    /// Independent oracle: build D = exp(β(a†-a)) by scaling-and-squaring at
    /// a large photon cutoff and read off matrix elements.
    fn displacement_matrix(beta: f64, dim: usize) -> nalgebra::DMatrix<f64> {
        let mut k = nalgebra::DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim - 1 {
            let s = ((i + 1) as f64).sqrt();
            k[(i + 1, i)] += beta * s; // a† term
            k[(i, i + 1)] -= beta * s; // -a term
        }
        // scaling and squaring with a Taylor series on the scaled matrix
        let squarings = 10u32;
        let scaled = k / f64::powi(2.0, squarings as i32);
        let mut term = nalgebra::DMatrix::<f64>::identity(dim, dim);
        let mut sum = term.clone();
        for order in 1..30 {
            term = (&term * &scaled) / order as f64;
            sum += &term;
        }
        let mut d = sum;
        for _ in 0..squarings {
            d = &d * &d;
        }
        d
    }

    #[test]
    fn overlap_matches_displacement_operator_oracle() {
        let dim = 150;
        for beta in [0.5, -1.2] {
            let d = displacement_matrix(beta, dim);
            for m in 0..12 {
                for n in 0..12 {
                    assert_abs_diff_eq!(displaced_overlap(m, n, beta), d[(m, n)], epsilon = 1e-10);
                }
            }
        }
        assert_abs_diff_eq!(
            displaced_overlap(1, 1, 0.5),
            displacement_matrix(0.5, 150)[(1, 1)],
            epsilon = 1e-12
        );
    }

    #[test]
    fn overlap_swap_and_sign_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..500 {
            let m = rng.gen_range(0..=60);
            let n = rng.gen_range(0..=60);
            let beta: f64 = rng.gen_range(-3.0..3.0);
            let x = displaced_overlap(m, n, beta);
            let parity = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(displaced_overlap(n, m, beta), parity * x, epsilon = 1e-12);
            assert_abs_diff_eq!(displaced_overlap(m, n, -beta), parity * x, epsilon = 1e-12);
        }
    }

    #[test]
    fn overlap_gram_columns_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xa57);
        for _ in 0..40 {
            let m = rng.gen_range(0..=12);
            let n = rng.gen_range(0..=12);
            let beta: f64 = rng.gen_range(-3.0..3.0);
            let kmax = m + n + 40;
            let mut sum = 0.0;
            for k in 0..=kmax {
                sum += displaced_overlap(m, k, beta) * displaced_overlap(n, k, beta);
            }
            let want = if m == n { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(sum, want, epsilon = 1e-8);
        }
    }

    #[test]
    fn overlap_diagonal_laguerre_identity() {
        // L_m(x) by the standard (α = 0) three-term recurrence, written out
        // here independently of the kernel path.
        fn laguerre(m: usize, x: f64) -> f64 {
            if m == 0 {
                return 1.0;
            }
            let (mut l0, mut l1) = (1.0, 1.0 - x);
            for k in 1..m {
                let kf = k as f64;
                let l2 = ((2.0 * kf + 1.0 - x) * l1 - kf * l0) / (kf + 1.0);
                l0 = l1;
                l1 = l2;
            }
            l1
        }
        for m in 0..=40 {
            for ib in 0..=20 {
                let beta = -2.0 + 0.2 * ib as f64;
                let want = (-0.5 * beta * beta).exp() * laguerre(m, beta * beta);
                assert_abs_diff_eq!(displaced_overlap(m, m, beta), want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn overlap_series_agrees_in_its_stable_regime() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..300 {
            let m = rng.gen_range(0..=12);
            let n = rng.gen_range(0..=12);
            let beta: f64 = rng.gen_range(-1.5..1.5);
            assert_abs_diff_eq!(
                displaced_overlap(m, n, beta),
                displaced_overlap_series(m, n, beta),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn omega_element_decoupled_collapses_to_deltas() {
        let p = two_qubit(0.3, 0.7, 0.0, 0.0);
        let trunc = Truncation::default();
        for kappa in ParitySector::BOTH {
            for m in 0..6 {
                let got = omega_element(&p, &trunc, kappa, 0, m, 1, m).unwrap();
                let want = -0.3 / 2.0 - kappa.partner_sign(m) * 0.7 / 2.0;
                assert_abs_diff_eq!(got, want, epsilon = 1e-15);
                // different quanta decouple entirely
                let off = omega_element(&p, &trunc, kappa, 0, m, 1, m + 1).unwrap();
                assert_abs_diff_eq!(off, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn omega_element_hand_value() {
        // ω1 = ω2 = 0.25, g1 = g2 = 0.1: β12 = β13 = 0.2
        let p = two_qubit(0.25, 0.25, 0.1, 0.1);
        let trunc = Truncation::default();
        let got = omega_element(&p, &trunc, ParitySector::Even, 0, 0, 1, 0).unwrap();
        let want = -0.125 * ((-0.02f64).exp() + (-0.02f64).exp());
        assert_abs_diff_eq!(got, want, epsilon = 1e-15);
        assert_abs_diff_eq!(got, -0.245050, epsilon = 1e-6);
    }

    #[test]
    fn omega_element_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let trunc = Truncation::default();
        for _ in 0..200 {
            let p = two_qubit(
                rng.gen_range(0.0..1.0),
                rng.gen_range(0.0..1.0),
                rng.gen_range(-0.6..0.6),
                rng.gen_range(-0.6..0.6),
            );
            let i = rng.gen_range(0..2);
            let j = rng.gen_range(0..2);
            let m = rng.gen_range(0..=20);
            let n = rng.gen_range(0..=20);
            for kappa in ParitySector::BOTH {
                let a = omega_element(&p, &trunc, kappa, i, m, j, n).unwrap();
                let b = omega_element(&p, &trunc, kappa, j, n, i, m).unwrap();
                assert_abs_diff_eq!(a, b, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn omega_element_three_qubits_partner_map() {
        let p = ModelParams::new(1.0, vec![0.2, 0.3, 0.4], vec![0.1, 0.15, 0.2]).unwrap();
        let trunc = Truncation::default();
        // |110> (index 1) and |101> (index 2) differ by two bits directly,
        // but flipping qubit 3 of |110> lands on |010>, the partner of |101>.
        let got = omega_element(&p, &trunc, ParitySector::Even, 1, 2, 2, 3).unwrap();
        let beta_110 = p.beta_of_bits(0b110);
        let beta_010 = p.beta_of_bits(0b010);
        let want = -0.5
            * 0.4
            * ParitySector::Even.partner_sign(3)
            * displaced_overlap(2, 3, beta_110 - beta_010);
        assert_abs_diff_eq!(got, want, epsilon = 1e-15);
        // and symmetry still holds
        let sym = omega_element(&p, &trunc, ParitySector::Even, 2, 3, 1, 2).unwrap();
        assert_abs_diff_eq!(got, sym, epsilon = 1e-14);
    }

    #[test]
    fn omega_element_bounds() {
        let p = two_qubit(0.25, 0.25, 0.1, 0.1);
        let trunc = Truncation {
            n_tr: 10,
            element_tol: 1e-6,
        };
        assert!(omega_element(&p, &trunc, ParitySector::Even, 0, 0, 2, 0).is_err());
        assert!(omega_element(&p, &trunc, ParitySector::Even, 0, 11, 1, 0).is_err());
    }
}
