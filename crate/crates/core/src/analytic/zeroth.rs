//! Single-block (adiabatic) closed forms: per quantum `m` and parity κ the
//! folded problem reduces to a 2×2 block with eigenvalues
//! `E_m^κ± = mω_c - (β1²+β2²)ω_c/2 ± θ_m^κ`,
//! `θ_m^κ = sqrt((Ω_m^κ)² + ω_c²(β1²-β2²)²/4)`.

use crate::error::Result;
use crate::model::{coupling_element, kept_configs, ModelParams, ParitySector};

use super::require_two_qubits;

/// Branch label of the ± pair within one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// One closed-form level of the single-block approximation.
#[derive(Debug, Clone)]
pub struct ZerothLevel {
    pub m: usize,
    pub kappa: ParitySector,
    pub branch: Branch,
    /// Energy in units of ω_c.
    pub energy: f64,
    /// θ_m^κ ≥ |β1²-β2²|ω_c/2.
    pub theta: f64,
    /// ξ_m^κ± for this branch; ±∞ in the degenerate limit where the
    /// eigenvector pins to (1, 0).
    pub xi: f64,
    /// (d1, d2) of the kept-half eigenvector, paper normalization
    /// d1 = ξ/√(1+ξ²), d2 = -1/√(1+ξ²).
    pub coeffs: [f64; 2],
}

/// All block quantities of one `(m, κ)` pair.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ZerothBlock {
    pub m: usize,
    pub kappa: ParitySector,
    /// θ_m^κ
    pub theta: f64,
    /// (ε1 + ε2)/2 = mω_c - (β1²+β2²)ω_c/2
    pub e_mean: f64,
    /// ξ_m^κ+ and ξ_m^κ-; exactly one may be infinite.
    pub xi_plus: f64,
    pub xi_minus: f64,
}

impl ZerothBlock {
    pub fn new(params: &ModelParams, kappa: ParitySector, m: usize) -> Result<Self> {
        require_two_qubits(params)?;
        let kept = kept_configs(params);
        let (beta1, beta2) = (kept[0].0.beta(), kept[1].0.beta());
        let omega_c = params.omega_c();
        let omega = coupling_element(params, kappa, 0, m, 1, m);
        // hd = (β1² - β2²)ω_c/2; ξ± = Ω/(-hd ∓ θ)
        let hd = 0.5 * (beta1 * beta1 - beta2 * beta2) * omega_c;
        let theta = omega.hypot(hd);
        let e_mean = m as f64 * omega_c - 0.5 * (beta1 * beta1 + beta2 * beta2) * omega_c;
        // The branch whose denominator cancels is computed through the
        // well-conditioned conjugate; ξ+ξ- = -1 then holds by construction.
        let (xi_plus, xi_minus) = if omega == 0.0 {
            if hd >= 0.0 {
                (0.0, f64::INFINITY)
            } else {
                (f64::INFINITY, 0.0)
            }
        } else if hd >= 0.0 {
            let xi_minus = (theta + hd) / omega;
            (-1.0 / xi_minus, xi_minus)
        } else {
            let xi_plus = -(theta - hd) / omega;
            (xi_plus, -1.0 / xi_plus)
        };
        Ok(Self {
            m,
            kappa,
            theta,
            e_mean,
            xi_plus,
            xi_minus,
        })
    }

    pub fn energy(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Plus => self.e_mean + self.theta,
            Branch::Minus => self.e_mean - self.theta,
        }
    }

    pub fn xi(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Plus => self.xi_plus,
            Branch::Minus => self.xi_minus,
        }
    }

    pub fn level(&self, branch: Branch) -> ZerothLevel {
        let xi = self.xi(branch);
        ZerothLevel {
            m: self.m,
            kappa: self.kappa,
            branch,
            energy: self.energy(branch),
            theta: self.theta,
            xi,
            coeffs: coeffs_from_xi(xi),
        }
    }
}

pub(crate) fn coeffs_from_xi(xi: f64) -> [f64; 2] {
    if xi.is_infinite() {
        [xi.signum(), 0.0]
    } else {
        let c = 1.0 / (1.0 + xi * xi).sqrt();
        [xi * c, -c]
    }
}

/// Closed-form single-block levels for blocks `m = 0..=m_max` of one parity
/// sector, in `(m, branch)` order with the `+` branch first.
pub fn zeroth_spectrum(
    params: &ModelParams,
    kappa: ParitySector,
    m_max: usize,
) -> Result<Vec<ZerothLevel>> {
    let mut levels = Vec::with_capacity(2 * (m_max + 1));
    for m in 0..=m_max {
        let block = ZerothBlock::new(params, kappa, m)?;
        levels.push(block.level(Branch::Plus));
        levels.push(block.level(Branch::Minus));
    }
    Ok(levels)
}

impl ZerothLevel {
    /// Folded coefficient vector over `(i, m)` on a grid of `n_quanta`
    /// quanta, for fidelity and conversion work.
    pub fn folded_coeffs(&self, n_quanta: usize) -> Vec<f64> {
        let mut v = vec![0.0; 2 * n_quanta];
        v[2 * self.m] = self.coeffs[0];
        v[2 * self.m + 1] = self.coeffs[1];
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::solve_fock_oracle;
    use crate::model::Truncation;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_qubit(omega1: f64, omega2: f64, g1: f64, g2: f64) -> ModelParams {
        ModelParams::two_qubit(omega1, omega2, g1, g2).unwrap()
    }

    #[test]
    fn decoupled_block_energies() {
        let p = two_qubit(0.25, 0.25, 0.0, 0.0);
        let even = ZerothBlock::new(&p, ParitySector::Even, 0).unwrap();
        assert_abs_diff_eq!(even.energy(Branch::Plus), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(even.energy(Branch::Minus), -0.25, epsilon = 1e-15);
        let odd = ZerothBlock::new(&p, ParitySector::Odd, 0).unwrap();
        assert_abs_diff_eq!(odd.energy(Branch::Plus), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(odd.energy(Branch::Minus), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn homogeneous_identical_frozen_blocks() {
        // β2 = 0, ω1 = ω2: the κ with Ω = 0 gives E ∈ {mω_c, (m-β1²)ω_c}
        // and eigenvectors pinned to single configurations.
        let p = two_qubit(0.25, 0.25, 0.15, 0.15); // β1 = 0.3
        for m in 0..6 {
            let kappa = if m % 2 == 0 {
                ParitySector::Odd
            } else {
                ParitySector::Even
            };
            let b = ZerothBlock::new(&p, kappa, m).unwrap();
            assert_eq!(coupling_element(&p, kappa, 0, m, 1, m), 0.0);
            assert_abs_diff_eq!(b.energy(Branch::Plus), m as f64, epsilon = 1e-14);
            assert_abs_diff_eq!(b.energy(Branch::Minus), m as f64 - 0.09, epsilon = 1e-14);
            // hd < 0 here (β1² > β2²): plus branch pins to config 2 = (0, -1)
            let plus = b.level(Branch::Plus);
            let minus = b.level(Branch::Minus);
            assert_abs_diff_eq!(plus.coeffs[0].abs(), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(plus.coeffs[1].abs(), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(minus.coeffs[0].abs(), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(minus.coeffs[1].abs(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn ground_level_close_to_oracle() {
        let p = two_qubit(0.25, 0.25, 0.1, 0.1);
        let b = ZerothBlock::new(&p, ParitySector::Even, 0).unwrap();
        assert_abs_diff_eq!(
            coupling_element(&p, ParitySector::Even, 0, 0, 1, 0),
            -0.245050,
            epsilon = 1e-6
        );
        let lower = b.energy(Branch::Minus);
        let oracle = solve_fock_oracle(&p, 100).unwrap();
        assert_abs_diff_eq!(lower, oracle.levels[0].energy, epsilon = 2e-3);
        assert_abs_diff_eq!(lower, -0.26505, epsilon = 2e-3);
    }

    #[test]
    fn xi_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let p = two_qubit(
                rng.gen_range(0.0..1.0),
                rng.gen_range(0.0..1.0),
                rng.gen_range(-0.6..0.6),
                rng.gen_range(-0.6..0.6),
            );
            let m = rng.gen_range(0..12);
            for kappa in ParitySector::BOTH {
                let b = ZerothBlock::new(&p, kappa, m).unwrap();
                if b.xi_plus.is_finite() && b.xi_minus.is_finite() {
                    assert_abs_diff_eq!(b.xi_plus * b.xi_minus, -1.0, epsilon = 1e-10);
                }
                let plus = b.level(Branch::Plus);
                let minus = b.level(Branch::Minus);
                // (d1^+)² = (d2^-)²
                assert_abs_diff_eq!(
                    plus.coeffs[0] * plus.coeffs[0],
                    minus.coeffs[1] * minus.coeffs[1],
                    epsilon = 1e-12
                );
                // orthonormality of the two branch vectors
                let dot = plus.coeffs[0] * minus.coeffs[0] + plus.coeffs[1] * minus.coeffs[1];
                let n1 = plus.coeffs[0].powi(2) + plus.coeffs[1].powi(2);
                let n2 = minus.coeffs[0].powi(2) + minus.coeffs[1].powi(2);
                assert_abs_diff_eq!(dot, 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!(n1, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(n2, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn theta_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let p = two_qubit(
                rng.gen_range(0.0..0.6),
                rng.gen_range(0.0..0.6),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
            );
            let kept = crate::model::kept_configs(&p);
            let (b1, b2) = (kept[0].0.beta(), kept[1].0.beta());
            let bound = 0.5 * (b1 * b1 - b2 * b2).abs();
            let m = rng.gen_range(0..8);
            for kappa in ParitySector::BOTH {
                let b = ZerothBlock::new(&p, kappa, m).unwrap();
                assert!(b.theta >= bound - 1e-14);
            }
        }
    }

    #[test]
    fn spectrum_matches_ed_in_weak_coupling() {
        // zeroth levels vs ED, Fig. 2 regime spot check
        let p = two_qubit(0.25, 0.25, 0.1, 0.15);
        let trunc = Truncation::default();
        for kappa in ParitySector::BOTH {
            let mut zeroth: Vec<f64> = zeroth_spectrum(&p, kappa, 10)
                .unwrap()
                .iter()
                .map(|l| l.energy)
                .collect();
            zeroth.sort_by(f64::total_cmp);
            let ed = crate::exact::solve_ed(&p, kappa, &trunc).unwrap();
            for (a, b) in zeroth.iter().zip(ed.energies()).take(8) {
                assert!((a - b).abs() <= 0.05, "zeroth {a} vs ed {b}");
            }
        }
    }

    #[test]
    fn rejects_other_qubit_counts() {
        let p = ModelParams::single_qubit(0.3, 0.1).unwrap();
        assert!(zeroth_spectrum(&p, ParitySector::Even, 3).is_err());
    }
}
