//! Numerical block-window truncation of arbitrary order: diagonalize every
//! `(k+1)`-block window of the folded Hamiltonian. Order 0 and 1 reproduce
//! the closed forms before filtering; `k = n_tr` is full diagonalization.

use crate::error::{Error, Result};
use crate::exact::{folded_window, EigenLevel, Method, SpectrumResult};
use crate::linalg::symmetric_eigen;
use crate::model::{ModelParams, ParitySector};

/// Union of the eigenvalues of every window `(m .. m+k)` for
/// `m = 0..=m_max-k`, ascending, tagged `block-k`.
pub fn block_truncated_spectrum(
    params: &ModelParams,
    kappa: ParitySector,
    k: usize,
    m_max: usize,
) -> Result<SpectrumResult> {
    if m_max < k {
        return Err(Error::InvalidParams(format!(
            "m_max = {m_max} smaller than block order k = {k}"
        )));
    }
    let mut levels = Vec::new();
    for m_lo in 0..=(m_max - k) {
        let w = folded_window(params, kappa, m_lo, m_lo + k);
        let eig = symmetric_eigen(&w)?;
        for energy in eig.eigenvalues {
            levels.push(EigenLevel {
                energy,
                parity: Some(kappa),
                method: Method::BlockK(k),
                coeffs: None,
            });
        }
    }
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(SpectrumResult { levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{first_order_levels, zeroth_spectrum};
    use crate::exact::solve_ed;
    use crate::model::Truncation;
    use approx::assert_abs_diff_eq;

    #[test]
    fn order_zero_matches_closed_form() {
        let p = ModelParams::two_qubit(0.25, 0.3, 0.2, 0.35).unwrap();
        for kappa in ParitySector::BOTH {
            let mut zeroth: Vec<f64> = zeroth_spectrum(&p, kappa, 8)
                .unwrap()
                .iter()
                .map(|l| l.energy)
                .collect();
            zeroth.sort_by(f64::total_cmp);
            let block = block_truncated_spectrum(&p, kappa, 0, 8).unwrap();
            for (a, b) in zeroth.iter().zip(block.energies()) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn order_one_matches_quartic_roots() {
        let p = ModelParams::two_qubit(0.25, 0.3, 0.2, 0.35).unwrap();
        for kappa in ParitySector::BOTH {
            let mut quartic: Vec<f64> = first_order_levels(&p, kappa, 8)
                .unwrap()
                .iter()
                .map(|l| l.energy)
                .collect();
            quartic.sort_by(f64::total_cmp);
            let block = block_truncated_spectrum(&p, kappa, 1, 8).unwrap();
            for (a, b) in quartic.iter().zip(block.energies()) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn full_order_is_exact_diagonalization() {
        let p = ModelParams::two_qubit(0.25, 0.3, 0.2, 0.35).unwrap();
        let n_tr = 20;
        let trunc = Truncation {
            n_tr,
            element_tol: 1e-6,
        };
        for kappa in ParitySector::BOTH {
            let ed = solve_ed(&p, kappa, &trunc).unwrap();
            let block = block_truncated_spectrum(&p, kappa, n_tr, n_tr).unwrap();
            for (a, b) in ed.energies().iter().zip(block.energies()) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
            }
        }
    }
}
