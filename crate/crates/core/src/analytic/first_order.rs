//! Two-block closed-form levels with the pseudo-solution filter.
//!
//! Each quantum `m` enters two windows, so half of the `(m, m+1)` roots are
//! spurious: only the roots with `±_γ` opposite to `±_s` are genuine, except
//! in the `(0, 1)` window where block 0 appears once and only the
//! both-signs-positive root is dropped.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ModelParams, ParitySector};

use super::quartic::{quartic_coeffs, solve_quartic, Sign};
use super::require_two_qubits;

/// One labeled root of an `(m, m+1)` window.
#[derive(Debug, Clone, Serialize)]
pub struct FirstOrderLevel {
    /// Window quanta `(m, m+1)`.
    pub block: (usize, usize),
    pub kappa: ParitySector,
    pub gamma: SignLabel,
    pub s: SignLabel,
    /// Energy in units of ω_c.
    pub energy: f64,
    /// True for roots removed by the filter.
    pub pseudo: bool,
    /// True when the root engine had to fall back to a direct eigensolve.
    pub fallback: bool,
}

/// Serializable mirror of the root sign labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignLabel {
    Plus,
    Minus,
}

impl From<Sign> for SignLabel {
    fn from(s: Sign) -> Self {
        match s {
            Sign::Plus => SignLabel::Plus,
            Sign::Minus => SignLabel::Minus,
        }
    }
}

/// All `4·m_max` labeled roots per parity for windows `m = 0..m_max-1`,
/// pseudo solutions flagged but not removed.
pub fn first_order_levels(
    params: &ModelParams,
    kappa: ParitySector,
    m_max: usize,
) -> Result<Vec<FirstOrderLevel>> {
    require_two_qubits(params)?;
    if m_max < 1 {
        return Err(Error::InvalidParams(
            "first-order approximation needs m_max >= 1".into(),
        ));
    }
    let mut levels = Vec::with_capacity(4 * m_max);
    for m in 0..m_max {
        let qc = quartic_coeffs(params, kappa, m)?;
        let roots = solve_quartic(&qc)?;
        for (gamma, s, energy) in roots.roots {
            let pseudo = if m == 0 {
                gamma == Sign::Plus && s == Sign::Plus
            } else {
                gamma == s
            };
            levels.push(FirstOrderLevel {
                block: (m, m + 1),
                kappa,
                gamma: gamma.into(),
                s: s.into(),
                energy,
                pseudo,
                fallback: roots.fallback,
            });
        }
    }
    Ok(levels)
}

/// Filtered first-order spectrum, ascending: 3 roots from the `(0, 1)`
/// window and 2 from every later one, `3 + 2(m_max - 1)` per parity.
pub fn first_order_spectrum(
    params: &ModelParams,
    kappa: ParitySector,
    m_max: usize,
) -> Result<Vec<FirstOrderLevel>> {
    let mut kept: Vec<FirstOrderLevel> = first_order_levels(params, kappa, m_max)?
        .into_iter()
        .filter(|l| !l.pseudo)
        .collect();
    kept.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(kept)
}

/// Folded coefficient vector of a first-order level on a grid of `n_quanta`
/// quanta: the window eigenvector whose eigenvalue matches the labeled
/// root, embedded at rows `(m, i)` and `(m+1, i)`.
pub fn first_order_folded_coeffs(
    params: &ModelParams,
    level: &FirstOrderLevel,
    n_quanta: usize,
) -> Result<Vec<f64>> {
    let (m, _) = level.block;
    if m + 1 >= n_quanta {
        return Err(Error::IndexOutOfRange(format!(
            "window ({}, {}) beyond grid of {n_quanta} quanta",
            m,
            m + 1
        )));
    }
    let qc = quartic_coeffs(params, level.kappa, m)?;
    let block = qc
        .block
        .expect("model-built coefficients carry their window");
    let w = nalgebra::DMatrix::from_fn(4, 4, |r, c| block[(r, c)]);
    let eig = crate::linalg::symmetric_eigen(&w)?;
    let col = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - level.energy)
                .abs()
                .total_cmp(&(b.1 - level.energy).abs())
        })
        .map(|(i, _)| i)
        .expect("window has four eigenvalues");
    let mut coeffs = vec![0.0; 2 * n_quanta];
    for row in 0..4 {
        coeffs[2 * m + row] = eig.eigenvectors[(row, col)];
    }
    Ok(coeffs)
}
