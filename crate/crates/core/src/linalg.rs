//! Dense eigendecompositions with deterministic ordering and sign fixing.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigendecomposition of a real symmetric matrix: eigenvalues ascending,
/// eigenvectors as the corresponding orthonormal columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

/// Relative asymmetry tolerance for input checking.
const SYMMETRY_TOL: f64 = 1e-10;

/// Diagonalize a real symmetric matrix.
///
/// Rejects non-symmetric input, returns eigenvalues in ascending order, and
/// fixes each eigenvector's sign so that its first coefficient of largest
/// magnitude is positive.
pub fn symmetric_eigen(matrix: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(Error::NotSymmetric {
            max_asymmetry: f64::INFINITY,
        });
    }
    let scale = matrix.amax().max(1e-300);
    let mut max_asym = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            max_asym = max_asym.max((matrix[(i, j)] - matrix[(j, i)]).abs());
        }
    }
    if max_asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric {
            max_asymmetry: max_asym,
        });
    }

    let se = matrix.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = DMatrix::<f64>::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        eigenvalues.push(se.eigenvalues[k]);
        let mut v: DVector<f64> = se.eigenvectors.column(k).into();
        fix_sign(v.as_mut_slice());
        eigenvectors.set_column(col, &v);
    }
    Ok(SymmetricEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Flip the vector so its first coefficient of largest magnitude is positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    let mut best_abs = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Eigendecomposition of a complex Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(matrix: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(Error::NotSymmetric {
            max_asymmetry: f64::INFINITY,
        });
    }
    let scale = matrix.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    let mut max_asym = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            max_asym = max_asym.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
        }
    }
    if max_asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric {
            max_asymmetry: max_asym,
        });
    }
    let se = matrix.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let mut vals = Vec::with_capacity(n);
    let mut vecs = DMatrix::<Complex64>::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        vals.push(se.eigenvalues[k]);
        vecs.set_column(col, &se.eigenvectors.column(k));
    }
    Ok((vals, vecs))
}
