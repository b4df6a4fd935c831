//! Moment and localizing matrix certificates.
//!
//! A sequence is representable by a nonnegative measure (at the observed
//! order) only if its moment matrix — and, for supports cut out by a
//! polynomial `q ≥ 0`, its localizing matrix — is positive semidefinite.
//! These checks complement the Hausdorff rows: necessary conditions usable
//! on any candidate sequence, e.g. solver output replays.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative eigenvalue cutoff: a matrix passes when
/// `λ_min ≥ -PSD_TOL · trace`.
const PSD_TOL: f64 = 1e-9;

/// Moment matrix of a 1D sequence at order `r`:
/// `M[i][j] = seq[i + j]`, size `(r+1) x (r+1)`.
pub fn moment_matrix_1d(seq: &[f64], r: usize) -> Result<DMatrix<f64>> {
    let needed = 2 * r + 1;
    if seq.len() < needed {
        return Err(Error::Dimension(format!(
            "moment matrix of order {r} needs {needed} moments, got {}",
            seq.len()
        )));
    }
    Ok(DMatrix::from_fn(r + 1, r + 1, |i, j| seq[i + j]))
}

/// Localizing matrix of a 1D sequence for the polynomial
/// `q(x) = Σ_k q[k] x^k` at order `r`:
/// `M[i][j] = Σ_k q[k] · seq[i + j + k]`.
pub fn localizing_matrix_1d(seq: &[f64], q: &[f64], r: usize) -> Result<DMatrix<f64>> {
    if q.is_empty() {
        return Err(Error::config("localizing polynomial has no coefficients"));
    }
    let needed = 2 * r + q.len();
    if seq.len() < needed {
        return Err(Error::Dimension(format!(
            "localizing matrix of order {r} with deg-{} polynomial needs {needed} moments, got {}",
            q.len() - 1,
            seq.len()
        )));
    }
    Ok(DMatrix::from_fn(r + 1, r + 1, |i, j| {
        q.iter()
            .enumerate()
            .map(|(k, &qk)| qk * seq[i + j + k])
            .sum()
    }))
}

/// Moment matrix of a 2D sequence at order `r` over the graded monomial
/// basis `t^a x^b`, `a + b ≤ r` (degree-major, `t`-degree ascending inside
/// each degree).  `moments(i, j)` must supply every moment with
/// `i + j ≤ 2r`.
pub fn moment_matrix_2d(moments: &dyn Fn(u32, u32) -> Option<f64>, r: u32) -> Result<DMatrix<f64>> {
    let mut basis = Vec::new();
    for d in 0..=r {
        for i in 0..=d {
            basis.push((i, d - i));
        }
    }
    let size = basis.len();
    let mut m = DMatrix::zeros(size, size);
    for (a, &(ia, ja)) in basis.iter().enumerate() {
        for (b, &(ib, jb)) in basis.iter().enumerate().skip(a) {
            let (i, j) = (ia + ib, ja + jb);
            let value = moments(i, j).ok_or_else(|| {
                Error::Dimension(format!("2D moment ({i}, {j}) missing at order {r}"))
            })?;
            m[(a, b)] = value;
            m[(b, a)] = value;
        }
    }
    Ok(m)
}

/// Eigenvalue positive-semidefiniteness check with the relative cutoff
/// `λ_min ≥ -1e-9 · trace`.
pub fn psd_certificate(matrix: &DMatrix<f64>) -> bool {
    debug_assert_eq!(matrix.nrows(), matrix.ncols());
    let trace = matrix.trace();
    if !trace.is_finite() || trace < 0.0 {
        return false;
    }
    let eigen = matrix.clone().symmetric_eigen();
    let min_eig = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    min_eig >= -PSD_TOL * trace
}
