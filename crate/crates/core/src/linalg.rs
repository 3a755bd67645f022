//! Dense complex linear algebra helpers over `nalgebra`.

use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;

use crate::seqspace::SeqVec;

pub type CMatrix = DMatrix<Complex64>;

/// Singular values in nonincreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    SVD::new(m.clone(), false, false).singular_values.iter().copied().collect()
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Numerical-rank cutoff `σ_max · max(rows, cols) · ε_mach`.
pub fn rank_tolerance(sigma_max: f64, rows: usize, cols: usize) -> f64 {
    sigma_max * rows.max(cols).max(1) as f64 * f64::EPSILON
}

/// Number of singular values strictly above `tol`.
pub fn rank_with(sv: &[f64], tol: f64) -> usize {
    sv.iter().filter(|&&s| s > tol).count()
}

/// Rank of `m` under the default cutoff.
pub fn numerical_rank(m: &CMatrix) -> usize {
    let sv = singular_values(m);
    let top = sv.first().copied().unwrap_or(0.0);
    rank_with(&sv, rank_tolerance(top, m.nrows(), m.ncols()))
}

/// Thin SVD factors `(W, σ, V*)` with `m = W diag(σ) V*`, singular values nonincreasing.
pub fn svd(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let s = SVD::new(m.clone(), true, true);
    let sv = s.singular_values.iter().copied().collect();
    (s.u.expect("requested U"), sv, s.v_t.expect("requested V*"))
}

/// Moore-Penrose pseudo-inverse with the default rank cutoff.
pub fn pseudo_inverse(m: &CMatrix) -> CMatrix {
    let (w, sv, vt) = svd(m);
    let tol = rank_tolerance(sv.first().copied().unwrap_or(0.0), m.nrows(), m.ncols());
    let mut out = CMatrix::zeros(m.ncols(), m.nrows());
    for (i, &s) in sv.iter().enumerate() {
        if s > tol {
            let col = vt.row(i).adjoint();
            let row = w.column(i).adjoint();
            out += (col * row).scale(1.0 / s);
        }
    }
    out
}

/// Orthonormal basis (columns) of the null space of `m`.
pub fn null_space(m: &CMatrix) -> CMatrix {
    let cols = m.ncols();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    // Pad to a square matrix so the SVD returns a full right factor.
    let rows = m.nrows().max(cols);
    let mut padded = CMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let (_, sv, vt) = svd(&padded);
    let tol = rank_tolerance(sv.first().copied().unwrap_or(0.0), m.nrows(), cols);
    let r = rank_with(&sv, tol);
    let mut basis = CMatrix::zeros(cols, cols - r);
    for (j, i) in (r..cols).enumerate() {
        basis.set_column(j, &vt.row(i).adjoint());
    }
    basis
}

/// Orthonormal basis (columns) of the range of `m`.
pub fn range_basis(m: &CMatrix) -> CMatrix {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let (w, sv, _) = svd(m);
    let tol = rank_tolerance(sv.first().copied().unwrap_or(0.0), m.nrows(), m.ncols());
    let r = rank_with(&sv, tol);
    w.columns(0, r).into_owned()
}

/// Matrix whose column `k` holds the first `dim` coordinates of `vectors[k]`.
pub fn columns_matrix(vectors: &[SeqVec], dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, vectors.len());
    for (k, v) in vectors.iter().enumerate() {
        for &(i, x) in v.coords() {
            if i <= dim {
                m[(i - 1, k)] = x;
            }
        }
    }
    m
}

pub fn to_dvector(v: &SeqVec, dim: usize) -> DVector<Complex64> {
    DVector::from_vec(v.to_dense(dim))
}

pub fn column_to_seq(m: &CMatrix, j: usize) -> SeqVec {
    SeqVec::from_dense(m.column(j).as_slice())
}

pub fn vector_norm(v: &DVector<Complex64>) -> f64 {
    v.iter().fold(0.0, |acc, x| acc + x.norm_sqr()).sqrt()
}

/// Embeds `m` into the top-left corner of a `rows × cols` zero matrix.
pub fn embed(m: &CMatrix, rows: usize, cols: usize) -> CMatrix {
    let mut out = CMatrix::zeros(rows, cols);
    let r = m.nrows().min(rows);
    let c = m.ncols().min(cols);
    out.view_mut((0, 0), (r, c)).copy_from(&m.view((0, 0), (r, c)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_row_slice(rows, cols, &data.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    #[test]
    fn null_space_of_duplicate_columns() {
        let m = real(2, 3, &[1.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let k = null_space(&m);
        assert_eq!(k.ncols(), 1);
        assert!(spectral_norm(&(&m * &k)) < 1e-14);
    }

    #[test]
    fn pseudo_inverse_of_rank_deficient() {
        let m = real(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let p = pseudo_inverse(&m);
        let back = &m * &p * &m;
        assert!(spectral_norm(&(back - &m)) < 1e-14);
        assert!((p[(0, 0)].re - 0.25).abs() < 1e-14);
    }

    #[test]
    fn singular_values_sorted() {
        let m = real(3, 3, &[1.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 2.0]);
        let sv = singular_values(&m);
        assert!((sv[0] - 3.0).abs() < 1e-14 && (sv[2] - 1.0).abs() < 1e-14);
        assert_eq!(numerical_rank(&m), 3);
    }
}
