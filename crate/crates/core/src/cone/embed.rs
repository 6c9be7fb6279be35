//! Coordinate maps between complex Hermitian matrices, real symmetric
//! matrices and their packed vector forms.
//!
//! Complex Hermitian problems are solved through the standard real-symmetric
//! embedding phi(X + iY) = [[X, -Y], [Y, X]], which keeps the interior-point
//! kernel real-arithmetic only. The packed forms scale off-diagonals by
//! sqrt(2) so that the packed dot product equals the matrix trace product.

use nalgebra::{DMatrix, DVector};

use crate::hermitian::{HermitianOperator, C64};

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Packed length of a k x k symmetric matrix.
pub fn svec_len(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Packs a symmetric matrix column by column, lower triangle, off-diagonals
/// scaled by sqrt(2): <svec(A), svec(B)> = tr(A B).
pub fn svec(m: &DMatrix<f64>) -> DVector<f64> {
    let k = m.nrows();
    let mut out = DVector::zeros(svec_len(k));
    let mut idx = 0;
    for col in 0..k {
        out[idx] = m[(col, col)];
        idx += 1;
        for row in (col + 1)..k {
            out[idx] = m[(row, col)] * SQRT2;
            idx += 1;
        }
    }
    out
}

pub fn smat(v: &[f64], k: usize) -> DMatrix<f64> {
    debug_assert_eq!(v.len(), svec_len(k));
    let mut out = DMatrix::zeros(k, k);
    let mut idx = 0;
    for col in 0..k {
        out[(col, col)] = v[idx];
        idx += 1;
        for row in (col + 1)..k {
            let val = v[idx] / SQRT2;
            out[(row, col)] = val;
            out[(col, row)] = val;
            idx += 1;
        }
    }
    out
}

/// Real coordinates of a Hermitian matrix: d diagonal entries, then for each
/// off-diagonal pair (j < k) the scaled real and imaginary parts. The dot
/// product of coordinates equals tr(A B).
pub fn hvec_len(d: usize) -> usize {
    d * d
}

pub fn hvec(a: &HermitianOperator) -> DVector<f64> {
    let d = a.dim();
    let mut out = DVector::zeros(hvec_len(d));
    let mut idx = 0;
    for j in 0..d {
        out[idx] = a.entry(j, j).re;
        idx += 1;
    }
    for k in 1..d {
        for j in 0..k {
            let z = a.entry(j, k);
            out[idx] = z.re * SQRT2;
            out[idx + 1] = z.im * SQRT2;
            idx += 2;
        }
    }
    out
}

pub fn hmat(v: &[f64], d: usize) -> HermitianOperator {
    debug_assert_eq!(v.len(), hvec_len(d));
    let mut mat = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    let mut idx = 0;
    for j in 0..d {
        mat[(j, j)] = C64::new(v[idx], 0.0);
        idx += 1;
    }
    for k in 1..d {
        for j in 0..k {
            let z = C64::new(v[idx] / SQRT2, v[idx + 1] / SQRT2);
            mat[(j, k)] = z;
            mat[(k, j)] = z.conj();
            idx += 2;
        }
    }
    HermitianOperator::new_unchecked(mat)
}

/// phi(X + iY) = [[X, -Y], [Y, X]]: Hermitian d x d to symmetric 2d x 2d.
/// Positive semidefiniteness is preserved in both directions and
/// tr(phi(A) phi(B)) = 2 tr(A B).
pub fn embed_phi(a: &HermitianOperator) -> DMatrix<f64> {
    let d = a.dim();
    let mut out = DMatrix::zeros(2 * d, 2 * d);
    for r in 0..d {
        for s in 0..d {
            let z = a.entry(r, s);
            out[(r, s)] = z.re;
            out[(r + d, s + d)] = z.re;
            out[(r, s + d)] = -z.im;
            out[(r + d, s)] = z.im;
        }
    }
    out
}

/// Pullback of a symmetric 2d x 2d matrix to a Hermitian d x d matrix,
/// normalized so that unembed(phi(H)) = H.
pub fn unembed_phi(z: &DMatrix<f64>, d: usize) -> HermitianOperator {
    debug_assert_eq!(z.nrows(), 2 * d);
    let mut mat = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for r in 0..d {
        for s in 0..d {
            let re = (z[(r, s)] + z[(r + d, s + d)]) * 0.5;
            let im = (z[(r + d, s)] - z[(r, s + d)]) * 0.5;
            mat[(r, s)] = C64::new(re, im);
        }
    }
    HermitianOperator::new_unchecked(mat)
}

/// Matrix of the linear map hvec-coordinates -> svec(phi(.)) coordinates.
/// Columns are svec(phi(E_i)) over the hvec basis; satisfies M^T M = 2 I.
pub fn embedding_matrix(d: usize) -> DMatrix<f64> {
    let rows = svec_len(2 * d);
    let cols = hvec_len(d);
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..cols {
        let mut unit = vec![0.0; cols];
        unit[i] = 1.0;
        let h = hmat(&unit, d);
        let col = svec(&embed_phi(&h));
        m.set_column(i, &col);
    }
    m
}
