//! Complex Hermitian matrix algebra: construction, spectral decomposition,
//! the spectral orderings, projectors onto subspaces, and the projection
//! maps that send a measurement A to P A P (one subspace) or to
//! sum_k P_k A P_k (a family of mutually orthogonal subspaces).
//!
//! Everything here is exact-structure linear algebra; no optimization. All
//! values are immutable after construction and safe to share across threads.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::config::Tolerances;
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// A d x d complex Hermitian matrix. Measurements, utilities and density
/// operators are all carried by this type.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    mat: DMatrix<C64>,
}

impl HermitianOperator {
    /// Validates hermiticity within `tol.hermiticity`, then symmetrizes
    /// (H + H^dagger)/2 so downstream algebra sees an exactly Hermitian
    /// matrix.
    pub fn new(mat: DMatrix<C64>, tol: &Tolerances) -> Result<Self> {
        let dim = mat.nrows();
        if dim == 0 || mat.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim.max(1),
                got: mat.ncols(),
            });
        }
        if dim > tol.dim_cap {
            return Err(Error::DimCapExceeded {
                dim,
                cap: tol.dim_cap,
            });
        }
        let mut deviation = 0.0f64;
        for j in 0..dim {
            for k in j..dim {
                let d = (mat[(j, k)] - mat[(k, j)].conj()).norm();
                deviation = deviation.max(d);
            }
        }
        if deviation > tol.hermiticity {
            return Err(Error::NonHermitianInput {
                deviation,
                tolerance: tol.hermiticity,
            });
        }
        Ok(Self::new_unchecked(mat))
    }

    /// Symmetrizes without validating. For matrices that are Hermitian by
    /// construction (projector algebra, convex combinations, ...).
    pub(crate) fn new_unchecked(mat: DMatrix<C64>) -> Self {
        let dim = mat.nrows();
        let sym = (&mat + mat.adjoint()).scale(0.5);
        Self { dim, mat: sym }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            mat: DMatrix::from_element(dim, dim, c(0.0, 0.0)),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut mat = DMatrix::from_element(dim, dim, c(0.0, 0.0));
        for (j, &v) in diag.iter().enumerate() {
            mat[(j, j)] = c(v, 0.0);
        }
        Self { dim, mat }
    }

    /// Builds from a row-major slice of (re, im) pairs.
    pub fn from_entries(dim: usize, entries: &[(f64, f64)], tol: &Tolerances) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let mat = DMatrix::from_fn(dim, dim, |r, cidx| {
            let (re, im) = entries[r * dim + cidx];
            c(re, im)
        });
        Self::new(mat, tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn entry(&self, j: usize, k: usize) -> C64 {
        self.mat[(j, k)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|j| self.mat[(j, j)].re).sum()
    }

    /// Real Hilbert-Schmidt inner product tr(A B).
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut acc = 0.0;
        for j in 0..self.dim {
            for k in 0..self.dim {
                acc += (self.mat[(j, k)] * other.mat[(k, j)]).re;
            }
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            mat: &self.mat - &other.mat,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            mat: self.mat.scale(factor),
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest |entry| of self - other.
    pub fn entry_distance(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Operator norm, i.e. the largest |eigenvalue|.
    pub fn operator_norm(&self) -> f64 {
        let sp = spectral_decompose_unchecked(self);
        sp.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        spectral_decompose_unchecked(self).min_eigenvalue()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        spectral_decompose_unchecked(self).max_eigenvalue()
    }
}

/// Eigenvalues (ascending) with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Column k is the eigenvector of eigenvalues[k].
    pub eigenvectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// Rebuilds sum_k lambda_k |e_k><e_k|.
    pub fn recompose(&self) -> HermitianOperator {
        let d = self.eigenvectors.nrows();
        let mut mat = DMatrix::from_element(d, d, c(0.0, 0.0));
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvectors.column(k);
            for r in 0..d {
                for s in 0..d {
                    mat[(r, s)] += v[r] * v[s].conj() * c(lam, 0.0);
                }
            }
        }
        HermitianOperator::new_unchecked(mat)
    }

    pub fn eigenvector(&self, k: usize) -> Ket {
        Ket {
            amplitudes: DVector::from_iterator(
                self.eigenvectors.nrows(),
                self.eigenvectors.column(k).iter().copied(),
            ),
        }
    }
}

/// Spectral decomposition of a Hermitian operator, eigenvalues ascending.
pub fn spectral_decompose(a: &HermitianOperator, tol: &Tolerances) -> Result<Spectrum> {
    // Inputs built through HermitianOperator are Hermitian by construction;
    // the check matters for callers that disabled validation upstream.
    let mut deviation = 0.0f64;
    for j in 0..a.dim {
        for k in j..a.dim {
            deviation = deviation.max((a.mat[(j, k)] - a.mat[(k, j)].conj()).norm());
        }
    }
    if deviation > tol.hermiticity {
        return Err(Error::NonHermitianInput {
            deviation,
            tolerance: tol.hermiticity,
        });
    }
    Ok(spectral_decompose_unchecked(a))
}

fn spectral_decompose_unchecked(a: &HermitianOperator) -> Spectrum {
    let eig = a.mat.clone().symmetric_eigen();
    let d = a.dim;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::from_element(d, d, c(0.0, 0.0));
    for (new_col, &old_col) in order.iter().enumerate() {
        vectors.set_column(new_col, &eig.eigenvectors.column(old_col));
    }
    Spectrum {
        eigenvalues,
        eigenvectors: vectors,
    }
}

/// Outcome of comparing two measurements in the spectral orderings.
///
/// The strongest applicable class is returned: a strictly dominating
/// difference reports `StrictGt` even though the weak orderings also hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    /// min sp(A - B) > 0 beyond the eigenvalue band.
    StrictGt,
    /// A - B is positive semidefinite within the band and A differs from B.
    WeakGeqStrictNeq,
    /// A - B is positive semidefinite within the band and A equals B.
    WeakGeq,
    /// A - B has an eigenvalue below the band: the operators are not
    /// comparable in these orderings.
    Incomparable,
}

/// Classifies A versus B via the minimum eigenvalue of A - B.
///
/// Eigenvalues inside [-eig, eig] are treated as zero, so exact boundary
/// cases land in the weak classes; callers that need the open cone must ask
/// for `StrictGt` explicitly.
pub fn compare(a: &HermitianOperator, b: &HermitianOperator, tol: &Tolerances) -> Result<Ordering> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: b.dim,
        });
    }
    let diff = a.sub(b);
    let min = diff.min_eigenvalue();
    if min > tol.eig {
        Ok(Ordering::StrictGt)
    } else if min >= -tol.eig {
        if diff.max_abs_entry() > tol.recon {
            Ok(Ordering::WeakGeqStrictNeq)
        } else {
            Ok(Ordering::WeakGeq)
        }
    } else {
        Ok(Ordering::Incomparable)
    }
}

impl Ordering {
    /// True for the classes asserting A >= B.
    pub fn is_weakly_geq(self) -> bool {
        matches!(
            self,
            Ordering::StrictGt | Ordering::WeakGeqStrictNeq | Ordering::WeakGeq
        )
    }
}

/// A vector in the d-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    pub amplitudes: DVector<C64>,
}

impl Ket {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        Self {
            amplitudes: DVector::from_vec(amplitudes),
        }
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        Self::new(pairs.iter().map(|&(re, im)| c(re, im)).collect())
    }

    /// Computational basis state |index>.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut v = DVector::from_element(dim, c(0.0, 0.0));
        v[index] = c(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::InvalidKet);
        }
        Ok(Self {
            amplitudes: self.amplitudes.map(|z| z / n),
        })
    }

    /// <self|other>.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |self><self|.
    pub fn outer(&self) -> HermitianOperator {
        let d = self.dim();
        let mut mat = DMatrix::from_element(d, d, c(0.0, 0.0));
        for r in 0..d {
            for s in 0..d {
                mat[(r, s)] = self.amplitudes[r] * self.amplitudes[s].conj();
            }
        }
        HermitianOperator { dim: d, mat }
    }

    pub fn add(&self, other: &Ket) -> Ket {
        Ket {
            amplitudes: &self.amplitudes + &other.amplitudes,
        }
    }

    pub fn sub(&self, other: &Ket) -> Ket {
        Ket {
            amplitudes: &self.amplitudes - &other.amplitudes,
        }
    }

    pub fn scale(&self, factor: C64) -> Ket {
        Ket {
            amplitudes: self.amplitudes.map(|z| z * factor),
        }
    }
}

/// A subspace of the ambient Hilbert space, held as an orthonormal basis.
///
/// Input kets are orthonormalized by modified Gram-Schmidt with pivoting;
/// vectors whose residual after orthogonalization falls below
/// `tol.independence` are rejected as linearly dependent.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Ket>,
}

impl Subspace {
    pub fn new(ambient: usize, kets: Vec<Ket>, tol: &Tolerances) -> Result<Self> {
        if kets.is_empty() || kets.len() > ambient {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                got: kets.len(),
            });
        }
        for k in &kets {
            if k.dim() != ambient {
                return Err(Error::DimensionMismatch {
                    expected: ambient,
                    got: k.dim(),
                });
            }
        }
        let mut remaining: Vec<(usize, Ket)> = kets.into_iter().enumerate().collect();
        let mut basis: Vec<Ket> = Vec::with_capacity(remaining.len());
        let total = remaining.len();
        while basis.len() < total {
            // Pivot: orthogonalize every remaining ket, take the one with
            // the largest residual.
            let mut best: Option<(usize, Ket, f64)> = None;
            for (pos, (_, ket)) in remaining.iter().enumerate() {
                let mut v = ket.clone();
                for b in &basis {
                    let coeff = b.inner(&v);
                    v = v.sub(&b.scale(coeff));
                }
                let r = v.norm();
                if best.as_ref().map_or(true, |(_, _, br)| r > *br) {
                    best = Some((pos, v, r));
                }
            }
            let (pos, v, residual) = best.unwrap();
            let original_index = remaining[pos].0;
            if residual < tol.independence {
                return Err(Error::LinearlyDependentBasis {
                    index: original_index,
                    residual,
                });
            }
            // Second orthogonalization pass tightens orthogonality to
            // machine precision.
            let mut v2 = v;
            for b in &basis {
                let coeff = b.inner(&v2);
                v2 = v2.sub(&b.scale(coeff));
            }
            basis.push(v2.normalized()?);
            remaining.remove(pos);
        }
        Ok(Self { ambient, basis })
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            ambient,
            basis: (0..ambient).map(|j| Ket::basis_state(ambient, j)).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Ket] {
        &self.basis
    }
}

/// P_V = sum_j |b_j><b_j| over the subspace basis.
pub fn projector_of(v: &Subspace) -> HermitianOperator {
    let mut acc = HermitianOperator::zeros(v.ambient);
    for b in &v.basis {
        acc = acc.add(&b.outer());
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionKind {
    Subspace,
    OrthogonalFamily,
}

/// The linear projection on measurement space induced by a conditioning
/// event: A -> P A P for one subspace, A -> sum_k P_k A P_k for a family of
/// mutually orthogonal subspaces. Idempotent and PSD-preserving; its kernel
/// is the space of indifferent measurements.
#[derive(Debug, Clone)]
pub struct ProjectionMap {
    kind: ProjectionKind,
    subspaces: Vec<Subspace>,
    projectors: Vec<HermitianOperator>,
}

impl ProjectionMap {
    pub fn from_subspace(v: Subspace) -> Self {
        let p = projector_of(&v);
        Self {
            kind: ProjectionKind::Subspace,
            subspaces: vec![v],
            projectors: vec![p],
        }
    }

    /// Requires pairwise orthogonality: P_k P_l = 0 for k != l.
    pub fn from_family(subspaces: Vec<Subspace>, tol: &Tolerances) -> Result<Self> {
        assert!(!subspaces.is_empty());
        if subspaces.len() == 1 {
            return Ok(Self::from_subspace(subspaces.into_iter().next().unwrap()));
        }
        for i in 0..subspaces.len() {
            for j in (i + 1)..subspaces.len() {
                for bi in subspaces[i].basis() {
                    for bj in subspaces[j].basis() {
                        let overlap = bi.inner(bj).norm();
                        if overlap > tol.orthonormal {
                            return Err(Error::NonOrthogonalFamily {
                                first: i,
                                second: j,
                                overlap,
                            });
                        }
                    }
                }
            }
        }
        let projectors = subspaces.iter().map(projector_of).collect();
        Ok(Self {
            kind: ProjectionKind::OrthogonalFamily,
            subspaces,
            projectors,
        })
    }

    pub fn kind(&self) -> ProjectionKind {
        self.kind
    }

    pub fn ambient_dim(&self) -> usize {
        self.subspaces[0].ambient_dim()
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn projectors(&self) -> &[HermitianOperator] {
        &self.projectors
    }

    /// Dimensions of the range blocks.
    pub fn block_dims(&self) -> Vec<usize> {
        self.subspaces.iter().map(|s| s.dim()).collect()
    }

    /// Total dimension of the reduced space.
    pub fn reduced_dim(&self) -> usize {
        self.block_dims().iter().sum()
    }

    /// Applies the map: P A P or sum_k P_k A P_k.
    pub fn apply(&self, a: &HermitianOperator) -> Result<HermitianOperator> {
        if a.dim() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: a.dim(),
            });
        }
        let mut acc = DMatrix::from_element(a.dim(), a.dim(), c(0.0, 0.0));
        for p in &self.projectors {
            acc += p.matrix() * a.matrix() * p.matrix();
        }
        Ok(HermitianOperator::new_unchecked(acc))
    }

    /// Kernel membership: the projected measurement vanishes in operator
    /// norm, so the agent must be indifferent to it.
    pub fn is_indifferent(&self, a: &HermitianOperator, tol: &Tolerances) -> Result<bool> {
        let image = self.apply(a)?;
        Ok(image.operator_norm() <= tol.indiff)
    }

    /// Compression to the subspace basis: C[j][k] = <b_j|A|b_k>.
    /// Only defined for single-subspace maps; the range of a family map is
    /// block-diagonal and is exposed via `compress_blocks`.
    pub fn compress_to_range(&self, a: &HermitianOperator) -> Result<HermitianOperator> {
        if self.kind != ProjectionKind::Subspace {
            return Err(Error::UnsupportedKind);
        }
        Ok(compress_onto(&self.subspaces[0], a)?)
    }

    /// Per-block compressions <b_j|A|b_k> over each subspace basis.
    pub fn compress_blocks(&self, a: &HermitianOperator) -> Result<Vec<HermitianOperator>> {
        self.subspaces.iter().map(|s| compress_onto(s, a)).collect()
    }

    /// Compressions assembled into one block-diagonal matrix on the reduced
    /// space. For a single subspace this is the plain compression.
    pub fn compress_compound(&self, a: &HermitianOperator) -> Result<HermitianOperator> {
        let blocks = self.compress_blocks(a)?;
        let total = self.reduced_dim();
        let mut mat = DMatrix::from_element(total, total, c(0.0, 0.0));
        let mut offset = 0;
        for b in &blocks {
            let m = b.dim();
            for r in 0..m {
                for s in 0..m {
                    mat[(offset + r, offset + s)] = b.entry(r, s);
                }
            }
            offset += m;
        }
        Ok(HermitianOperator::new_unchecked(mat))
    }

    /// Inverse of `compress_compound` onto the range: embeds a reduced
    /// (block-diagonal) operator back as sum_jk C[j][k] |b_j><b_k| in the
    /// ambient space.
    pub fn extend_compound(&self, compound: &HermitianOperator) -> Result<HermitianOperator> {
        if compound.dim() != self.reduced_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.reduced_dim(),
                got: compound.dim(),
            });
        }
        let d = self.ambient_dim();
        let mut mat = DMatrix::from_element(d, d, c(0.0, 0.0));
        let mut offset = 0;
        for s in &self.subspaces {
            let m = s.dim();
            for j in 0..m {
                for k in 0..m {
                    let coeff = compound.entry(offset + j, offset + k);
                    let bj = &s.basis()[j].amplitudes;
                    let bk = &s.basis()[k].amplitudes;
                    for r in 0..d {
                        for t in 0..d {
                            mat[(r, t)] += coeff * bj[r] * bk[t].conj();
                        }
                    }
                }
            }
            offset += m;
        }
        Ok(HermitianOperator::new_unchecked(mat))
    }
}

fn compress_onto(s: &Subspace, a: &HermitianOperator) -> Result<HermitianOperator> {
    if a.dim() != s.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: s.ambient_dim(),
            got: a.dim(),
        });
    }
    let m = s.dim();
    let mut mat = DMatrix::from_element(m, m, c(0.0, 0.0));
    for j in 0..m {
        for k in 0..m {
            let mut acc = c(0.0, 0.0);
            let bj = &s.basis()[j].amplitudes;
            let bk = &s.basis()[k].amplitudes;
            for r in 0..a.dim() {
                for t in 0..a.dim() {
                    acc += bj[r].conj() * a.entry(r, t) * bk[t];
                }
            }
            mat[(j, k)] = acc;
        }
    }
    Ok(HermitianOperator::new_unchecked(mat))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn identity_spectrum_is_all_ones() {
        let a = HermitianOperator::identity(3);
        let sp = spectral_decompose(&a, &tol()).unwrap();
        for l in &sp.eigenvalues {
            assert!((l - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let a = HermitianOperator::from_diagonal(&[-1.0, 0.0, 2.0]);
        let sp = spectral_decompose(&a, &tol()).unwrap();
        assert!((sp.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!(sp.eigenvalues[1].abs() < 1e-12);
        assert!((sp.eigenvalues[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_input_rejected() {
        let mat =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.5), c(1.0, 0.5), c(2.0, 0.0)]);
        // entries[0][1] should be conj(entries[1][0]); both have +0.5i.
        let err = HermitianOperator::new(mat, &tol()).unwrap_err();
        assert!(matches!(err, Error::NonHermitianInput { .. }));
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let mut t = tol();
        t.dim_cap = 3;
        let mat = DMatrix::from_element(4, 4, c(0.0, 0.0));
        let err = HermitianOperator::new(mat, &t).unwrap_err();
        assert!(matches!(err, Error::DimCapExceeded { dim: 4, cap: 3 }));
    }

    #[test]
    fn one_dimensional_space_works() {
        let t = tol();
        let a = HermitianOperator::from_diagonal(&[2.5]);
        let sp = spectral_decompose(&a, &t).unwrap();
        assert!((sp.eigenvalues[0] - 2.5).abs() < 1e-14);
        assert_eq!(
            compare(&a, &HermitianOperator::zeros(1), &t).unwrap(),
            Ordering::StrictGt
        );
    }

    #[test]
    fn compare_classes() {
        let t = tol();
        let id = HermitianOperator::identity(2);
        let zero = HermitianOperator::zeros(2);
        assert_eq!(compare(&id, &zero, &t).unwrap(), Ordering::StrictGt);

        let a = HermitianOperator::from_diagonal(&[1.0, 0.0]);
        assert_eq!(compare(&a, &zero, &t).unwrap(), Ordering::WeakGeqStrictNeq);

        let b = HermitianOperator::from_diagonal(&[1.0, -1.0]);
        assert_eq!(compare(&b, &zero, &t).unwrap(), Ordering::Incomparable);

        assert_eq!(compare(&zero, &zero, &t).unwrap(), Ordering::WeakGeq);
    }

    #[test]
    fn projector_of_full_space_is_identity() {
        let v = Subspace::full(3);
        let p = projector_of(&v);
        assert!(p.entry_distance(&HermitianOperator::identity(3)) < 1e-12);
    }

    #[test]
    fn projector_of_first_axis() {
        let v = Subspace::new(2, vec![Ket::basis_state(2, 0)], &tol()).unwrap();
        let p = projector_of(&v);
        assert!(p.entry_distance(&HermitianOperator::from_diagonal(&[1.0, 0.0])) < 1e-12);
    }

    #[test]
    fn gram_schmidt_rejects_dependent() {
        let t = tol();
        let k0 = Ket::basis_state(3, 0);
        let k1 = Ket::basis_state(3, 0).scale(c(2.0, 0.0));
        let err = Subspace::new(3, vec![k0, k1], &t).unwrap_err();
        assert!(matches!(err, Error::LinearlyDependentBasis { .. }));
    }

    #[test]
    fn gram_schmidt_orthonormalizes() {
        let t = tol();
        let k0 = Ket::from_pairs(&[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        let k1 = Ket::from_pairs(&[(1.0, 0.0), (0.0, 1.0), (0.0, 0.0)]);
        let s = Subspace::new(3, vec![k0, k1], &t).unwrap();
        assert_eq!(s.dim(), 2);
        for a in s.basis() {
            assert!((a.norm() - 1.0).abs() < t.norm.max(1e-12));
        }
        assert!(s.basis()[0].inner(&s.basis()[1]).norm() < 1e-12);
    }

    #[test]
    fn projection_fixed_point_and_zero() {
        let t = tol();
        let v = Subspace::new(4, vec![Ket::basis_state(4, 0), Ket::basis_state(4, 1)], &t).unwrap();
        let p = ProjectionMap::from_subspace(v);
        let zero = HermitianOperator::zeros(4);
        assert!(p.apply(&zero).unwrap().max_abs_entry() < 1e-15);

        let a = HermitianOperator::from_diagonal(&[2.0, -1.0, 0.0, 0.0]);
        let pa = p.apply(&a).unwrap();
        assert!(pa.entry_distance(&a) < 1e-12);
    }

    #[test]
    fn indifference_on_orthogonal_complement() {
        let t = tol();
        let v = Subspace::new(3, vec![Ket::basis_state(3, 0)], &t).unwrap();
        let p = ProjectionMap::from_subspace(v);
        // Supported entirely on the complement.
        let a = HermitianOperator::from_diagonal(&[0.0, 1.0, -2.0]);
        assert!(p.is_indifferent(&a, &t).unwrap());
        // The projector itself maps to itself.
        let pv = HermitianOperator::from_diagonal(&[1.0, 0.0, 0.0]);
        assert!(!p.is_indifferent(&pv, &t).unwrap());
    }

    #[test]
    fn compress_examples() {
        let t = tol();
        let v = Subspace::new(
            4,
            vec![
                Ket::basis_state(4, 0),
                Ket::basis_state(4, 1),
                Ket::basis_state(4, 2),
            ],
            &t,
        )
        .unwrap();
        let p = ProjectionMap::from_subspace(v);
        let c_id = p
            .compress_to_range(&HermitianOperator::identity(4))
            .unwrap();
        assert!(c_id.entry_distance(&HermitianOperator::identity(3)) < 1e-12);

        // A with <b_0|A|b_1> = i compresses hermitianly.
        let mut m = DMatrix::from_element(4, 4, c(0.0, 0.0));
        m[(0, 1)] = c(0.0, 1.0);
        m[(1, 0)] = c(0.0, -1.0);
        let a = HermitianOperator::new(m, &t).unwrap();
        let comp = p.compress_to_range(&a).unwrap();
        assert!((comp.entry(0, 1) - c(0.0, 1.0)).norm() < 1e-12);
        assert!((comp.entry(1, 0) - c(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn projected_outer_difference_is_indifferent() {
        // For any ket outside the union of the family's subspaces, the
        // measurement p(|k><k|) - |k><k| lies in the kernel of p.
        let t = tol();
        let v1 = Subspace::new(4, vec![Ket::basis_state(4, 0)], &t).unwrap();
        let v2 = Subspace::new(4, vec![Ket::basis_state(4, 1)], &t).unwrap();
        let p = ProjectionMap::from_family(vec![v1, v2], &t).unwrap();
        let phi = Ket::from_pairs(&[(0.5, 0.0), (0.5, 0.1), (0.6, -0.2), (0.3, 0.0)])
            .normalized()
            .unwrap();
        let outer = phi.outer();
        let probe = p.apply(&outer).unwrap().sub(&outer);
        assert!(p.is_indifferent(&probe, &t).unwrap());
    }

    #[test]
    fn projector_compresses_to_reduced_identity() {
        let t = tol();
        let v = Subspace::new(3, vec![Ket::basis_state(3, 0), Ket::basis_state(3, 2)], &t).unwrap();
        let p = ProjectionMap::from_subspace(v.clone());
        let compressed = p.compress_to_range(&projector_of(&v)).unwrap();
        assert!(compressed.entry_distance(&HermitianOperator::identity(2)) < 1e-12);
    }

    #[test]
    fn family_compression_is_block_list() {
        let t = tol();
        let v1 = Subspace::new(3, vec![Ket::basis_state(3, 0)], &t).unwrap();
        let v2 =
            Subspace::new(3, vec![Ket::basis_state(3, 1), Ket::basis_state(3, 2)], &t).unwrap();
        let p = ProjectionMap::from_family(vec![v1, v2], &t).unwrap();
        assert!(p
            .compress_to_range(&HermitianOperator::identity(3))
            .is_err());
        let blocks = p.compress_blocks(&HermitianOperator::identity(3)).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].dim(), 1);
        assert_eq!(blocks[1].dim(), 2);
    }

    #[test]
    fn family_requires_orthogonality() {
        let t = tol();
        let v1 = Subspace::new(2, vec![Ket::basis_state(2, 0)], &t).unwrap();
        let v2 = Subspace::new(2, vec![Ket::from_pairs(&[(1.0, 0.0), (1.0, 0.0)])], &t).unwrap();
        let err = ProjectionMap::from_family(vec![v1, v2], &t).unwrap_err();
        assert!(matches!(err, Error::NonOrthogonalFamily { .. }));
    }
}
