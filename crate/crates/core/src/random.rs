//! Seeded random generators for measurements, densities and subspaces.
//!
//! The coherence audits sample GUE-style Hermitian matrices normalized to
//! unit operator norm and scalars log-uniform in [1e-2, 1e2], which
//! exercises both well- and ill-conditioned regions.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::Tolerances;
use crate::hermitian::{HermitianOperator, Ket, Subspace, C64};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// GUE-style random Hermitian matrix (not normalized).
pub fn gue<R: Rng>(dim: usize, rng: &mut R) -> HermitianOperator {
    let mut mat = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for j in 0..dim {
        let d: f64 = StandardNormal.sample(rng);
        mat[(j, j)] = C64::new(d, 0.0);
        for k in (j + 1)..dim {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            let z = C64::new(re / 2f64.sqrt(), im / 2f64.sqrt());
            mat[(j, k)] = z;
            mat[(k, j)] = z.conj();
        }
    }
    HermitianOperator::new_unchecked(mat)
}

/// GUE sample scaled to unit operator norm.
pub fn unit_gue<R: Rng>(dim: usize, rng: &mut R) -> HermitianOperator {
    loop {
        let h = gue(dim, rng);
        let n = h.operator_norm();
        if n > 1e-8 {
            return h.scale(1.0 / n);
        }
    }
}

/// Random positive semidefinite matrix G G^dagger, unit operator norm.
pub fn unit_psd<R: Rng>(dim: usize, rng: &mut R) -> HermitianOperator {
    let g = ginibre(dim, rng);
    let prod = &g * g.adjoint();
    let h = HermitianOperator::new_unchecked(prod);
    let n = h.operator_norm();
    h.scale(1.0 / n.max(1e-12))
}

/// Random full-rank density operator G G^dagger / tr.
pub fn random_density<R: Rng>(dim: usize, rng: &mut R) -> HermitianOperator {
    let g = ginibre(dim, rng);
    let prod = &g * g.adjoint();
    let h = HermitianOperator::new_unchecked(prod);
    let t = h.trace();
    h.scale(1.0 / t)
}

fn ginibre<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

/// Random normalized ket.
pub fn random_ket<R: Rng>(dim: usize, rng: &mut R) -> Ket {
    loop {
        let v: Vec<C64> = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im)
            })
            .collect();
        let k = Ket::new(v);
        if let Ok(n) = k.normalized() {
            return n;
        }
    }
}

/// Random m-dimensional subspace of a d-dimensional space.
pub fn random_subspace<R: Rng>(dim: usize, m: usize, rng: &mut R, tol: &Tolerances) -> Subspace {
    let kets: Vec<Ket> = (0..m).map(|_| random_ket(dim, rng)).collect();
    // Random kets are almost surely independent; retry on the null event.
    match Subspace::new(dim, kets, tol) {
        Ok(s) => s,
        Err(_) => random_subspace(dim, m, rng, tol),
    }
}

/// Random family of mutually orthogonal subspaces with the given block
/// dimensions (summing to at most dim). Built from one Haar-ish unitary so
/// orthogonality is exact to rounding.
pub fn random_orthogonal_family<R: Rng>(
    dim: usize,
    block_dims: &[usize],
    rng: &mut R,
    tol: &Tolerances,
) -> Vec<Subspace> {
    assert!(block_dims.iter().sum::<usize>() <= dim);
    // QR of a Ginibre matrix gives a Haar unitary up to phases.
    let g = ginibre(dim, rng);
    let qr = g.qr();
    let q = qr.q();
    let mut col = 0;
    let mut out = Vec::with_capacity(block_dims.len());
    for &bd in block_dims {
        let kets: Vec<Ket> = (0..bd)
            .map(|j| Ket {
                amplitudes: q.column(col + j).into_owned(),
            })
            .collect();
        col += bd;
        out.push(Subspace::new(dim, kets, tol).expect("unitary columns are orthonormal"));
    }
    out
}

/// Log-uniform scalar in [1e-2, 1e2].
pub fn log_uniform_scalar<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen::<f64>();
    (std::f64::consts::LN_10 * (4.0 * u - 2.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gue_is_hermitian_and_normalized() {
        let mut rng = seeded_rng(7);
        let h = unit_gue(4, &mut rng);
        assert!((h.operator_norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn random_density_is_valid() {
        let mut rng = seeded_rng(8);
        let rho = random_density(3, &mut rng);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!(rho.min_eigenvalue() > 0.0);
    }

    #[test]
    fn orthogonal_family_blocks_are_orthogonal() {
        let tol = Tolerances::default();
        let mut rng = seeded_rng(9);
        let fam = random_orthogonal_family(5, &[2, 1, 2], &mut rng, &tol);
        for i in 0..fam.len() {
            for j in (i + 1)..fam.len() {
                for a in fam[i].basis() {
                    for b in fam[j].basis() {
                        assert!(a.inner(b).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn scalar_range() {
        let mut rng = seeded_rng(10);
        for _ in 0..100 {
            let s = log_uniform_scalar(&mut rng);
            assert!((1e-2..=1e2).contains(&s));
        }
    }
}
