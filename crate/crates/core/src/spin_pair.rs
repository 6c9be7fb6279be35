//! Worked example: a pair of spin-1 particles.
//!
//! The joint spin state space is 9-dimensional with product basis
//! |l, k> = |l> (x) |k> for l, k in {-1, 0, 1}. The agent starts out certain
//! that the state is (|-1,1> - |0,0> + |1,1>) / sqrt(3) and then learns that
//! the total spin vanishes, either as the subspace spanned by
//! {|-1,1>, |0,0>, |1,-1>} or as the union of the three one-dimensional
//! eigenspaces of the total-spin measurement (the spins were measured but
//! only their sum was registered).

use crate::config::Tolerances;
use crate::hermitian::{HermitianOperator, Ket, Subspace};
use crate::previsions::DensityOperator;

pub const DIM: usize = 9;

/// Index of the product basis ket |l, k>, l and k in {-1, 0, 1}.
pub fn index_of(l: i32, k: i32) -> usize {
    debug_assert!((-1..=1).contains(&l) && (-1..=1).contains(&k));
    (3 * (l + 1) + (k + 1)) as usize
}

pub fn ket(l: i32, k: i32) -> Ket {
    Ket::basis_state(DIM, index_of(l, k))
}

/// The initial pure state (|-1,1> - |0,0> + |1,1>) / sqrt(3).
pub fn psi_star() -> Ket {
    let v = ket(-1, 1).sub(&ket(0, 0)).add(&ket(1, 1));
    v.normalized().expect("nonzero by construction")
}

/// Density operator of the initial pure state.
pub fn rho_star(tol: &Tolerances) -> DensityOperator {
    DensityOperator::new(psi_star().outer(), tol).expect("valid by construction")
}

/// The total-spin-zero subspace span{|-1,1>, |0,0>, |1,-1>}.
pub fn total_spin_zero_subspace(tol: &Tolerances) -> Subspace {
    Subspace::new(DIM, vec![ket(-1, 1), ket(0, 0), ket(1, -1)], tol)
        .expect("orthonormal by construction")
}

/// The same event as a family of three one-dimensional subspaces.
pub fn total_spin_zero_family(tol: &Tolerances) -> Vec<Subspace> {
    [ket(-1, 1), ket(0, 0), ket(1, -1)]
        .into_iter()
        .map(|k| Subspace::new(DIM, vec![k], tol).expect("unit basis ket"))
        .collect()
}

/// Direct-arithmetic update for the subspace event: the projector keeps the
/// |-1,1> and |0,0> components of the state, so the updated density is
/// (|-1,1> - |0,0>)(<-1,1| - <0,0|) / 2.
pub fn expected_subspace_update() -> HermitianOperator {
    let v = ket(-1, 1).sub(&ket(0, 0));
    v.outer().scale(0.5)
}

/// Direct-arithmetic update for the family event: the rank-one projectors
/// kill the cross terms, leaving |-1,1><-1,1| / 2 + |0,0><0,0| / 2.
pub fn expected_family_update() -> HermitianOperator {
    ket(-1, 1)
        .outer()
        .scale(0.5)
        .add(&ket(0, 0).outer().scale(0.5))
}
