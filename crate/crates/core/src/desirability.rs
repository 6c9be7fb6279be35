//! Assessments of desirable measurements, consistency, natural-extension
//! membership, coherence audits and indifference-compatibility checks.
//!
//! A finite assessment generates the smallest coherent set containing it:
//! the union of the strictly positive definite cone with all nonnegative
//! combinations of generators plus something positive semidefinite.
//! Membership questions reduce to spectral-margin programs handed to the
//! cone oracle; the margin doubles as the boundary classifier.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::cone::{classify_interval, margin_program, FeasStatus, Strictness};
use crate::config::{SolverParams, Tolerances};
use crate::error::{Error, Result};
use crate::hermitian::{compare, HermitianOperator, ProjectionMap};
use crate::random::{log_uniform_scalar, seeded_rng, unit_gue, unit_psd};

/// A finite set of measurements the agent judges desirable.
#[derive(Debug, Clone)]
pub struct Assessment {
    dim: usize,
    generators: Vec<HermitianOperator>,
}

impl Assessment {
    pub fn new(dim: usize, generators: Vec<HermitianOperator>) -> Result<Self> {
        for g in &generators {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: g.dim(),
                });
            }
        }
        Ok(Self { dim, generators })
    }

    /// The empty assessment; its natural extension is exactly the strictly
    /// positive cone.
    pub fn vacuous(dim: usize) -> Self {
        Self {
            dim,
            generators: Vec::new(),
        }
    }

    /// Assessment whose credal set is a margin-wide box around the given
    /// density: for every canonical basis direction F it judges both
    /// F - (tr(F rho) - margin) I and its mirror desirable. Any positive
    /// margin keeps the assessment strictly consistent; the box collapses to
    /// the single density as margin -> 0.
    pub fn pinning_density(rho: &HermitianOperator, margin: f64) -> Self {
        let d = rho.dim();
        let id = HermitianOperator::identity(d);
        let mut generators = Vec::with_capacity(2 * d * d);
        for f in canonical_basis(d) {
            let c = f.inner(rho);
            generators.push(f.sub(&id.scale(c - margin)));
            generators.push(f.scale(-1.0).add(&id.scale(c + margin)));
        }
        Self { dim: d, generators }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[HermitianOperator] {
        &self.generators
    }
}

/// Canonical Hermitian basis: diagonal units, then for each pair j < k the
/// symmetric and antisymmetric (imaginary) units.
pub fn canonical_basis(d: usize) -> Vec<HermitianOperator> {
    use num_complex::Complex;
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        let mut m = nalgebra::DMatrix::from_element(d, d, Complex::new(0.0, 0.0));
        m[(j, j)] = Complex::new(1.0, 0.0);
        out.push(HermitianOperator::new_unchecked(m));
    }
    for k in 1..d {
        for j in 0..k {
            let mut sym = nalgebra::DMatrix::from_element(d, d, Complex::new(0.0, 0.0));
            sym[(j, k)] = Complex::new(1.0, 0.0);
            sym[(k, j)] = Complex::new(1.0, 0.0);
            out.push(HermitianOperator::new_unchecked(sym));
            let mut skew = nalgebra::DMatrix::from_element(d, d, Complex::new(0.0, 0.0));
            skew[(j, k)] = Complex::new(0.0, 1.0);
            skew[(k, j)] = Complex::new(0.0, -1.0);
            out.push(HermitianOperator::new_unchecked(skew));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConsistencyStatus {
    Consistent,
    Inconsistent,
    /// The sure-loss margin sits inside the tolerance band.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipStatus {
    Member,
    NonMember,
    Boundary,
}

/// Which branch of the natural extension admitted the measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipBranch {
    /// Strictly positive definite: accepted as a sure gain.
    Background,
    /// Dominates a nonnegative combination of the generators.
    PositiveHull,
}

#[derive(Debug, Clone)]
pub struct Membership {
    pub status: MembershipStatus,
    pub branch: Option<MembershipBranch>,
    /// Optimal spectral margin after normalizing the probe to unit operator
    /// norm; the sign carries the classification.
    pub margin: f64,
    /// Combination coefficients over the original generators, when the
    /// positive-hull branch produced the answer.
    pub witness: Option<Vec<f64>>,
    /// Separating density for definite non-members, when available.
    pub separator: Option<HermitianOperator>,
}

#[derive(Debug, Clone)]
pub struct ConsistencyCertificate {
    pub status: ConsistencyStatus,
    /// Sure-loss margin of the best convex combination of generators.
    pub margin: Option<f64>,
    /// Convex weights achieving the sure loss, for inconsistent assessments.
    pub sure_loss_weights: Option<Vec<f64>>,
    /// Density giving every generator positive expectation, for consistent
    /// assessments.
    pub credal_witness: Option<HermitianOperator>,
}

/// The natural extension of a consistent (or boundary-consistent) finite
/// assessment, with consistency checked once at construction and membership
/// certificates cached per probe.
pub struct NaturalExtensionModel {
    assessment: Assessment,
    normalized: Vec<HermitianOperator>,
    norms: Vec<f64>,
    consistency: ConsistencyCertificate,
    /// A density with strictly positive expectation on every generator,
    /// when one is available; used to repair dual certificates into exact
    /// admissibility.
    anchor: Option<HermitianOperator>,
    tol: Tolerances,
    params: SolverParams,
    cache: Mutex<HashMap<Vec<u64>, Membership>>,
}

impl std::fmt::Debug for NaturalExtensionModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NaturalExtensionModel")
            .field("dim", &self.assessment.dim)
            .field("generators", &self.assessment.generators.len())
            .field("consistency", &self.consistency.status)
            .finish()
    }
}

impl NaturalExtensionModel {
    /// Runs the consistency check and keeps its certificate.
    pub fn build(assessment: Assessment, tol: Tolerances) -> Result<Self> {
        let params = SolverParams::default();
        let mut normalized = Vec::with_capacity(assessment.generators.len());
        let mut norms = Vec::with_capacity(assessment.generators.len());
        for g in &assessment.generators {
            let n = g.operator_norm();
            if n > 1e-14 {
                normalized.push(g.scale(1.0 / n));
                norms.push(n);
            } else {
                // The zero measurement: a nonnegative multiple of it already
                // realizes a (weak) sure loss, which the margin program will
                // pick up; keep it unscaled.
                normalized.push(g.clone());
                norms.push(1.0);
            }
        }
        let consistency = consistency_certificate(&normalized, assessment.dim, &tol, &params)?;
        let anchor = consistency.credal_witness.as_ref().and_then(|w| {
            let strictly_positive = normalized.iter().all(|g| w.inner(g) > 0.0);
            if strictly_positive {
                Some(w.clone())
            } else {
                None
            }
        });
        Ok(Self {
            assessment,
            normalized,
            norms,
            consistency,
            anchor,
            tol,
            params,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn assessment(&self) -> &Assessment {
        &self.assessment
    }

    pub fn dim(&self) -> usize {
        self.assessment.dim
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn solver_params(&self) -> &SolverParams {
        &self.params
    }

    pub fn consistency(&self) -> &ConsistencyCertificate {
        &self.consistency
    }

    /// Density giving every generator a strictly positive expectation, when
    /// known. Trivially the maximally mixed state for the vacuous model.
    pub(crate) fn credal_anchor(&self) -> Option<&HermitianOperator> {
        self.anchor.as_ref()
    }

    pub fn is_consistent(&self) -> bool {
        self.consistency.status != ConsistencyStatus::Inconsistent
    }

    fn require_consistent(&self) -> Result<()> {
        if self.consistency.status == ConsistencyStatus::Inconsistent {
            Err(Error::InconsistentAssessment)
        } else {
            Ok(())
        }
    }

    /// Does the natural extension contain the measurement?
    ///
    /// The probe is normalized to unit operator norm (membership of a cone
    /// is scale invariant) and classified by the optimal margin of
    /// max { t : lambda >= 0, B - sum lambda_i A_i >= t I }: at or above the
    /// strict margin it is a member, below the certificate tolerance it is
    /// not, and in between sits the boundary band. Measurements at or below
    /// the null measurement are rejected outright.
    pub fn member(&self, probe: &HermitianOperator) -> Result<Membership> {
        self.require_consistent()?;
        if probe.dim() != self.assessment.dim {
            return Err(Error::DimensionMismatch {
                expected: self.assessment.dim,
                got: probe.dim(),
            });
        }
        let key = cache_key(probe);
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let result = self.member_uncached(probe)?;
        self.cache
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| result.clone());
        Ok(result)
    }

    fn member_uncached(&self, probe: &HermitianOperator) -> Result<Membership> {
        let norm = probe.operator_norm();
        // Nothing at or below the null measurement is ever desirable.
        if probe.max_eigenvalue() <= self.tol.eig * norm.max(1.0) {
            return Ok(Membership {
                status: MembershipStatus::NonMember,
                branch: None,
                margin: f64::NEG_INFINITY,
                witness: None,
                separator: None,
            });
        }
        let unit = probe.scale(1.0 / norm);
        let eps = self.tol.strict_eps;
        let min_eig = unit.min_eigenvalue();
        if min_eig > eps {
            return Ok(Membership {
                status: MembershipStatus::Member,
                branch: Some(MembershipBranch::Background),
                margin: min_eig,
                witness: Some(vec![0.0; self.assessment.generators.len()]),
                separator: None,
            });
        }
        if self.normalized.is_empty() {
            // Vacuous assessment: the margin is the minimum eigenvalue.
            let status =
                match classify_interval(min_eig, min_eig, Strictness::Strict { eps }, &self.tol) {
                    FeasStatus::Feasible => MembershipStatus::Member,
                    FeasStatus::Infeasible => MembershipStatus::NonMember,
                    FeasStatus::Boundary => MembershipStatus::Boundary,
                };
            return Ok(Membership {
                status,
                branch: if status == MembershipStatus::Member {
                    Some(MembershipBranch::Background)
                } else {
                    None
                },
                margin: min_eig,
                witness: None,
                separator: None,
            });
        }
        let outcome = margin_program(
            &self.normalized,
            &unit,
            false,
            self.anchor.as_ref(),
            &self.tol,
            &self.params,
        )?;
        let status = match classify_interval(
            outcome.lower,
            outcome.upper,
            Strictness::Strict { eps },
            &self.tol,
        ) {
            FeasStatus::Feasible => MembershipStatus::Member,
            FeasStatus::Infeasible => MembershipStatus::NonMember,
            FeasStatus::Boundary => MembershipStatus::Boundary,
        };
        // Map coefficients back to the original generator scaling.
        let witness: Vec<f64> = outcome
            .lambda
            .iter()
            .zip(&self.norms)
            .map(|(l, gn)| l * norm / gn)
            .collect();
        Ok(Membership {
            status,
            branch: match status {
                MembershipStatus::Member => Some(MembershipBranch::PositiveHull),
                _ => None,
            },
            margin: outcome.estimate(),
            witness: Some(witness),
            separator: if status == MembershipStatus::NonMember {
                outcome.dual_density
            } else {
                None
            },
        })
    }

    /// Randomized audit of the coherence axioms. Constructed members carry
    /// fat margins, so any violation indicates a solver or tolerance defect
    /// rather than genuine incoherence.
    pub fn check_coherence_axioms(&self, samples: usize, seed: u64) -> Result<AuditReport> {
        self.require_consistent()?;
        let d = self.assessment.dim;
        let mut rng = seeded_rng(seed);
        let mut report = AuditReport {
            samples,
            violations: Vec::new(),
            boundary_hits: 0,
        };
        for _ in 0..samples {
            // D1: nothing classified a member may sit at or below zero.
            let probe = unit_gue(d, &mut rng);
            let m = self.member(&probe)?;
            if m.status == MembershipStatus::Member {
                let zero = HermitianOperator::zeros(d);
                if compare(&zero, &probe, &self.tol)?.is_weakly_geq() {
                    report.violations.push(AuditViolation {
                        axiom: CoherenceAxiom::RejectingPossibleLoss,
                        detail: "member dominated by the null measurement".into(),
                    });
                }
            }
            if m.status == MembershipStatus::Boundary {
                report.boundary_hits += 1;
            }

            // D2: strictly positive samples are members.
            let gain = unit_psd(d, &mut rng).add(&HermitianOperator::identity(d).scale(0.05));
            if self.member(&gain)?.status != MembershipStatus::Member {
                report.violations.push(AuditViolation {
                    axiom: CoherenceAxiom::AcceptingSureGain,
                    detail: "strictly positive measurement rejected".into(),
                });
            }

            // D3: a member plus a positive-semidefinite bump stays a member.
            let member_a = self.constructed_member(&mut rng);
            if self.member(&member_a)?.status != MembershipStatus::Member {
                report.violations.push(AuditViolation {
                    axiom: CoherenceAxiom::Monotonicity,
                    detail: "constructed member rejected".into(),
                });
            } else {
                let bumped = member_a.add(&unit_psd(d, &mut rng));
                if self.member(&bumped)?.status != MembershipStatus::Member {
                    report.violations.push(AuditViolation {
                        axiom: CoherenceAxiom::Monotonicity,
                        detail: "member plus PSD bump rejected".into(),
                    });
                }
            }

            // D4: sums of members are members.
            let member_b = self.constructed_member(&mut rng);
            if self.member(&member_a.add(&member_b))?.status != MembershipStatus::Member {
                report.violations.push(AuditViolation {
                    axiom: CoherenceAxiom::Additivity,
                    detail: "sum of members rejected".into(),
                });
            }

            // D5: positive scalings preserve membership.
            let scale = log_uniform_scalar(&mut rng);
            if self.member(&member_a.scale(scale))?.status != MembershipStatus::Member {
                report.violations.push(AuditViolation {
                    axiom: CoherenceAxiom::PositiveScaling,
                    detail: format!("scaling by {scale:.3e} broke membership"),
                });
            }
        }
        Ok(report)
    }

    /// A measurement that is a member by construction, with margin bounded
    /// well away from the band: a nonnegative generator combination plus
    /// something positive semidefinite plus a strict identity bump.
    fn constructed_member<R: rand::Rng>(&self, rng: &mut R) -> HermitianOperator {
        let d = self.assessment.dim;
        let mut acc = HermitianOperator::zeros(d);
        for g in &self.normalized {
            let w: f64 = rng.gen::<f64>();
            acc = acc.add(&g.scale(w));
        }
        acc = acc.add(&unit_psd(d, rng));
        let bump = 0.05 * (acc.operator_norm() + 1.0);
        acc.add(&HermitianOperator::identity(d).scale(bump))
    }

    /// Is the model compatible with the indifference space of the projection
    /// map, i.e. does adding kernel elements never change desirability?
    /// Runs the exact focusedness check on the generators plus a randomized
    /// probe of kernel perturbations and focusedness flips.
    pub fn check_compatibility(
        &self,
        p: &ProjectionMap,
        samples: usize,
        seed: u64,
    ) -> Result<CompatibilityReport> {
        self.require_consistent()?;
        if p.ambient_dim() != self.assessment.dim {
            return Err(Error::DimensionMismatch {
                expected: self.assessment.dim,
                got: p.ambient_dim(),
            });
        }
        let member_fn = |a: &HermitianOperator| self.member(a);
        compatibility_probe(
            self.assessment.dim,
            &member_fn,
            self.assessment.generators(),
            |rng| self.constructed_member(rng),
            p,
            samples,
            seed,
            &self.tol,
        )
    }
}

fn cache_key(op: &HermitianOperator) -> Vec<u64> {
    let mut key = Vec::with_capacity(2 * op.dim() * op.dim());
    for j in 0..op.dim() {
        for k in 0..op.dim() {
            let z = op.entry(j, k);
            key.push(z.re.to_bits());
            key.push(z.im.to_bits());
        }
    }
    key
}

fn consistency_certificate(
    normalized: &[HermitianOperator],
    dim: usize,
    tol: &Tolerances,
    params: &SolverParams,
) -> Result<ConsistencyCertificate> {
    if normalized.is_empty() {
        return Ok(ConsistencyCertificate {
            status: ConsistencyStatus::Consistent,
            margin: None,
            sure_loss_weights: None,
            credal_witness: Some(HermitianOperator::identity(dim).scale(1.0 / dim as f64)),
        });
    }
    // Inconsistent iff some convex combination of generators fits under the
    // null measurement: margin of  max { t : 0 - sum lambda_i A_i >= t I }.
    let zero = HermitianOperator::zeros(dim);
    let outcome = margin_program(normalized, &zero, true, None, tol, params)?;
    let status = match classify_interval(outcome.lower, outcome.upper, Strictness::Weak, tol) {
        FeasStatus::Feasible => ConsistencyStatus::Inconsistent,
        FeasStatus::Infeasible => ConsistencyStatus::Consistent,
        FeasStatus::Boundary => ConsistencyStatus::Boundary,
    };
    Ok(ConsistencyCertificate {
        status,
        margin: Some(outcome.estimate()),
        sure_loss_weights: if status == ConsistencyStatus::Inconsistent {
            Some(outcome.lambda)
        } else {
            None
        },
        credal_witness: if status != ConsistencyStatus::Inconsistent {
            outcome.dual_density
        } else {
            None
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceAxiom {
    RejectingPossibleLoss,
    AcceptingSureGain,
    Monotonicity,
    Additivity,
    PositiveScaling,
}

#[derive(Debug, Clone)]
pub struct AuditViolation {
    pub axiom: CoherenceAxiom,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct AuditReport {
    pub samples: usize,
    pub violations: Vec<AuditViolation>,
    /// Probes that landed in the boundary band (informational).
    pub boundary_hits: usize,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone)]
pub enum CompatibilityStatus {
    Compatible,
    /// Witness measurement whose desirability changed under an indifferent
    /// perturbation or a projection.
    Incompatible {
        witness: HermitianOperator,
    },
}

#[derive(Debug, Clone)]
pub struct CompatibilityReport {
    pub status: CompatibilityStatus,
    pub checked: usize,
    /// Probes where one side of the equivalence was a boundary case.
    pub inconclusive: usize,
}

impl CompatibilityReport {
    pub fn is_compatible(&self) -> bool {
        matches!(self.status, CompatibilityStatus::Compatible)
    }
}

/// One side definitely in, the other definitely out. Boundary statuses on
/// either side are counted separately rather than treated as flips.
fn is_flip(a: MembershipStatus, b: MembershipStatus) -> bool {
    use MembershipStatus::*;
    matches!((a, b), (Member, NonMember) | (NonMember, Member))
}

fn involves_boundary(a: MembershipStatus, b: MembershipStatus) -> bool {
    a == MembershipStatus::Boundary || b == MembershipStatus::Boundary
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn compatibility_probe<F, G>(
    dim: usize,
    member_fn: &F,
    generators: &[HermitianOperator],
    mut make_member: G,
    p: &ProjectionMap,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<CompatibilityReport>
where
    F: Fn(&HermitianOperator) -> Result<Membership>,
    G: FnMut(&mut rand_chacha::ChaCha8Rng) -> HermitianOperator,
{
    let mut rng = seeded_rng(seed);
    let mut checked = 0;
    let mut inconclusive = 0;

    // Exact focusedness on the generators: A in D  <=>  p(A) in D. A
    // generator whose projection is definitely rejected (or the reverse)
    // witnesses incompatibility.
    for g in generators {
        let pg = p.apply(g)?;
        let s_g = member_fn(g)?.status;
        let s_pg = if pg.operator_norm() <= tol.indiff {
            MembershipStatus::NonMember
        } else {
            member_fn(&pg)?.status
        };
        checked += 1;
        // Generators sit in the positive hull, so a definite rejection of
        // the projection flips against membership-or-boundary of the
        // generator itself.
        let generator_side_in = s_g != MembershipStatus::NonMember;
        if is_flip(s_g, s_pg) || (generator_side_in && s_pg == MembershipStatus::NonMember) {
            return Ok(CompatibilityReport {
                status: CompatibilityStatus::Incompatible { witness: g.clone() },
                checked,
                inconclusive,
            });
        }
        if involves_boundary(s_g, s_pg) {
            inconclusive += 1;
        }
    }

    for _ in 0..samples {
        // Kernel perturbation of a constructed member.
        let raw = unit_gue(dim, &mut rng);
        let kernel = raw.sub(&p.apply(&raw)?);
        let member = make_member(&mut rng);
        let probe = member.add(&kernel);
        let s_m = member_fn(&member)?.status;
        let s_p = member_fn(&probe)?.status;
        checked += 1;
        if s_m == MembershipStatus::Member && s_p == MembershipStatus::NonMember {
            return Ok(CompatibilityReport {
                status: CompatibilityStatus::Incompatible { witness: probe },
                checked,
                inconclusive,
            });
        }
        if involves_boundary(s_m, s_p) {
            inconclusive += 1;
        }

        // Sampled focusedness: membership of a random probe must match
        // membership of its projection.
        let probe = unit_gue(dim, &mut rng);
        let projected = p.apply(&probe)?;
        let s_a = member_fn(&probe)?.status;
        let s_pa = if projected.operator_norm() <= tol.indiff {
            MembershipStatus::NonMember
        } else {
            member_fn(&projected)?.status
        };
        checked += 1;
        if is_flip(s_a, s_pa) {
            return Ok(CompatibilityReport {
                status: CompatibilityStatus::Incompatible { witness: probe },
                checked,
                inconclusive,
            });
        }
        if involves_boundary(s_a, s_pa) {
            inconclusive += 1;
        }
    }

    Ok(CompatibilityReport {
        status: CompatibilityStatus::Compatible,
        checked,
        inconclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{Ket, Subspace};

    fn model(gens: Vec<HermitianOperator>, dim: usize) -> NaturalExtensionModel {
        NaturalExtensionModel::build(Assessment::new(dim, gens).unwrap(), Tolerances::default())
            .unwrap()
    }

    #[test]
    fn identity_assessment_is_consistent() {
        let m = model(vec![HermitianOperator::identity(2)], 2);
        assert_eq!(m.consistency().status, ConsistencyStatus::Consistent);
        assert!(m.consistency().credal_witness.is_some());
    }

    #[test]
    fn negative_identity_is_inconsistent() {
        let m = model(vec![HermitianOperator::identity(2).scale(-1.0)], 2);
        assert_eq!(m.consistency().status, ConsistencyStatus::Inconsistent);
        let w = m.consistency().sure_loss_weights.as_ref().unwrap();
        assert!((w[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn opposite_generators_are_inconsistent() {
        // Convex weights (1/2, 1/2) sum to the null measurement.
        let m = model(
            vec![
                HermitianOperator::from_diagonal(&[1.0, -1.0]),
                HermitianOperator::from_diagonal(&[-1.0, 1.0]),
            ],
            2,
        );
        assert_eq!(m.consistency().status, ConsistencyStatus::Inconsistent);
        let w = m.consistency().sure_loss_weights.as_ref().unwrap();
        let combo = HermitianOperator::from_diagonal(&[1.0, -1.0])
            .scale(w[0])
            .add(&HermitianOperator::from_diagonal(&[-1.0, 1.0]).scale(w[1]));
        assert!(combo.max_eigenvalue() <= 1e-6);
    }

    #[test]
    fn identity_is_member_of_any_consistent_model() {
        let m = model(vec![HermitianOperator::from_diagonal(&[1.0, -1.0])], 2);
        let res = m.member(&HermitianOperator::identity(2)).unwrap();
        assert_eq!(res.status, MembershipStatus::Member);
        assert_eq!(res.branch, Some(MembershipBranch::Background));
    }

    #[test]
    fn zero_is_never_a_member() {
        let m = model(vec![HermitianOperator::from_diagonal(&[1.0, -1.0])], 2);
        let res = m.member(&HermitianOperator::zeros(2)).unwrap();
        assert_eq!(res.status, MembershipStatus::NonMember);
    }

    #[test]
    fn positive_hull_membership_with_witness() {
        let m = model(vec![HermitianOperator::from_diagonal(&[1.0, -1.0])], 2);
        let probe = HermitianOperator::from_diagonal(&[2.0, -1.0]);
        let res = m.member(&probe).unwrap();
        assert_eq!(res.status, MembershipStatus::Member);
        assert_eq!(res.branch, Some(MembershipBranch::PositiveHull));
        let w = res.witness.unwrap();
        // The witness reproduces a PSD residual.
        let residual = probe.sub(&HermitianOperator::from_diagonal(&[1.0, -1.0]).scale(w[0]));
        assert!(residual.min_eigenvalue() >= -1e-7);
    }

    #[test]
    fn membership_is_scale_invariant() {
        let m = model(vec![HermitianOperator::from_diagonal(&[1.0, -1.0])], 2);
        let probe = HermitianOperator::from_diagonal(&[2.0, -1.0]);
        for s in [1.0, 10.0, 0.01] {
            let res = m.member(&probe.scale(s)).unwrap();
            assert_eq!(res.status, MembershipStatus::Member, "scale {s}");
        }
    }

    #[test]
    fn membership_requires_consistency() {
        let m = model(vec![HermitianOperator::identity(2).scale(-1.0)], 2);
        let err = m.member(&HermitianOperator::identity(2)).unwrap_err();
        assert!(matches!(err, Error::InconsistentAssessment));
        let err = m.check_coherence_axioms(5, 1).unwrap_err();
        assert!(matches!(err, Error::InconsistentAssessment));
    }

    #[test]
    fn vacuous_membership_matches_strict_order() {
        let m = model(vec![], 3);
        let pd = HermitianOperator::from_diagonal(&[1.0, 0.5, 2.0]);
        assert_eq!(m.member(&pd).unwrap().status, MembershipStatus::Member);
        let mixed = HermitianOperator::from_diagonal(&[1.0, -0.5, 2.0]);
        assert_eq!(
            m.member(&mixed).unwrap().status,
            MembershipStatus::NonMember
        );
    }

    #[test]
    fn audit_vacuous_assessment_is_clean() {
        let m = model(vec![], 2);
        let report = m.check_coherence_axioms(100, 42).unwrap();
        assert!(report.is_clean(), "violations: {:?}", report.violations);
    }

    #[test]
    fn audit_single_generator_seed42_is_clean() {
        let m = model(vec![HermitianOperator::from_diagonal(&[1.0, -0.4])], 2);
        let report = m.check_coherence_axioms(100, 42).unwrap();
        assert!(report.is_clean(), "violations: {:?}", report.violations);
    }

    #[test]
    fn membership_monotone_in_generators() {
        // Adding generators never removes members.
        let g1 = HermitianOperator::from_diagonal(&[1.0, -1.0]);
        let g2 = HermitianOperator::from_diagonal(&[-0.5, 1.0]);
        let small = model(vec![g1.clone()], 2);
        let large = model(vec![g1, g2], 2);
        let probe = HermitianOperator::from_diagonal(&[2.0, -1.0]);
        assert_eq!(
            small.member(&probe).unwrap().status,
            MembershipStatus::Member
        );
        assert_eq!(
            large.member(&probe).unwrap().status,
            MembershipStatus::Member
        );
    }

    #[test]
    fn identity_projection_is_compatible() {
        let m = model(vec![HermitianOperator::from_diagonal(&[1.0, -0.4])], 2);
        let p = ProjectionMap::from_subspace(Subspace::full(2));
        let report = m.check_compatibility(&p, 20, 7).unwrap();
        assert!(report.is_compatible());
    }

    #[test]
    fn kernel_plus_negative_range_part_is_detected() {
        // Generator with a small negative part on the subspace: its
        // projection is definitely rejected, so the model cannot be
        // compatible with the subspace indifference.
        let tol = Tolerances::default();
        let g = HermitianOperator::from_diagonal(&[-0.1, 2.0]);
        let m = model(vec![g], 2);
        let v = Subspace::new(2, vec![Ket::basis_state(2, 0)], &tol).unwrap();
        let p = ProjectionMap::from_subspace(v);
        let report = m.check_compatibility(&p, 20, 11).unwrap();
        assert!(!report.is_compatible());
    }

    #[test]
    fn pinned_density_assessment_is_consistent() {
        let mut rng = crate::random::seeded_rng(3);
        let rho = crate::random::random_density(3, &mut rng);
        let a = Assessment::pinning_density(&rho, 1e-4);
        let m = NaturalExtensionModel::build(a, Tolerances::default()).unwrap();
        assert_eq!(m.consistency().status, ConsistencyStatus::Consistent);
    }
}
