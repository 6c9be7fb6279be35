//! Conditioning of assessments, previsions and density operators on a
//! subspace or on a union of mutually orthogonal subspaces.
//!
//! Learning that the state lies in a subspace V makes every measurement
//! with P A P = 0 worthless to the agent; those measurements form the
//! kernel of the projection A -> P A P, and conditioning amounts to
//! representing beliefs on the projection's range. For a union of mutually
//! orthogonal subspaces the projection becomes A -> sum_k P_k A P_k and the
//! range is the block-diagonal algebra over the subspaces, which this module
//! represents as compound block-diagonal matrices.
//!
//! At the density-operator level the same update is the familiar
//! rho -> P rho P / tr(P rho P) and its block generalization, recovered here
//! through prevision duality rather than postulated.

use crate::config::Tolerances;
use crate::desirability::{
    compatibility_probe, Assessment, CompatibilityReport, ConsistencyStatus, Membership,
    MembershipStatus, NaturalExtensionModel,
};
use crate::error::{Error, Result};
use crate::hermitian::{projector_of, HermitianOperator, ProjectionMap, Subspace};
use crate::previsions::{credal_bounds, DensityOperator, PrevisionResult, PrevisionStatus};
use crate::random::unit_psd;

/// What was learned: the state lies in one subspace, or in exactly one of a
/// family of mutually orthogonal subspaces (without learning which).
#[derive(Debug, Clone)]
pub struct ConditioningEvent {
    subspaces: Vec<Subspace>,
}

impl ConditioningEvent {
    pub fn single(subspace: Subspace) -> Self {
        Self {
            subspaces: vec![subspace],
        }
    }

    /// Requires pairwise orthogonality across the subspaces.
    pub fn family(subspaces: Vec<Subspace>, tol: &Tolerances) -> Result<Self> {
        if subspaces.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        let ambient = subspaces[0].ambient_dim();
        for s in &subspaces {
            if s.ambient_dim() != ambient {
                return Err(Error::DimensionMismatch {
                    expected: ambient,
                    got: s.ambient_dim(),
                });
            }
        }
        for i in 0..subspaces.len() {
            for j in (i + 1)..subspaces.len() {
                for a in subspaces[i].basis() {
                    for b in subspaces[j].basis() {
                        let overlap = a.inner(b).norm();
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
        Ok(Self { subspaces })
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn ambient_dim(&self) -> usize {
        self.subspaces[0].ambient_dim()
    }

    pub fn is_family(&self) -> bool {
        self.subspaces.len() > 1
    }
}

/// The measurement projection induced by the event.
pub fn build_projection(event: &ConditioningEvent, tol: &Tolerances) -> Result<ProjectionMap> {
    if event.subspaces.len() == 1 {
        Ok(ProjectionMap::from_subspace(event.subspaces[0].clone()))
    } else {
        ProjectionMap::from_family(event.subspaces.to_vec(), tol)
    }
}

/// A model conditioned on an event: beliefs live on the reduced
/// (block-diagonal) space, and ambient queries go through the projection.
#[derive(Debug)]
pub struct UpdatedModel {
    event: ConditioningEvent,
    projection: ProjectionMap,
    reduced: NaturalExtensionModel,
    /// Ambient images of the generators that survived the reduction.
    kept_ambient: Vec<HermitianOperator>,
    reduced_status: ConsistencyStatus,
}

impl UpdatedModel {
    pub fn event(&self) -> &ConditioningEvent {
        &self.event
    }

    pub fn projection(&self) -> &ProjectionMap {
        &self.projection
    }

    /// The natural-extension model on the reduced space.
    pub fn reduced_model(&self) -> &NaturalExtensionModel {
        &self.reduced
    }

    pub fn reduced_status(&self) -> ConsistencyStatus {
        self.reduced_status
    }

    /// Membership in the updated set of desirable measurements, queried in
    /// the ambient space: a measurement is desirable after the update iff
    /// its compression onto the reduced space is (its projection strictly
    /// dominates some indifferent measurement, or the compression falls in
    /// the reduced positive hull). Kernel elements fail both branches.
    pub fn ambient_member(&self, a: &HermitianOperator) -> Result<Membership> {
        if a.dim() != self.projection.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.projection.ambient_dim(),
                got: a.dim(),
            });
        }
        let compressed = self.projection.compress_compound(a)?;
        let tol = self.reduced.tolerances();
        if compressed.operator_norm() <= tol.indiff {
            return Ok(Membership {
                status: MembershipStatus::NonMember,
                branch: None,
                margin: f64::NEG_INFINITY,
                witness: None,
                separator: None,
            });
        }
        self.reduced.member(&compressed)
    }

    /// Samples kernel perturbations and focusedness flips against the
    /// updated model's own projection. The construction is focused, so any
    /// incompatibility indicates a defect.
    pub fn check_self_compatibility(
        &self,
        samples: usize,
        seed: u64,
    ) -> Result<CompatibilityReport> {
        let member_fn = |a: &HermitianOperator| self.ambient_member(a);
        let dim = self.projection.ambient_dim();
        let kept = self.kept_ambient.clone();
        compatibility_probe(
            dim,
            &member_fn,
            &self.kept_ambient,
            move |rng| {
                let mut acc = HermitianOperator::zeros(dim);
                for g in &kept {
                    let w: f64 = rand::Rng::gen::<f64>(rng);
                    acc = acc.add(&g.scale(w / g.operator_norm().max(1e-12)));
                }
                acc = acc.add(&unit_psd(dim, rng));
                let bump = 0.05 * (acc.operator_norm() + 1.0);
                acc.add(&HermitianOperator::identity(dim).scale(bump))
            },
            &self.projection,
            samples,
            seed,
            self.reduced.tolerances(),
        )
    }
}

/// Conditions a model on the event.
///
/// The reduced assessment collects the compressions of projected generators
/// whose projection the original model still finds desirable (members and
/// boundary cases both survive; dropping boundary generators would break
/// full-space neutrality). Natural extension on the reduced space recovers
/// the rest.
pub fn update_model(
    model: &NaturalExtensionModel,
    event: &ConditioningEvent,
) -> Result<UpdatedModel> {
    if !model.is_consistent() {
        return Err(Error::InconsistentAssessment);
    }
    if event.ambient_dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: event.ambient_dim(),
        });
    }
    let tol = model.tolerances().clone();
    let projection = build_projection(event, &tol)?;
    let mut reduced_gens = Vec::new();
    let mut kept_ambient = Vec::new();
    for g in model.assessment().generators() {
        let image = projection.apply(g)?;
        if image.operator_norm() <= tol.indiff {
            continue;
        }
        let membership = model.member(&image)?;
        if membership.status != MembershipStatus::NonMember {
            reduced_gens.push(projection.compress_compound(&image)?);
            kept_ambient.push(image);
        }
    }
    let reduced_dim = projection.reduced_dim();
    let reduced = NaturalExtensionModel::build(Assessment::new(reduced_dim, reduced_gens)?, tol)?;
    let reduced_status = reduced.consistency().status;
    if reduced_status == ConsistencyStatus::Inconsistent {
        return Err(Error::ReducedInconsistent);
    }
    Ok(UpdatedModel {
        event: event.clone(),
        projection,
        reduced,
        kept_ambient,
        reduced_status,
    })
}

/// Lueders update of a density operator: p(rho) / tr(p(rho)), where p is the
/// event's projection. Events of vanishing mass are refused.
pub fn update_density(
    rho: &DensityOperator,
    event: &ConditioningEvent,
    tol: &Tolerances,
) -> Result<DensityOperator> {
    let projection = build_projection(event, tol)?;
    let image = projection.apply(rho.operator())?;
    let mass = image.trace();
    if mass <= tol.cond_mass {
        return Err(Error::ZeroProbabilityEvent {
            mass,
            threshold: tol.cond_mass,
        });
    }
    DensityOperator::new(image.scale(1.0 / mass), tol)
}

/// Law-of-total-probability decomposition of the family update: weights
/// tr(P_k rho P_k) normalized over the family, paired with the per-subspace
/// updates. Branches of vanishing mass are omitted (their update is
/// undefined); the weighted mixture reproduces `update_density`.
pub fn total_probability_decomposition(
    rho: &DensityOperator,
    event: &ConditioningEvent,
    tol: &Tolerances,
) -> Result<Vec<(f64, DensityOperator)>> {
    let mut masses = Vec::with_capacity(event.subspaces.len());
    let mut images = Vec::with_capacity(event.subspaces.len());
    for s in &event.subspaces {
        let p = projector_of(s);
        let image =
            HermitianOperator::new_unchecked(p.matrix() * rho.operator().matrix() * p.matrix());
        masses.push(image.trace());
        images.push(image);
    }
    let total: f64 = masses.iter().sum();
    if total <= tol.cond_mass {
        return Err(Error::ZeroProbabilityEvent {
            mass: total,
            threshold: tol.cond_mass,
        });
    }
    let mut out = Vec::new();
    for (mass, image) in masses.into_iter().zip(images) {
        if mass > tol.cond_mass {
            out.push((
                mass / total,
                DensityOperator::new(image.scale(1.0 / mass), tol)?,
            ));
        }
    }
    Ok(out)
}

/// Conditional prevision ratio for linear models: the prevision of the
/// projected measurement over the prevision of the projected identity,
/// both taken as credal midpoints. Callers are responsible for the model
/// actually being linear; imprecise models get an interval from
/// `update_prevision` instead.
pub fn conditional_prevision_linear(
    model: &NaturalExtensionModel,
    event: &ConditioningEvent,
    a: &HermitianOperator,
) -> Result<f64> {
    let tol = model.tolerances();
    let projection = build_projection(event, tol)?;
    let p_id = projection.apply(&HermitianOperator::identity(model.dim()))?;
    let mass = credal_bounds(model, &p_id)?;
    if mass.upper <= tol.cond_mass {
        return Err(Error::ZeroProbabilityEvent {
            mass: mass.upper,
            threshold: tol.cond_mass,
        });
    }
    let p_a = projection.apply(a)?;
    let value = credal_bounds(model, &p_a)?;
    Ok((0.5 * (value.lower + value.upper)) / (0.5 * (mass.lower + mass.upper)))
}

/// Conditional prevision of a measurement after the event.
///
/// Linear models (all relevant prevision intervals collapse) get the exact
/// ratio of previsions. Imprecise models get the interval of conditional
/// expectations over the credal set, computed by the normalization change of
/// variables: optimize tr(sigma p(A)) over sigma >= 0 with tr(sigma A_i) >= 0
/// and tr(sigma p(I)) = 1, which ranges over exactly the positive-mass
/// credal elements rescaled to unit event mass. The interval is
/// cross-checked against the conditioned model's own previsions; a genuine
/// conflict downgrades the status to boundary.
pub fn update_prevision(
    model: &NaturalExtensionModel,
    event: &ConditioningEvent,
    a: &HermitianOperator,
) -> Result<PrevisionResult> {
    if !model.is_consistent() {
        return Err(Error::InconsistentAssessment);
    }
    if a.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: a.dim(),
        });
    }
    let tol = model.tolerances().clone();
    let params = model.solver_params().clone();
    let projection = build_projection(event, &tol)?;
    let p_id = projection.apply(&HermitianOperator::identity(model.dim()))?;
    let mass = credal_bounds(model, &p_id)?;
    if mass.upper <= tol.cond_mass {
        return Err(Error::ZeroProbabilityEvent {
            mass: mass.upper,
            threshold: tol.cond_mass,
        });
    }
    let p_a = projection.apply(a)?;
    let value = credal_bounds(model, &p_a)?;

    // Fractional route: conditional expectations over positive-mass credal
    // elements, after the normalization change of variables.
    let constraints: Vec<(HermitianOperator, f64)> = model
        .assessment()
        .generators()
        .iter()
        .map(|g| (g.clone(), 0.0))
        .collect();
    // The model anchor rescaled to unit event mass is strictly feasible for
    // the normalized program.
    let sigma_anchor = model.credal_anchor().and_then(|rho| {
        let m = rho.inner(&p_id);
        if m > tol.cond_mass {
            Some(rho.scale(1.0 / m))
        } else {
            None
        }
    });
    let lo = match crate::cone::trace_program(
        &p_a,
        &constraints,
        &p_id,
        sigma_anchor.as_ref(),
        &tol,
        &params,
    )? {
        crate::cone::TraceOutcome::Optimal {
            value, minimizer, ..
        } => (value, minimizer),
        crate::cone::TraceOutcome::Infeasible { .. } => {
            return Err(Error::ZeroProbabilityEvent {
                mass: mass.lower,
                threshold: tol.cond_mass,
            })
        }
    };
    let neg = p_a.scale(-1.0);
    let hi = match crate::cone::trace_program(
        &neg,
        &constraints,
        &p_id,
        sigma_anchor.as_ref(),
        &tol,
        &params,
    )? {
        crate::cone::TraceOutcome::Optimal {
            value, minimizer, ..
        } => (-value, minimizer),
        crate::cone::TraceOutcome::Infeasible { .. } => {
            return Err(Error::ZeroProbabilityEvent {
                mass: mass.lower,
                threshold: tol.cond_mass,
            })
        }
    };
    let lower_witness = DensityOperator::from_solver(projection.apply(&lo.1)?, &tol)?;
    let upper_witness = DensityOperator::from_solver(projection.apply(&hi.1)?, &tol)?;

    let scale = a.operator_norm().max(1.0);
    let linear = (mass.upper - mass.lower) <= tol.linear_width
        && (value.upper - value.lower) <= tol.linear_width * scale;

    if linear {
        let ratio = (0.5 * (value.lower + value.upper)) / (0.5 * (mass.lower + mass.upper));
        // The exact ratio must land inside the fractional interval.
        let status = if ratio >= lo.0 - tol.dual_gap * scale && ratio <= hi.0 + tol.dual_gap * scale
        {
            PrevisionStatus::Exact
        } else {
            PrevisionStatus::Boundary
        };
        return Ok(PrevisionResult {
            lower: ratio,
            upper: ratio,
            lower_witness,
            upper_witness,
            status,
            route_gap: 0.0,
        });
    }

    // Comparison route through the conditioned model: its credal set
    // contains every rescaled positive-mass credal element, so its interval
    // must contain the fractional one.
    let updated = update_model(model, event)?;
    let compressed = projection.compress_compound(&p_a)?;
    let reduced_bounds = credal_bounds(&updated.reduced, &compressed)?;
    let contained = reduced_bounds.lower <= lo.0 + tol.dual_gap * scale
        && reduced_bounds.upper >= hi.0 - tol.dual_gap * scale;
    let status = if contained {
        PrevisionStatus::Exact
    } else {
        PrevisionStatus::Boundary
    };

    Ok(PrevisionResult {
        lower: lo.0,
        upper: hi.0,
        lower_witness,
        upper_witness,
        status,
        route_gap: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::desirability::Assessment;
    use crate::hermitian::Ket;
    use crate::random::{random_density, seeded_rng};
    use crate::spin_pair;
    use crate::Tolerances;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn full_space_event_is_identity_on_densities() {
        let t = tol();
        let mut rng = seeded_rng(41);
        let rho = DensityOperator::new(random_density(3, &mut rng), &t).unwrap();
        let event = ConditioningEvent::single(Subspace::full(3));
        let updated = update_density(&rho, &event, &t).unwrap();
        assert!(updated.operator().entry_distance(rho.operator()) < 1e-12);
    }

    #[test]
    fn lueders_update_on_two_spins() {
        let t = tol();
        let rho = spin_pair::rho_star(&t);
        let event = ConditioningEvent::single(spin_pair::total_spin_zero_subspace(&t));
        let updated = update_density(&rho, &event, &t).unwrap();
        // Direct arithmetic: the projected ket keeps two of three terms.
        let expected = spin_pair::expected_subspace_update();
        assert!(
            updated.operator().entry_distance(&expected) < 1e-12,
            "distance {}",
            updated.operator().entry_distance(&expected)
        );
    }

    #[test]
    fn family_update_on_two_spins() {
        let t = tol();
        let rho = spin_pair::rho_star(&t);
        let event = ConditioningEvent::family(spin_pair::total_spin_zero_family(&t), &t).unwrap();
        let updated = update_density(&rho, &event, &t).unwrap();
        let expected = spin_pair::expected_family_update();
        assert!(updated.operator().entry_distance(&expected) < 1e-12);
    }

    #[test]
    fn ltp_weights_on_two_spins() {
        let t = tol();
        let rho = spin_pair::rho_star(&t);
        let event = ConditioningEvent::family(spin_pair::total_spin_zero_family(&t), &t).unwrap();
        let parts = total_probability_decomposition(&rho, &event, &t).unwrap();
        // The third branch has zero mass and is omitted.
        assert_eq!(parts.len(), 2);
        assert!((parts[0].0 - 0.5).abs() < 1e-12);
        assert!((parts[1].0 - 0.5).abs() < 1e-12);
        // Mixture reproduces the family update.
        let mut mix = HermitianOperator::zeros(9);
        for (w, component) in &parts {
            mix = mix.add(&component.operator().scale(*w));
        }
        let updated = update_density(&rho, &event, &t).unwrap();
        assert!(mix.entry_distance(updated.operator()) < 1e-12);
    }

    #[test]
    fn density_inside_one_branch_is_fixed() {
        let t = tol();
        let e0 = Ket::basis_state(4, 0);
        let e1 = Ket::basis_state(4, 1);
        let v1 = Subspace::new(4, vec![e0.clone(), e1], &t).unwrap();
        let v2 = Subspace::new(4, vec![Ket::basis_state(4, 2)], &t).unwrap();
        let rho = DensityOperator::new(e0.outer(), &t).unwrap();
        let event = ConditioningEvent::family(vec![v1, v2], &t).unwrap();
        let parts = total_probability_decomposition(&rho, &event, &t).unwrap();
        assert_eq!(parts.len(), 1);
        assert!((parts[0].0 - 1.0).abs() < 1e-12);
        assert!(parts[0].1.operator().entry_distance(rho.operator()) < 1e-12);
        let updated = update_density(&rho, &event, &t).unwrap();
        assert!(updated.operator().entry_distance(rho.operator()) < 1e-12);
    }

    #[test]
    fn equal_mass_branches_split_evenly() {
        let t = tol();
        let v1 = Subspace::new(2, vec![Ket::basis_state(2, 0)], &t).unwrap();
        let v2 = Subspace::new(2, vec![Ket::basis_state(2, 1)], &t).unwrap();
        let plus = Ket::from_pairs(&[(1.0, 0.0), (1.0, 0.0)])
            .normalized()
            .unwrap();
        let rho = DensityOperator::new(plus.outer(), &t).unwrap();
        let event = ConditioningEvent::family(vec![v1, v2], &t).unwrap();
        let parts = total_probability_decomposition(&rho, &event, &t).unwrap();
        assert_eq!(parts.len(), 2);
        assert!((parts[0].0 - 0.5).abs() < 1e-12);
        assert!((parts[1].0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lueders_update_is_idempotent() {
        let t = tol();
        let mut rng = seeded_rng(43);
        for _ in 0..5 {
            let rho = DensityOperator::new(random_density(4, &mut rng), &t).unwrap();
            let v = crate::random::random_subspace(4, 2, &mut rng, &t);
            let event = ConditioningEvent::single(v);
            let once = update_density(&rho, &event, &t).unwrap();
            let twice = update_density(&once, &event, &t).unwrap();
            assert!(once.operator().entry_distance(twice.operator()) < 1e-10);
        }
    }

    #[test]
    fn zero_probability_event_is_refused() {
        let t = tol();
        let rho = DensityOperator::new(Ket::basis_state(3, 0).outer(), &t).unwrap();
        let v = Subspace::new(3, vec![Ket::basis_state(3, 2)], &t).unwrap();
        let event = ConditioningEvent::single(v);
        let err = update_density(&rho, &event, &t).unwrap_err();
        assert!(matches!(err, Error::ZeroProbabilityEvent { .. }));
    }

    #[test]
    fn kernel_probes_are_rejected_in_both_directions() {
        let t = tol();
        let gens = vec![HermitianOperator::from_diagonal(&[1.0, -0.3, 0.2])];
        let model =
            NaturalExtensionModel::build(Assessment::new(3, gens).unwrap(), t.clone()).unwrap();
        let v = Subspace::new(3, vec![Ket::basis_state(3, 0)], &t).unwrap();
        let event = ConditioningEvent::single(v);
        let updated = update_model(&model, &event).unwrap();
        // Supported entirely outside the subspace.
        let kernel_probe = {
            use num_complex::Complex;
            let mut m = nalgebra::DMatrix::from_element(3, 3, Complex::new(0.0, 0.0));
            m[(1, 1)] = Complex::new(0.7, 0.0);
            m[(1, 2)] = Complex::new(0.1, 0.2);
            m[(2, 1)] = Complex::new(0.1, -0.2);
            m[(2, 2)] = Complex::new(-0.4, 0.0);
            HermitianOperator::new(m, &t).unwrap()
        };
        let forward = updated.ambient_member(&kernel_probe).unwrap();
        let backward = updated.ambient_member(&kernel_probe.scale(-1.0)).unwrap();
        assert_eq!(forward.status, MembershipStatus::NonMember);
        assert_eq!(backward.status, MembershipStatus::NonMember);
    }

    #[test]
    fn full_space_conditioning_preserves_membership() {
        let t = tol();
        let gens = vec![
            HermitianOperator::from_diagonal(&[1.0, -0.5]),
            HermitianOperator::from_diagonal(&[-0.2, 0.9]),
        ];
        let model =
            NaturalExtensionModel::build(Assessment::new(2, gens).unwrap(), t.clone()).unwrap();
        let event = ConditioningEvent::single(Subspace::full(2));
        let updated = update_model(&model, &event).unwrap();
        let mut rng = seeded_rng(47);
        for _ in 0..20 {
            let probe = crate::random::unit_gue(2, &mut rng);
            let before = model.member(&probe).unwrap().status;
            let after = updated.ambient_member(&probe).unwrap().status;
            assert_eq!(before, after, "membership changed under the trivial event");
        }
    }

    #[test]
    fn conditional_prevision_of_identity_is_one() {
        let t = tol();
        let mut rng = seeded_rng(53);
        let rho = random_density(3, &mut rng);
        let model =
            NaturalExtensionModel::build(Assessment::pinning_density(&rho, 1e-4), t.clone())
                .unwrap();
        let v = crate::random::random_subspace(3, 2, &mut rng, &t);
        let event = ConditioningEvent::single(v);
        let result = update_prevision(&model, &event, &HermitianOperator::identity(3)).unwrap();
        assert!((result.lower - 1.0).abs() < 1e-5, "lower {}", result.lower);
        assert!((result.upper - 1.0).abs() < 1e-5, "upper {}", result.upper);
    }

    #[test]
    fn two_spin_conditional_prevision_is_half() {
        let t = tol();
        // Route check via the density update: tr(rho_V |e2><e2|) = 1/2.
        let rho = spin_pair::rho_star(&t);
        let event = ConditioningEvent::single(spin_pair::total_spin_zero_subspace(&t));
        let updated = update_density(&rho, &event, &t).unwrap();
        let a = Ket::basis_state(9, spin_pair::index_of(-1, 1)).outer();
        assert!((updated.expectation(&a) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn linear_model_prevision_update_matches_density_route() {
        let t = tol();
        let mut rng = seeded_rng(59);
        for dim in [2usize, 3] {
            let raw = random_density(dim, &mut rng);
            let rho = raw
                .scale(0.7)
                .add(&HermitianOperator::identity(dim).scale(0.3 / dim as f64));
            let model =
                NaturalExtensionModel::build(Assessment::pinning_density(&rho, 1e-4), t.clone())
                    .unwrap();
            let v = crate::random::random_subspace(dim, 1.max(dim - 1), &mut rng, &t);
            let event = ConditioningEvent::single(v);
            let a = crate::random::unit_gue(dim, &mut rng);

            let ratio = conditional_prevision_linear(&model, &event, &a).unwrap();
            let density_route =
                update_density(&DensityOperator::new(rho.clone(), &t).unwrap(), &event, &t)
                    .unwrap();
            let expected = density_route.expectation(&a);
            assert!(
                (ratio - expected).abs() < 1e-5,
                "dim {dim}: prevision route {ratio} vs density route {expected}"
            );

            // The interval route collapses onto the same value.
            let interval = update_prevision(&model, &event, &a).unwrap();
            assert!((interval.lower - expected).abs() < 2e-4);
            assert!((interval.upper - expected).abs() < 2e-4);
        }
    }

    #[test]
    fn updated_model_is_self_compatible() {
        let t = tol();
        let gens = vec![
            HermitianOperator::from_diagonal(&[1.0, -0.5, 0.3]),
            HermitianOperator::from_diagonal(&[-0.2, 0.9, -0.1]),
        ];
        let model =
            NaturalExtensionModel::build(Assessment::new(3, gens).unwrap(), t.clone()).unwrap();
        let mut rng = seeded_rng(61);
        let v = crate::random::random_subspace(3, 2, &mut rng, &t);
        let event = ConditioningEvent::single(v);
        let updated = update_model(&model, &event).unwrap();
        let report = updated.check_self_compatibility(15, 67).unwrap();
        assert!(report.is_compatible());
    }

    #[test]
    fn family_reduction_uses_blocks() {
        let t = tol();
        let gens = vec![HermitianOperator::from_diagonal(&[1.0, -0.4, 0.5, 0.2])];
        let model =
            NaturalExtensionModel::build(Assessment::new(4, gens).unwrap(), t.clone()).unwrap();
        let v1 =
            Subspace::new(4, vec![Ket::basis_state(4, 0), Ket::basis_state(4, 1)], &t).unwrap();
        let v2 = Subspace::new(4, vec![Ket::basis_state(4, 3)], &t).unwrap();
        let event = ConditioningEvent::family(vec![v1, v2], &t).unwrap();
        let updated = update_model(&model, &event).unwrap();
        assert_eq!(updated.reduced_model().dim(), 3);
        // A measurement strictly positive on every block is a member.
        let probe = HermitianOperator::from_diagonal(&[0.5, 0.5, -3.0, 0.5]);
        assert_eq!(
            updated.ambient_member(&probe).unwrap().status,
            MembershipStatus::Member
        );
        // Strictly negative on one block: not a member.
        let probe = HermitianOperator::from_diagonal(&[0.5, 0.5, -3.0, -0.5]);
        assert_eq!(
            updated.ambient_member(&probe).unwrap().status,
            MembershipStatus::NonMember
        );
    }
}
