//! Cross-module checks: consistency against membership of the null
//! measurement, conditioning through the pinned two-spin state, and the
//! thread-safety contract of models.

use desq_core::conditioning::{update_model, update_prevision, ConditioningEvent};
use desq_core::desirability::{
    Assessment, ConsistencyStatus, MembershipStatus, NaturalExtensionModel,
};
use desq_core::hermitian::HermitianOperator;
use desq_core::previsions::{density_of_linear_prevision, lower_prevision, PrevisionValues};
use desq_core::random::{seeded_rng, unit_gue};
use desq_core::spin_pair;
use desq_core::Tolerances;

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn rank_one_state_reconstructs_from_its_previsions() {
    // Prevision values tr(. rho*) on the canonical basis determine the
    // rank-one state exactly.
    let t = tol();
    let rho = spin_pair::rho_star(&t);
    let values = PrevisionValues::from_density(rho.operator());
    let rebuilt = density_of_linear_prevision(&values, &t).unwrap();
    assert!(rebuilt.operator().entry_distance(rho.operator()) < 1e-10);
}

#[test]
fn consistency_matches_null_membership_on_negated_cone() {
    // An assessment incurs a sure loss exactly when the negation of some
    // convex generator combination is weakly positive; cross-check the
    // consistency verdict against membership probes of generator negations.
    let t = tol();
    let mut rng = seeded_rng(71);
    let mut seen_both = (false, false);
    for _ in 0..40 {
        let gens: Vec<HermitianOperator> = (0..2).map(|_| unit_gue(2, &mut rng)).collect();
        let model =
            NaturalExtensionModel::build(Assessment::new(2, gens.clone()).unwrap(), t.clone())
                .unwrap();
        match model.consistency().status {
            ConsistencyStatus::Inconsistent => {
                seen_both.0 = true;
                // The sure-loss weights negate into a positive-semidefinite
                // combination.
                let w = model.consistency().sure_loss_weights.as_ref().unwrap();
                let mut combo = HermitianOperator::zeros(2);
                for (wi, g) in w.iter().zip(&gens) {
                    combo = combo.add(&g.scale(*wi));
                }
                assert!(combo.max_eigenvalue() <= 1e-6);
            }
            ConsistencyStatus::Consistent => {
                seen_both.1 = true;
                // A consistent model never contains the negation of a
                // generator combination that would realize a sure loss: the
                // zero measurement stays out.
                let zero = HermitianOperator::zeros(2);
                assert_eq!(
                    model.member(&zero).unwrap().status,
                    MembershipStatus::NonMember
                );
            }
            ConsistencyStatus::Boundary => {}
        }
    }
    assert!(seen_both.0 && seen_both.1, "sampled only one verdict");
}

#[test]
fn pinned_two_spin_model_conditions_to_the_updated_state() {
    // Pin the worked-example state, condition the model on the total-spin
    // subspace, and confirm the updated model's previsions match the
    // expected updated density on a spread of probes (within the pin
    // margin).
    let t = tol();
    let rho = spin_pair::rho_star(&t);
    let model =
        NaturalExtensionModel::build(Assessment::pinning_density(rho.operator(), 1e-4), t.clone())
            .unwrap();
    assert!(model.is_consistent());
    let event = ConditioningEvent::single(spin_pair::total_spin_zero_subspace(&t));
    let expected = spin_pair::expected_subspace_update();

    let mut rng = seeded_rng(73);
    for _ in 0..4 {
        let probe = unit_gue(spin_pair::DIM, &mut rng);
        let interval = update_prevision(&model, &event, &probe).unwrap();
        let target = expected.inner(&probe);
        assert!(
            interval.lower <= target + 1e-3 && interval.upper >= target - 1e-3,
            "conditional interval [{}, {}] misses target {}",
            interval.lower,
            interval.upper,
            target
        );
        let mid = 0.5 * (interval.lower + interval.upper);
        assert!(
            (mid - target).abs() < 1e-2,
            "conditional midpoint {mid} far from {target}"
        );
    }
}

#[test]
fn full_space_event_preserves_previsions() {
    let t = tol();
    let mut rng = seeded_rng(79);
    let gens: Vec<HermitianOperator> = (0..2).map(|_| unit_gue(3, &mut rng)).collect();
    let model = match NaturalExtensionModel::build(Assessment::new(3, gens).unwrap(), t.clone()) {
        Ok(m) if m.consistency().status == ConsistencyStatus::Consistent => m,
        _ => return,
    };
    let event = ConditioningEvent::single(desq_core::hermitian::Subspace::full(3));
    let probe = unit_gue(3, &mut rng);
    let unconditional = lower_prevision(&model, &probe).unwrap();
    let conditional = update_prevision(&model, &event, &probe).unwrap();
    assert!((unconditional.lower - conditional.lower).abs() < 1e-6);
    assert!((unconditional.upper - conditional.upper).abs() < 1e-6);
}

#[test]
fn updated_model_reduced_consistency_is_reported() {
    let t = tol();
    let gens = vec![HermitianOperator::from_diagonal(&[1.0, -0.2, 0.4])];
    let model = NaturalExtensionModel::build(Assessment::new(3, gens).unwrap(), t.clone()).unwrap();
    let v = desq_core::hermitian::Subspace::new(
        3,
        vec![
            desq_core::hermitian::Ket::basis_state(3, 0),
            desq_core::hermitian::Ket::basis_state(3, 2),
        ],
        &t,
    )
    .unwrap();
    let updated = update_model(&model, &ConditioningEvent::single(v)).unwrap();
    assert_eq!(updated.reduced_status(), ConsistencyStatus::Consistent);
    assert_eq!(updated.reduced_model().dim(), 2);
}

#[test]
fn models_are_shareable_across_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<NaturalExtensionModel>();
    assert_send_sync::<HermitianOperator>();
    assert_send_sync::<desq_core::conditioning::UpdatedModel>();

    // Concurrent queries over one shared model.
    let t = tol();
    let model = std::sync::Arc::new(
        NaturalExtensionModel::build(
            Assessment::new(2, vec![HermitianOperator::from_diagonal(&[1.0, -0.5])]).unwrap(),
            t,
        )
        .unwrap(),
    );
    let handles: Vec<_> = (0..4)
        .map(|k| {
            let model = model.clone();
            std::thread::spawn(move || {
                let mut rng = seeded_rng(100 + k);
                let probe = unit_gue(2, &mut rng);
                model.member(&probe).unwrap().status
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
}
