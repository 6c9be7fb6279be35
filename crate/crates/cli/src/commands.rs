//! Command implementations over a compiled problem.

use serde_json::json;

use desq_core::conditioning::{
    conditional_prevision_linear, total_probability_decomposition, update_density, update_model,
    update_prevision, ConditioningEvent,
};
use desq_core::desirability::{
    ConsistencyStatus, MembershipBranch, MembershipStatus, NaturalExtensionModel,
};
use desq_core::previsions::{lower_prevision, PrevisionStatus};

use crate::output::{matrix_human, matrix_json, QueryResult};
use crate::problem::Problem;
use crate::CliError;

fn build_model(problem: &Problem, assessment: &str) -> Result<NaturalExtensionModel, CliError> {
    let a = problem.assessment(assessment)?.clone();
    NaturalExtensionModel::build(a, problem.tolerances.clone()).map_err(CliError::Core)
}

fn event_from_names(problem: &Problem, names: &str) -> Result<ConditioningEvent, CliError> {
    let parts: Vec<&str> = names
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if parts.is_empty() {
        return Err(CliError::Usage(
            "--event needs at least one subspace name".into(),
        ));
    }
    let mut subspaces = Vec::with_capacity(parts.len());
    for p in parts {
        subspaces.push(problem.subspace(p)?.clone());
    }
    if subspaces.len() == 1 {
        Ok(ConditioningEvent::single(
            subspaces.into_iter().next().unwrap(),
        ))
    } else {
        ConditioningEvent::family(subspaces, &problem.tolerances).map_err(CliError::Core)
    }
}

pub fn check_consistency(problem: &Problem, assessment: &str) -> Result<QueryResult, CliError> {
    let model = build_model(problem, assessment)?;
    let cert = model.consistency();
    let (status, exit_code) = match cert.status {
        ConsistencyStatus::Consistent => ("consistent", 0),
        ConsistencyStatus::Inconsistent => ("inconsistent", 1),
        ConsistencyStatus::Boundary => ("boundary", 2),
    };
    let record = json!({
        "command": "check-consistency",
        "assessment": assessment,
        "status": status,
        "margin": cert.margin,
        "sure_loss_weights": cert.sure_loss_weights,
    });
    let mut human = format!("assessment `{assessment}`: {status}\n");
    if let Some(m) = cert.margin {
        human.push_str(&format!("  sure-loss margin: {m:.3e}\n"));
    }
    if let Some(w) = &cert.sure_loss_weights {
        human.push_str(&format!("  sure-loss weights: {w:?}\n"));
    }
    Ok(QueryResult {
        record,
        human,
        exit_code,
    })
}

pub fn member(problem: &Problem, assessment: &str, target: &str) -> Result<QueryResult, CliError> {
    let model = build_model(problem, assessment)?;
    let probe = problem.operator(target)?;
    let result = model.member(probe).map_err(CliError::Core)?;
    let (status, exit_code) = match result.status {
        MembershipStatus::Member => ("member", 0),
        MembershipStatus::NonMember => ("nonmember", 1),
        MembershipStatus::Boundary => ("boundary", 2),
    };
    let branch = result.branch.map(|b| match b {
        MembershipBranch::Background => "background",
        MembershipBranch::PositiveHull => "positive-hull",
    });
    let record = json!({
        "command": "member",
        "assessment": assessment,
        "target": target,
        "status": status,
        "branch": branch,
        "margin": if result.margin.is_finite() { Some(result.margin) } else { None },
        "witness": result.witness,
    });
    let mut human = format!("`{target}` under assessment `{assessment}`: {status}\n");
    if let Some(b) = branch {
        human.push_str(&format!("  branch: {b}\n"));
    }
    if result.margin.is_finite() {
        human.push_str(&format!("  normalized margin: {:.3e}\n", result.margin));
    }
    Ok(QueryResult {
        record,
        human,
        exit_code,
    })
}

pub fn lower_prevision_cmd(
    problem: &Problem,
    assessment: &str,
    target: &str,
) -> Result<QueryResult, CliError> {
    let model = build_model(problem, assessment)?;
    let probe = problem.operator(target)?;
    let result = lower_prevision(&model, probe).map_err(CliError::Core)?;
    let (status, exit_code) = match result.status {
        PrevisionStatus::Exact => ("exact", 0),
        PrevisionStatus::Boundary => ("boundary", 2),
    };
    let record = json!({
        "command": "lower-prevision",
        "assessment": assessment,
        "target": target,
        "status": status,
        "lower": result.lower,
        "upper": result.upper,
    });
    let human = format!(
        "prevision of `{target}` under `{assessment}`: [{:.9}, {:.9}] ({status})\n",
        result.lower, result.upper
    );
    Ok(QueryResult {
        record,
        human,
        exit_code,
    })
}

pub fn condition(
    problem: &Problem,
    assessment: &str,
    event_names: &str,
    target: Option<&str>,
    probe: Option<&str>,
) -> Result<QueryResult, CliError> {
    let model = build_model(problem, assessment)?;
    let event = event_from_names(problem, event_names)?;
    let updated = update_model(&model, &event).map_err(CliError::Core)?;
    let reduced_status = match updated.reduced_status() {
        ConsistencyStatus::Consistent => "consistent",
        ConsistencyStatus::Inconsistent => "inconsistent",
        ConsistencyStatus::Boundary => "boundary",
    };
    let mut exit_code = if reduced_status == "boundary" { 2 } else { 0 };

    let mut record = json!({
        "command": "condition",
        "assessment": assessment,
        "event": event_names,
        "reduced_dim": updated.reduced_model().dim(),
        "reduced_generators": updated.reduced_model().assessment().generators().len(),
        "reduced_status": reduced_status,
    });
    let mut human = format!(
        "conditioned `{assessment}` on `{event_names}`: reduced space dimension {}, {} generators kept, {}\n",
        updated.reduced_model().dim(),
        updated.reduced_model().assessment().generators().len(),
        reduced_status,
    );

    if let Some(target_name) = target {
        let a = problem.operator(target_name)?;
        let interval = update_prevision(&model, &event, a).map_err(CliError::Core)?;
        let status = match interval.status {
            PrevisionStatus::Exact => "exact",
            PrevisionStatus::Boundary => "boundary",
        };
        if status == "boundary" {
            exit_code = 2;
        }
        record["conditional_lower"] = json!(interval.lower);
        record["conditional_upper"] = json!(interval.upper);
        record["conditional_status"] = json!(status);
        human.push_str(&format!(
            "  conditional prevision of `{target_name}`: [{:.9}, {:.9}] ({status})\n",
            interval.lower, interval.upper
        ));
        if (interval.upper - interval.lower).abs() <= problem.tolerances.linear_width {
            let ratio = conditional_prevision_linear(&model, &event, a).map_err(CliError::Core)?;
            record["conditional_linear"] = json!(ratio);
            human.push_str(&format!("  linear-model ratio: {ratio:.9}\n"));
        }
    }

    if let Some(probe_name) = probe {
        let p = problem.operator(probe_name)?;
        let membership = updated.ambient_member(p).map_err(CliError::Core)?;
        let status = match membership.status {
            MembershipStatus::Member => "member",
            MembershipStatus::NonMember => "nonmember",
            MembershipStatus::Boundary => "boundary",
        };
        record["probe"] = json!(probe_name);
        record["probe_status"] = json!(status);
        human.push_str(&format!("  probe `{probe_name}`: {status}\n"));
    }

    Ok(QueryResult {
        record,
        human,
        exit_code,
    })
}

pub fn update_density_cmd(
    problem: &Problem,
    rho: &str,
    event_names: &str,
) -> Result<QueryResult, CliError> {
    let density = problem.density(rho)?;
    let event = event_from_names(problem, event_names)?;
    let updated = update_density(density, &event, &problem.tolerances).map_err(CliError::Core)?;
    let record = json!({
        "command": "update-density",
        "rho": rho,
        "event": event_names,
        "updated": matrix_json(updated.operator()),
    });
    let human = format!(
        "density `{rho}` conditioned on `{event_names}`:\n{}",
        matrix_human(updated.operator())
    );
    Ok(QueryResult {
        record,
        human,
        exit_code: 0,
    })
}

pub fn ltp(problem: &Problem, rho: &str, event_names: &str) -> Result<QueryResult, CliError> {
    let density = problem.density(rho)?;
    let event = event_from_names(problem, event_names)?;
    let parts = total_probability_decomposition(density, &event, &problem.tolerances)
        .map_err(CliError::Core)?;
    let updated = update_density(density, &event, &problem.tolerances).map_err(CliError::Core)?;

    let mut mixture = desq_core::hermitian::HermitianOperator::zeros(problem.dim);
    for (w, component) in &parts {
        mixture = mixture.add(&component.operator().scale(*w));
    }
    let mixture_error = mixture.entry_distance(updated.operator());

    let weights: Vec<f64> = parts.iter().map(|(w, _)| *w).collect();
    let record = json!({
        "command": "ltp",
        "rho": rho,
        "event": event_names,
        "weights": weights,
        "components": parts.iter().map(|(_, c)| matrix_json(c.operator())).collect::<Vec<_>>(),
        "mixture_error": mixture_error,
    });
    let mut human = format!("total-probability decomposition of `{rho}` over `{event_names}`:\n");
    for (i, (w, _)) in parts.iter().enumerate() {
        human.push_str(&format!("  branch {i}: weight {w:.9}\n"));
    }
    human.push_str(&format!(
        "  mixture reproduces the update within {mixture_error:.3e}\n"
    ));
    Ok(QueryResult {
        record,
        human,
        exit_code: 0,
    })
}
