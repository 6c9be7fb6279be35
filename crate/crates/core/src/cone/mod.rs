//! Conic feasibility and optimization oracle.
//!
//! Two question shapes cover everything the calculus needs:
//!
//! * does a nonnegative combination of generators fit under a target,
//!   `exists lambda >= 0 : B - sum_i lambda_i A_i >= 0` (weak) or `>= eps I`
//!   (strict) — answered by maximizing the spectral margin t subject to
//!   `B - sum lambda_i A_i >= t I`;
//! * minimize `tr(rho B)` over a linearly constrained spectrahedron of
//!   density operators.
//!
//! Complex Hermitian data is pushed through the 2d x 2d real-symmetric
//! embedding so the interior-point kernel stays real.
//!
//! Answers never rest on solver exit values alone. Every margin question is
//! bracketed by two independently verified bounds: the returned coefficients
//! achieve the lower bound (one eigendecomposition checks it), and a cleaned
//! dual density proves the upper bound. Classification happens on that
//! interval, so a sloppy solve degrades to an honest boundary answer rather
//! than a wrong definite one.

pub mod embed;
pub mod ipm;

use nalgebra::{DMatrix, DVector};

use crate::config::{SolverParams, Tolerances};
use crate::error::{Error, Result};
use crate::hermitian::{spectral_decompose, HermitianOperator};

use embed::{embed_phi, embedding_matrix, hvec, smat, svec, svec_len, unembed_phi};
use ipm::{ConeSpec, ConicProblem, SolveStatus};

/// Strictness of the positivity demanded from the residual cone element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strictness {
    Weak,
    /// Residual must dominate eps * I.
    Strict {
        eps: f64,
    },
}

/// Whether the zero combination counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combination {
    Nonneg,
    /// At least one strictly positive coefficient, normalized to
    /// sum(lambda) = 1 by scale invariance of the cone.
    NonnegNontrivial,
}

/// Existence of lambda >= 0 with B - sum lambda_i A_i in the PSD cone.
#[derive(Debug, Clone)]
pub struct ConeFeasibilityProblem {
    pub generators: Vec<HermitianOperator>,
    pub target: HermitianOperator,
    pub strictness: Strictness,
    pub combination: Combination,
}

/// min tr(rho B) over rho >= 0, tr rho = 1, tr(rho A_i) >= b_i.
#[derive(Debug, Clone)]
pub struct SpectrahedronProgram {
    pub objective: HermitianOperator,
    /// Constraints tr(rho A_i) >= bound.
    pub constraints: Vec<(HermitianOperator, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasStatus {
    Feasible,
    Infeasible,
    /// The decision flips inside the tolerance band (or the verified
    /// bounds straddle it); neither side is forced.
    Boundary,
}

#[derive(Debug, Clone)]
pub enum Witness {
    /// Nonnegative combination coefficients over the generators.
    Coefficients(Vec<f64>),
    /// A density operator acting as optimizer or separating functional.
    Density(HermitianOperator),
    None,
}

/// Self-auditing answer: status plus a witness that reproduces the claim
/// arithmetically within the certificate tolerance.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub status: FeasStatus,
    pub witness: Witness,
    /// Verified margin achieved by the witness (feasibility problems) or
    /// optimal value bracket midpoint (trace minimization).
    pub objective_value: Option<f64>,
    /// Separating density attached to infeasible margin answers.
    pub separator: Option<HermitianOperator>,
}

/// Outcome of the spectral-margin program
/// max { t : lambda >= 0, B - sum lambda_i A_i >= t I }, reported as a
/// verified bracket around the optimum.
#[derive(Debug, Clone)]
pub(crate) struct MarginOutcome {
    /// The returned coefficients achieve this margin (checked by
    /// eigendecomposition).
    pub lower: f64,
    /// No admissible combination exceeds this (checked through a cleaned
    /// dual density); +inf when no clean dual point was recoverable.
    pub upper: f64,
    pub lambda: Vec<f64>,
    /// Cleaned dual density: positive semidefinite with unit trace exactly,
    /// mixed toward the anchor until every generator expectation is
    /// admissible.
    pub dual_density: Option<HermitianOperator>,
}

impl MarginOutcome {
    /// Best available point estimate of the optimal margin.
    pub fn estimate(&self) -> f64 {
        if self.upper.is_finite() {
            0.5 * (self.lower + self.upper)
        } else {
            self.lower
        }
    }
}

fn check_dims(generators: &[HermitianOperator], target: &HermitianOperator) -> Result<usize> {
    let d = target.dim();
    for g in generators {
        if g.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: g.dim(),
            });
        }
    }
    Ok(d)
}

/// Clip a solver matrix onto the density manifold: negative eigenvalues to
/// zero, trace renormalized to one. Returns None for vanishing mass.
fn clean_density(raw: &HermitianOperator) -> Option<HermitianOperator> {
    let sp = spectral_decompose(raw, &Tolerances::default()).ok()?;
    let d = raw.dim();
    let mut mat = nalgebra::DMatrix::from_element(d, d, num_complex::Complex::new(0.0, 0.0));
    let mut mass = 0.0;
    for (k, &lam) in sp.eigenvalues.iter().enumerate() {
        if lam <= 0.0 {
            continue;
        }
        mass += lam;
        let v = sp.eigenvectors.column(k);
        for r in 0..d {
            for c in 0..d {
                mat[(r, c)] += v[r] * v[c].conj() * num_complex::Complex::new(lam, 0.0);
            }
        }
    }
    if mass <= 1e-12 {
        return None;
    }
    Some(HermitianOperator::new_unchecked(mat.unscale(mass)))
}

/// Maximize the margin t with lambda >= 0 (optionally sum lambda = 1).
///
/// `anchor` is a density with strictly positive expectation on every
/// generator, used to repair near-feasible dual points into exactly
/// admissible ones; without it the upper bound may be unavailable for the
/// unconstrained-lambda form.
pub(crate) fn margin_program(
    generators: &[HermitianOperator],
    target: &HermitianOperator,
    sum_to_one: bool,
    anchor: Option<&HermitianOperator>,
    tol: &Tolerances,
    params: &SolverParams,
) -> Result<MarginOutcome> {
    let d = check_dims(generators, target)?;
    let m = generators.len();
    let cap = target.operator_norm() + 1.0;

    let n = 1 + m;
    let sv_len = svec_len(2 * d);
    let lin = m + 1; // lambda >= 0 rows plus the cap row
    let mut g = DMatrix::zeros(lin + sv_len, n);
    let mut h = DVector::zeros(lin + sv_len);
    // lambda_i >= 0: slack = lambda_i.
    for i in 0..m {
        g[(i, 1 + i)] = -1.0;
    }
    // cap: slack = cap - t.
    g[(m, 0)] = 1.0;
    h[m] = cap;
    // PSD block: slack = svec(phi(B)) - t svec(phi(I)) - sum lambda_i svec(phi(A_i)).
    let phi_id = svec(&embed_phi(&HermitianOperator::identity(d)));
    g.view_mut((lin, 0), (sv_len, 1)).copy_from(&phi_id);
    for (i, gen) in generators.iter().enumerate() {
        let col = svec(&embed_phi(gen));
        g.view_mut((lin, 1 + i), (sv_len, 1)).copy_from(&col);
    }
    h.rows_mut(lin, sv_len).copy_from(&svec(&embed_phi(target)));

    let mut c = DVector::zeros(n);
    c[0] = -1.0;

    let (a, b) = if sum_to_one {
        let mut row = DMatrix::zeros(1, n);
        for i in 0..m {
            row[(0, 1 + i)] = 1.0;
        }
        (row, DVector::from_element(1, 1.0))
    } else {
        (DMatrix::zeros(0, n), DVector::zeros(0))
    };

    let prob = ConicProblem {
        c,
        g,
        h,
        a,
        b,
        cone: ConeSpec {
            nonneg: lin,
            psd_blocks: vec![2 * d],
        },
    };
    let sol = ipm::solve(&prob, params);
    match sol.status {
        // A stalled iterate still yields verified bounds below; the bracket
        // just comes out wider.
        SolveStatus::Optimal | SolveStatus::Stalled => {}
        other => {
            return Err(Error::SolverStall {
                detail: format!(
                    "margin program ended with {:?} after {} iterations",
                    other, sol.iterations
                ),
            });
        }
    }

    // Verified lower bound: the margin the primal witness actually achieves.
    let x = sol.primal();
    let mut lambda: Vec<f64> = (0..m).map(|i| x[1 + i].max(0.0)).collect();
    if sum_to_one {
        let total: f64 = lambda.iter().sum();
        if total > 1e-12 {
            for l in &mut lambda {
                *l /= total;
            }
        } else if m > 0 {
            for l in &mut lambda {
                *l = 1.0 / m as f64;
            }
        }
    }
    let mut residual = target.clone();
    for (i, gen) in generators.iter().enumerate() {
        residual = residual.sub(&gen.scale(lambda[i]));
    }
    let lower = residual.min_eigenvalue();

    // Verified upper bound through the dual density.
    let z = sol.dual_z();
    let z_psd = smat(z.rows(lin, sv_len).as_slice(), 2 * d);
    let raw = unembed_phi(&z_psd, d);
    let mut upper = f64::INFINITY;
    let mut dual_density = None;
    if let Some(clean) = clean_density(&raw) {
        if sum_to_one {
            // For convex weights: min-eig(B - sum l A) <= tr(rho B) - min_i tr(rho A_i).
            let min_gen = generators
                .iter()
                .map(|gen| clean.inner(gen))
                .fold(f64::INFINITY, f64::min);
            upper = if m > 0 {
                clean.inner(target) - min_gen
            } else {
                f64::INFINITY
            };
            dual_density = Some(clean);
        } else {
            // Need tr(rho A_i) >= 0 for every generator; repair small
            // violations by mixing toward the anchor.
            let repaired = repair_expectations(&clean, generators, anchor);
            if let Some(rho) = repaired {
                upper = rho.inner(target);
                dual_density = Some(rho);
            } else {
                dual_density = Some(clean);
            }
        }
    }
    // The cap is part of the feasible set, so the true optimum never
    // exceeds it; fold it into the bracket.
    upper = upper.min(cap);

    if lower > upper + tol.cert * target.operator_norm().max(1.0) {
        return Err(Error::SolverStall {
            detail: format!("margin bracket inverted: lower {lower:.3e} above upper {upper:.3e}"),
        });
    }

    Ok(MarginOutcome {
        lower,
        upper,
        lambda,
        dual_density,
    })
}

/// Mixes a density toward the anchor until every generator expectation is
/// nonnegative. Returns None when no admissible mixture below 95% anchor
/// weight exists (or no anchor was supplied and one was needed).
fn repair_expectations(
    rho: &HermitianOperator,
    generators: &[HermitianOperator],
    anchor: Option<&HermitianOperator>,
) -> Option<HermitianOperator> {
    let values: Vec<f64> = generators.iter().map(|g| rho.inner(g)).collect();
    let worst = values.iter().copied().fold(f64::INFINITY, f64::min);
    if worst >= 0.0 || generators.is_empty() {
        return Some(rho.clone());
    }
    let anchor = anchor?;
    let anchor_values: Vec<f64> = generators.iter().map(|g| anchor.inner(g)).collect();
    let mut theta = 0.0f64;
    for (v, c) in values.iter().zip(&anchor_values) {
        if *v < 0.0 {
            if *c <= 0.0 {
                return None;
            }
            theta = theta.max(-v / (c - v));
        }
    }
    // Nudge past the exact boundary so the mixture clears zero despite
    // rounding in the mixing arithmetic.
    let theta = (theta * (1.0 + 1e-9) + 1e-15).min(0.95);
    let mixed = rho.scale(1.0 - theta).add(&anchor.scale(theta));
    let ok = generators.iter().all(|g| mixed.inner(g) >= -1e-12);
    if ok {
        Some(mixed)
    } else {
        None
    }
}

/// Classifies a verified margin bracket against the band policy.
///
/// Strict queries: feasible once the achieved margin reaches eps, infeasible
/// once the upper bound proves the margin below the certificate band, and
/// boundary otherwise. Weak queries place the bands below zero instead: the
/// weak cone is closed, so a certificate-tolerance grace still counts as
/// feasible.
pub(crate) fn classify_interval(
    lower: f64,
    upper: f64,
    strictness: Strictness,
    tol: &Tolerances,
) -> FeasStatus {
    match strictness {
        Strictness::Strict { eps } => {
            if lower >= eps {
                FeasStatus::Feasible
            } else if upper < -tol.cert {
                FeasStatus::Infeasible
            } else {
                FeasStatus::Boundary
            }
        }
        Strictness::Weak => {
            if lower >= -tol.cert {
                FeasStatus::Feasible
            } else if upper < -tol.strict_eps {
                FeasStatus::Infeasible
            } else {
                FeasStatus::Boundary
            }
        }
    }
}

/// Does some nonnegative (optionally nontrivial) combination of the
/// generators fit under the target?
pub fn check_feasible(
    prob: &ConeFeasibilityProblem,
    tol: &Tolerances,
    params: &SolverParams,
) -> Result<Certificate> {
    let d = check_dims(&prob.generators, &prob.target)?;
    let nontrivial = prob.combination == Combination::NonnegNontrivial;
    if nontrivial && prob.generators.is_empty() {
        // No nontrivial combination exists at all.
        return Ok(Certificate {
            status: FeasStatus::Infeasible,
            witness: Witness::None,
            objective_value: None,
            separator: Some(HermitianOperator::identity(d).scale(1.0 / d as f64)),
        });
    }
    let outcome = margin_program(
        &prob.generators,
        &prob.target,
        nontrivial,
        None,
        tol,
        params,
    )?;
    let status = classify_interval(outcome.lower, outcome.upper, prob.strictness, tol);
    let cert = match status {
        FeasStatus::Feasible | FeasStatus::Boundary => Certificate {
            status,
            witness: Witness::Coefficients(outcome.lambda),
            objective_value: Some(outcome.lower),
            separator: None,
        },
        FeasStatus::Infeasible => Certificate {
            status,
            witness: match &outcome.dual_density {
                Some(rho) => Witness::Density(rho.clone()),
                None => Witness::None,
            },
            objective_value: Some(outcome.estimate()),
            separator: outcome.dual_density.clone(),
        },
    };
    Ok(cert)
}

/// Outcome of trace minimization over a spectrahedron, with a verified
/// bracket when the normalizer is the identity.
#[derive(Debug, Clone)]
pub(crate) enum TraceOutcome {
    Optimal {
        /// Bracket midpoint.
        value: f64,
        /// Verified bound from a repaired dual point (identity normalizer
        /// only; otherwise the solver value).
        lower: f64,
        /// Verified bound attained by the cleaned feasible minimizer.
        upper: f64,
        minimizer: HermitianOperator,
    },
    /// Dual ray (normalizer multiplier, constraint multipliers) proving the
    /// constraint set empty.
    Infeasible {
        normalizer_mult: f64,
        mults: Vec<f64>,
    },
}

/// min tr(rho B) s.t. rho >= 0, tr(rho N) = 1, tr(rho A_i) >= b_i.
/// The standard program uses N = I; conditional previsions pass the
/// projected identity as normalizer. `anchor` must satisfy the constraints
/// strictly and is used to repair the minimizer into exact feasibility.
pub(crate) fn trace_program(
    objective: &HermitianOperator,
    constraints: &[(HermitianOperator, f64)],
    normalizer: &HermitianOperator,
    anchor: Option<&HermitianOperator>,
    tol: &Tolerances,
    params: &SolverParams,
) -> Result<TraceOutcome> {
    let d = objective.dim();
    for (a, _) in constraints {
        if a.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: a.dim(),
            });
        }
    }
    if normalizer.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: normalizer.dim(),
        });
    }
    let identity_normalizer = normalizer.entry_distance(&HermitianOperator::identity(d)) < 1e-12;

    let n = d * d;
    let mcon = constraints.len();
    let sv_len = svec_len(2 * d);
    let embed = embedding_matrix(d);

    let mut g = DMatrix::zeros(mcon + sv_len, n);
    let mut h = DVector::zeros(mcon + sv_len);
    for (i, (a, bound)) in constraints.iter().enumerate() {
        let row = hvec(a);
        for j in 0..n {
            g[(i, j)] = -row[j];
        }
        h[i] = -bound;
    }
    g.view_mut((mcon, 0), (sv_len, n)).copy_from(&(-&embed));

    let a_eq = DMatrix::from_rows(&[hvec(normalizer).transpose()]);
    let b_eq = DVector::from_element(1, 1.0);

    let prob = ConicProblem {
        c: hvec(objective),
        g,
        h,
        a: a_eq,
        b: b_eq,
        cone: ConeSpec {
            nonneg: mcon,
            psd_blocks: vec![2 * d],
        },
    };
    let sol = ipm::solve(&prob, params);
    match sol.status {
        SolveStatus::Optimal | SolveStatus::Stalled => {
            // Primal side: clean the slack-read minimizer to an exactly
            // positive-semidefinite matrix, renormalize, and repair small
            // constraint violations toward the anchor. Its objective value
            // is a verified upper bound.
            let slack = sol.slack();
            let rho_raw = unembed_phi(&smat(slack.rows(mcon, sv_len).as_slice(), 2 * d), d);
            let cleaned = clean_density(&rho_raw).ok_or_else(|| Error::SolverStall {
                detail: "trace minimizer has vanishing mass".to_string(),
            })?;
            // clean_density normalizes tr(rho) = 1; renormalize against the
            // requested normalizer.
            let mass = cleaned.inner(normalizer);
            if mass <= 1e-12 {
                return Err(Error::SolverStall {
                    detail: "trace minimizer has vanishing normalizer mass".to_string(),
                });
            }
            let normalized = cleaned.scale(1.0 / mass);
            let gens_only: Vec<HermitianOperator> = constraints
                .iter()
                .filter(|(_, bound)| *bound == 0.0)
                .map(|(a, _)| a.clone())
                .collect();
            let minimizer = if gens_only.len() == constraints.len() {
                repair_expectations(&normalized, &gens_only, anchor)
                    .map(|rho| {
                        let m = rho.inner(normalizer);
                        rho.scale(1.0 / m)
                    })
                    .unwrap_or_else(|| normalized.clone())
            } else {
                normalized.clone()
            };
            let upper = minimizer.inner(objective);

            // Dual side (identity normalizer only): the dual asks for
            // B + y N - sum mu_i A_i >= 0 with objective -y + sum mu_i b_i.
            // Shifting y by the minimum eigenvalue of the dual slack makes
            // it exactly feasible, giving a verified lower bound.
            let y_hat = sol.dual_y()[0];
            let z = sol.dual_z();
            let mults: Vec<f64> = (0..mcon).map(|i| z[i].max(0.0)).collect();
            let lower = if identity_normalizer {
                let mut dual_slack = objective.add(&normalizer.scale(y_hat));
                for (i, (a, _)) in constraints.iter().enumerate() {
                    dual_slack = dual_slack.sub(&a.scale(mults[i]));
                }
                let bound_terms: f64 = mults
                    .iter()
                    .zip(constraints.iter())
                    .map(|(mu, (_, bound))| mu * bound)
                    .sum();
                -y_hat + dual_slack.min_eigenvalue() + bound_terms
            } else {
                upper - (sol.gap.abs() + sol.primal_residual.abs()).max(tol.opt)
            };

            if lower > upper + tol.cert * objective.operator_norm().max(1.0) {
                return Err(Error::SolverStall {
                    detail: format!(
                        "trace bracket inverted: lower {lower:.3e} above upper {upper:.3e}"
                    ),
                });
            }
            let value = if lower.is_finite() {
                0.5 * (lower + upper)
            } else {
                upper
            };
            Ok(TraceOutcome::Optimal {
                value,
                lower,
                upper,
                minimizer,
            })
        }
        SolveStatus::PrimalInfeasible => {
            // Ray (y, z): sum mu_i A_i <= y N with y < sum mu_i b_i.
            let y = sol.y[0];
            let mults: Vec<f64> = (0..mcon).map(|i| sol.z[i].max(0.0)).collect();
            let mut combo = HermitianOperator::zeros(d);
            for (i, (a, _)) in constraints.iter().enumerate() {
                combo = combo.add(&a.scale(mults[i]));
            }
            let lhs = combo.sub(&normalizer.scale(y));
            let strict: f64 = mults
                .iter()
                .zip(constraints.iter())
                .map(|(mu, (_, b))| mu * b)
                .sum::<f64>()
                - y;
            let norm = lhs.operator_norm().max(strict.abs()).max(1e-300);
            if lhs.max_eigenvalue() > tol.cert * norm || strict <= 0.0 {
                return Err(Error::SolverStall {
                    detail: "infeasibility certificate failed re-verification".to_string(),
                });
            }
            Ok(TraceOutcome::Infeasible {
                normalizer_mult: y,
                mults,
            })
        }
        other => Err(Error::SolverStall {
            detail: format!(
                "trace program ended with {:?} after {} iterations (gap {:.2e}, pres {:.2e}, dres {:.2e})",
                other, sol.iterations, sol.gap, sol.primal_residual, sol.dual_residual
            ),
        }),
    }
}

/// Minimize tr(rho B) over the spectrahedron of densities satisfying the
/// program constraints. Infeasibility is a distinguished status carrying the
/// dual ray, not an error.
pub fn minimize_trace(
    prog: &SpectrahedronProgram,
    tol: &Tolerances,
    params: &SolverParams,
) -> Result<Certificate> {
    let normalizer = HermitianOperator::identity(prog.objective.dim());
    match trace_program(
        &prog.objective,
        &prog.constraints,
        &normalizer,
        None,
        tol,
        params,
    )? {
        TraceOutcome::Optimal {
            value, minimizer, ..
        } => Ok(Certificate {
            status: FeasStatus::Feasible,
            witness: Witness::Density(minimizer),
            objective_value: Some(value),
            separator: None,
        }),
        TraceOutcome::Infeasible {
            normalizer_mult,
            mults,
        } => {
            let mut coeffs = vec![normalizer_mult];
            coeffs.extend(mults);
            Ok(Certificate {
                status: FeasStatus::Infeasible,
                witness: Witness::Coefficients(coeffs),
                objective_value: None,
                separator: None,
            })
        }
    }
}
