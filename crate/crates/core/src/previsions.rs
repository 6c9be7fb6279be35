//! Lower and upper previsions of measurements under an assessment, duality
//! with credal sets of density operators, and extraction of the unique
//! density operator of a linear prevision.
//!
//! The lower prevision is the supremum acceptable buying price for a
//! measurement. Two routes compute it: bisection on the price with a
//! natural-extension membership query at each step, and direct minimization
//! of tr(rho B) over the credal set of dominating densities. The routes are
//! a primal-dual pair, so every public prevision call runs both and flags
//! disagreement instead of trusting either side alone.

use std::collections::HashMap;

use crate::cone::{trace_program, SpectrahedronProgram, TraceOutcome};
use crate::config::Tolerances;
use crate::desirability::{MembershipStatus, NaturalExtensionModel};
use crate::error::{Error, Result};
use crate::hermitian::HermitianOperator;

/// A positive semidefinite, trace-one Hermitian operator.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl DensityOperator {
    pub fn new(op: HermitianOperator, tol: &Tolerances) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > tol.trace {
            return Err(Error::NotADensity {
                detail: format!("trace {trace} is not 1"),
            });
        }
        let min_eig = op.min_eigenvalue();
        if min_eig < -tol.eig {
            return Err(Error::NotADensity {
                detail: format!("minimum eigenvalue {min_eig:e} is negative"),
            });
        }
        Ok(Self { op })
    }

    /// Wraps a solver-produced matrix: renormalizes the trace and absorbs
    /// sub-certificate-tolerance negative eigenvalues by an identity shift.
    pub(crate) fn from_solver(op: HermitianOperator, tol: &Tolerances) -> Result<Self> {
        let trace = op.trace();
        if trace.abs() < 1e-12 {
            return Err(Error::NotADensity {
                detail: "solver witness has vanishing trace".into(),
            });
        }
        let mut normalized = op.scale(1.0 / trace);
        let min_eig = normalized.min_eigenvalue();
        if min_eig < -tol.cert {
            return Err(Error::NotADensity {
                detail: format!("solver witness eigenvalue {min_eig:e} below tolerance"),
            });
        }
        if min_eig < -tol.eig {
            let d = normalized.dim() as f64;
            let shift = -min_eig + 1e-15;
            normalized = normalized
                .add(&HermitianOperator::identity(normalized.dim()).scale(shift))
                .scale(1.0 / (1.0 + d * shift));
        }
        Self::new(normalized, tol)
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Expected reward tr(rho A).
    pub fn expectation(&self, a: &HermitianOperator) -> f64 {
        self.op.inner(a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrevisionStatus {
    Exact,
    /// The two routes disagreed beyond the dual gap tolerance, or a
    /// membership query landed in the boundary band.
    Boundary,
}

#[derive(Debug, Clone)]
pub struct PrevisionResult {
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: DensityOperator,
    pub upper_witness: DensityOperator,
    pub status: PrevisionStatus,
    /// Largest disagreement between the minimization route and the
    /// bisection route, when both ran (conditional previsions use interval
    /// containment instead and report zero here).
    pub route_gap: f64,
}

/// Credal bounds from the minimization route only (no cross-validation).
/// Internal machinery uses this where the public dual-route contract would
/// multiply solver calls without adding information.
#[derive(Debug, Clone)]
pub(crate) struct CredalBounds {
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: HermitianOperator,
    pub upper_witness: HermitianOperator,
    /// Both verified brackets closed to within the certificate tolerance.
    pub tight: bool,
}

pub(crate) fn credal_bounds(
    model: &NaturalExtensionModel,
    b: &HermitianOperator,
) -> Result<CredalBounds> {
    if !model.is_consistent() {
        return Err(Error::InconsistentAssessment);
    }
    let constraints: Vec<(HermitianOperator, f64)> = model
        .assessment()
        .generators()
        .iter()
        .map(|g| (g.clone(), 0.0))
        .collect();
    let normalizer = HermitianOperator::identity(b.dim());
    let tol = model.tolerances();
    let params = model.solver_params();
    let anchor = model.credal_anchor();
    let scale = b.operator_norm().max(1.0);
    let width_cap = 2.0 * tol.cert * scale;
    let lower = match trace_program(b, &constraints, &normalizer, anchor, tol, params)? {
        TraceOutcome::Optimal {
            value,
            lower,
            upper,
            minimizer,
        } => (value, minimizer, (upper - lower).abs() <= width_cap),
        TraceOutcome::Infeasible { .. } => return Err(Error::EmptyCredalSet),
    };
    let negated = b.scale(-1.0);
    let upper = match trace_program(&negated, &constraints, &normalizer, anchor, tol, params)? {
        TraceOutcome::Optimal {
            value,
            lower,
            upper,
            minimizer,
        } => (-value, minimizer, (upper - lower).abs() <= width_cap),
        TraceOutcome::Infeasible { .. } => return Err(Error::EmptyCredalSet),
    };
    Ok(CredalBounds {
        lower: lower.0,
        upper: upper.0,
        lower_witness: lower.1,
        upper_witness: upper.1,
        tight: lower.2 && upper.2,
    })
}

/// Supremum buying price by bisection on the price axis: the natural
/// extension contains B - alpha I below the price and rejects it above.
/// A boundary answer ends the search: the probe sits inside the band around
/// the membership border, which localizes the price as sharply as the band
/// allows.
fn bisect_price(model: &NaturalExtensionModel, b: &HermitianOperator) -> Result<f64> {
    let min_sp = b.min_eigenvalue();
    let max_sp = b.max_eigenvalue();
    let width = (max_sp - min_sp).max(1e-9);
    let mut lo = min_sp - 1e-3 * width - 1e-9;
    let mut hi = max_sp + 1e-3 * width + 1e-9;
    let target = 1e-6 * width.max(1.0);
    let id = HermitianOperator::identity(b.dim());
    for _ in 0..64 {
        if hi - lo <= target {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let probe = b.sub(&id.scale(mid));
        match model.member(&probe)?.status {
            MembershipStatus::Member => lo = mid,
            MembershipStatus::NonMember => hi = mid,
            MembershipStatus::Boundary => {
                lo = mid;
                hi = mid;
            }
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Lower and upper previsions of a measurement, with the minimization route
/// cross-validated against the bisection route in both directions. The
/// returned values come from the minimization route; disagreement beyond the
/// dual-gap tolerance is reported as boundary status, never silently
/// resolved.
pub fn lower_prevision(
    model: &NaturalExtensionModel,
    b: &HermitianOperator,
) -> Result<PrevisionResult> {
    if b.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: b.dim(),
        });
    }
    let tol = model.tolerances();
    let bounds = credal_bounds(model, b)?;

    let bis_lower = bisect_price(model, b)?;
    let bis_upper = -bisect_price(model, &b.scale(-1.0))?;

    let scale = b.operator_norm().max(1.0);
    let route_gap = (bounds.lower - bis_lower)
        .abs()
        .max((bounds.upper - bis_upper).abs());
    let status = if route_gap <= tol.dual_gap * scale && bounds.tight {
        PrevisionStatus::Exact
    } else {
        PrevisionStatus::Boundary
    };

    let result = PrevisionResult {
        lower: bounds.lower,
        upper: bounds.upper,
        lower_witness: DensityOperator::from_solver(bounds.lower_witness, tol)?,
        upper_witness: DensityOperator::from_solver(bounds.upper_witness, tol)?,
        status,
        route_gap,
    };
    debug_assert!(result.lower <= result.upper + 2.0 * tol.opt * scale);
    debug_assert!(result.lower >= b.min_eigenvalue() - tol.opt * scale);
    debug_assert!(result.upper <= b.max_eigenvalue() + tol.opt * scale);
    Ok(result)
}

/// The constraint system whose solution set is the credal set generated by
/// the assessment: rho PSD, tr rho = 1, tr(rho A_i) >= 0. The objective slot
/// is left at the null measurement for the caller to fill.
pub fn credal_set_description(model: &NaturalExtensionModel) -> Result<SpectrahedronProgram> {
    if !model.is_consistent() {
        return Err(Error::InconsistentAssessment);
    }
    Ok(SpectrahedronProgram {
        objective: HermitianOperator::zeros(model.dim()),
        constraints: model
            .assessment()
            .generators()
            .iter()
            .map(|g| (g.clone(), 0.0))
            .collect(),
    })
}

/// Index into the canonical Hermitian basis: diagonal units, symmetric
/// pairs and antisymmetric (imaginary) pairs, j < k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    Diag(usize),
    Sym(usize, usize),
    Skew(usize, usize),
}

impl BasisLabel {
    pub fn all(dim: usize) -> Vec<BasisLabel> {
        let mut out = Vec::with_capacity(dim * dim);
        for j in 0..dim {
            out.push(BasisLabel::Diag(j));
        }
        for k in 1..dim {
            for j in 0..k {
                out.push(BasisLabel::Sym(j, k));
                out.push(BasisLabel::Skew(j, k));
            }
        }
        out
    }

    /// The basis operator this label names.
    pub fn operator(&self, dim: usize) -> HermitianOperator {
        use num_complex::Complex;
        let mut m = nalgebra::DMatrix::from_element(dim, dim, Complex::new(0.0, 0.0));
        match *self {
            BasisLabel::Diag(j) => m[(j, j)] = Complex::new(1.0, 0.0),
            BasisLabel::Sym(j, k) => {
                m[(j, k)] = Complex::new(1.0, 0.0);
                m[(k, j)] = Complex::new(1.0, 0.0);
            }
            BasisLabel::Skew(j, k) => {
                m[(j, k)] = Complex::new(0.0, 1.0);
                m[(k, j)] = Complex::new(0.0, -1.0);
            }
        }
        HermitianOperator::new_unchecked(m)
    }
}

impl std::fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BasisLabel::Diag(j) => write!(f, "diag({j})"),
            BasisLabel::Sym(j, k) => write!(f, "sym({j},{k})"),
            BasisLabel::Skew(j, k) => write!(f, "skew({j},{k})"),
        }
    }
}

/// Prevision values on the canonical basis of the measurement space.
#[derive(Debug, Clone)]
pub struct PrevisionValues {
    dim: usize,
    values: HashMap<BasisLabel, f64>,
}

impl PrevisionValues {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            values: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&mut self, label: BasisLabel, value: f64) {
        self.values.insert(label, value);
    }

    pub fn get(&self, label: BasisLabel) -> Option<f64> {
        self.values.get(&label).copied()
    }

    /// Evaluates tr(. rho) on every basis element of a known density.
    pub fn from_density(rho: &HermitianOperator) -> Self {
        let dim = rho.dim();
        let mut out = Self::new(dim);
        for label in BasisLabel::all(dim) {
            out.set(label, label.operator(dim).inner(rho));
        }
        out
    }

    /// Midpoints of the credal prevision intervals on every basis element.
    /// For a linear model the midpoints recover the underlying prevision
    /// functional to solver accuracy. Every coherent prevision assigns one
    /// to the identity, so the values are rescaled to make the diagonal sum
    /// exactly one, absorbing per-element solver error.
    pub fn from_model_midpoints(model: &NaturalExtensionModel) -> Result<Self> {
        let dim = model.dim();
        let mut out = Self::new(dim);
        for label in BasisLabel::all(dim) {
            let bounds = credal_bounds(model, &label.operator(dim))?;
            out.set(label, 0.5 * (bounds.lower + bounds.upper));
        }
        let diag_sum: f64 = (0..dim)
            .map(|j| out.get(BasisLabel::Diag(j)).unwrap())
            .sum();
        if diag_sum > 0.5 {
            for label in BasisLabel::all(dim) {
                let v = out.get(label).unwrap();
                out.set(label, v / diag_sum);
            }
        }
        Ok(out)
    }

    /// Largest prevision interval width over the basis; zero for a linear
    /// model up to solver accuracy.
    pub fn max_interval_width(model: &NaturalExtensionModel) -> Result<f64> {
        let dim = model.dim();
        let mut width = 0.0f64;
        for label in BasisLabel::all(dim) {
            let bounds = credal_bounds(model, &label.operator(dim))?;
            width = width.max(bounds.upper - bounds.lower);
        }
        Ok(width)
    }
}

/// Reconstructs the unique density operator representing a linear prevision
/// from its values on the canonical basis. Fails with `NotADensity` when the
/// values violate positivity or normalization, i.e. when the functional was
/// not a coherent prevision.
pub fn density_of_linear_prevision(
    values: &PrevisionValues,
    tol: &Tolerances,
) -> Result<DensityOperator> {
    use num_complex::Complex;
    let d = values.dim;
    let mut mat = nalgebra::DMatrix::from_element(d, d, Complex::new(0.0, 0.0));
    for j in 0..d {
        let v = values
            .get(BasisLabel::Diag(j))
            .ok_or(Error::IncompleteBasis {
                label: BasisLabel::Diag(j).to_string(),
            })?;
        mat[(j, j)] = Complex::new(v, 0.0);
    }
    for k in 1..d {
        for j in 0..k {
            let re = values
                .get(BasisLabel::Sym(j, k))
                .ok_or(Error::IncompleteBasis {
                    label: BasisLabel::Sym(j, k).to_string(),
                })?;
            let im = values
                .get(BasisLabel::Skew(j, k))
                .ok_or(Error::IncompleteBasis {
                    label: BasisLabel::Skew(j, k).to_string(),
                })?;
            let z = Complex::new(re / 2.0, im / 2.0);
            mat[(j, k)] = z;
            mat[(k, j)] = z.conj();
        }
    }
    DensityOperator::new(HermitianOperator::new_unchecked(mat), tol)
}

/// Sanity helper shared by tests: the canonical basis spans, so recomposing
/// from expectations reproduces the operator.
pub fn expectations_span_check(rho: &HermitianOperator, tol: &Tolerances) -> Result<f64> {
    let values = PrevisionValues::from_density(rho);
    let rebuilt = density_of_linear_prevision(&values, tol)?;
    Ok(rebuilt.operator().entry_distance(rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::desirability::Assessment;
    use crate::random::{random_density, seeded_rng, unit_gue};
    use crate::Tolerances;

    fn model(gens: Vec<HermitianOperator>, dim: usize) -> NaturalExtensionModel {
        NaturalExtensionModel::build(Assessment::new(dim, gens).unwrap(), Tolerances::default())
            .unwrap()
    }

    #[test]
    fn vacuous_previsions_are_spectral_bounds() {
        let m = model(vec![], 3);
        let b = HermitianOperator::from_diagonal(&[0.2, -1.3, 0.7]);
        let r = lower_prevision(&m, &b).unwrap();
        assert!((r.lower + 1.3).abs() < 1e-6, "lower {}", r.lower);
        assert!((r.upper - 0.7).abs() < 1e-6, "upper {}", r.upper);
        assert_eq!(r.status, PrevisionStatus::Exact);
    }

    #[test]
    fn identity_prevision_is_one() {
        let m = model(vec![HermitianOperator::from_diagonal(&[1.0, -0.6])], 2);
        let r = lower_prevision(&m, &HermitianOperator::identity(2)).unwrap();
        assert!((r.lower - 1.0).abs() < 1e-7);
        assert!((r.upper - 1.0).abs() < 1e-7);
    }

    #[test]
    fn bloch_example_interval() {
        // Generators {diag(1,-1)}: credal set is the upper half Bloch ball;
        // prevision of diag(1,0) is [1/2, 1].
        let m = model(vec![HermitianOperator::from_diagonal(&[1.0, -1.0])], 2);
        let r = lower_prevision(&m, &HermitianOperator::from_diagonal(&[1.0, 0.0])).unwrap();
        assert!((r.lower - 0.5).abs() < 1e-6, "lower {}", r.lower);
        assert!((r.upper - 1.0).abs() < 1e-6, "upper {}", r.upper);
        assert!(
            r.lower_witness
                .expectation(&HermitianOperator::from_diagonal(&[1.0, -1.0]))
                >= -1e-7
        );
    }

    #[test]
    fn conjugacy_holds() {
        let mut rng = seeded_rng(17);
        let m = model(vec![unit_gue(3, &mut rng)], 3);
        if !m.is_consistent() {
            return;
        }
        let b = unit_gue(3, &mut rng);
        let r = lower_prevision(&m, &b).unwrap();
        let r_neg = lower_prevision(&m, &b.scale(-1.0)).unwrap();
        assert!((r.upper + r_neg.lower).abs() < 1e-6);
        assert!((r.lower + r_neg.upper).abs() < 1e-6);
    }

    #[test]
    fn lp_properties_on_random_instances() {
        let tol = Tolerances::default();
        let mut rng = seeded_rng(23);
        let mut done = 0;
        while done < 5 {
            let gens: Vec<_> = (0..2).map(|_| unit_gue(3, &mut rng)).collect();
            let m = match NaturalExtensionModel::build(
                Assessment::new(3, gens).unwrap(),
                tol.clone(),
            ) {
                Ok(m) if m.is_consistent() => m,
                _ => continue,
            };
            let a = unit_gue(3, &mut rng);
            let b = unit_gue(3, &mut rng);
            let ra = lower_prevision(&m, &a).unwrap();
            let rb = lower_prevision(&m, &b).unwrap();
            let rab = lower_prevision(&m, &a.add(&b)).unwrap();
            // LP1: super-additivity.
            assert!(
                rab.lower >= ra.lower + rb.lower - 3.0 * tol.opt,
                "superadditivity: {} vs {} + {}",
                rab.lower,
                ra.lower,
                rb.lower
            );
            // LP2: nonnegative homogeneity.
            for c in [0.5, 2.0, 10.0] {
                let rc = lower_prevision(&m, &a.scale(c)).unwrap();
                assert!(
                    (rc.lower - c * ra.lower).abs() <= c * 1e-6,
                    "homogeneity at {c}: {} vs {}",
                    rc.lower,
                    c * ra.lower
                );
            }
            // LP3: accepting sure gains.
            assert!(ra.lower >= a.min_eigenvalue() - tol.opt);
            done += 1;
        }
    }

    #[test]
    fn credal_description_matches_generators() {
        let g = HermitianOperator::from_diagonal(&[1.0, -1.0]);
        let m = model(vec![g.clone()], 2);
        let desc = credal_set_description(&m).unwrap();
        assert_eq!(desc.constraints.len(), 1);
        assert!(desc.constraints[0].0.entry_distance(&g) < 1e-12);

        let vac = model(vec![], 2);
        assert!(credal_set_description(&vac).unwrap().constraints.is_empty());

        let bad = model(vec![HermitianOperator::identity(2).scale(-1.0)], 2);
        assert!(matches!(
            credal_set_description(&bad).unwrap_err(),
            Error::InconsistentAssessment
        ));
    }

    #[test]
    fn density_reconstruction_roundtrip() {
        let tol = Tolerances::default();
        let mut rng = seeded_rng(31);
        let rho = random_density(4, &mut rng);
        let dist = expectations_span_check(&rho, &tol).unwrap();
        assert!(dist < 1e-10, "reconstruction distance {dist}");
    }

    #[test]
    fn non_unit_trace_is_rejected() {
        let tol = Tolerances::default();
        let mut values =
            PrevisionValues::from_density(&HermitianOperator::from_diagonal(&[0.5, 0.5]));
        values.set(BasisLabel::Diag(0), 0.9); // forces trace 1.4
        let err = density_of_linear_prevision(&values, &tol).unwrap_err();
        assert!(matches!(err, Error::NotADensity { .. }));
    }

    #[test]
    fn missing_basis_value_is_rejected() {
        let tol = Tolerances::default();
        let mut values = PrevisionValues::new(2);
        values.set(BasisLabel::Diag(0), 0.5);
        let err = density_of_linear_prevision(&values, &tol).unwrap_err();
        assert!(matches!(err, Error::IncompleteBasis { .. }));
    }

    #[test]
    fn pinned_model_midpoints_recover_density() {
        let tol = Tolerances::default();
        let mut rng = seeded_rng(37);
        // Full-rank density keeps the pin box inside the cone.
        let raw = random_density(2, &mut rng);
        let rho = raw
            .scale(0.8)
            .add(&HermitianOperator::identity(2).scale(0.1));
        let m = NaturalExtensionModel::build(Assessment::pinning_density(&rho, 1e-4), tol.clone())
            .unwrap();
        assert!(m.is_consistent());
        let width = PrevisionValues::max_interval_width(&m).unwrap();
        assert!(width < 1e-3, "interval width {width}");
        let values = PrevisionValues::from_model_midpoints(&m).unwrap();
        let rebuilt = density_of_linear_prevision(&values, &tol).unwrap();
        let dist = rebuilt.operator().entry_distance(&rho);
        assert!(dist < 1e-5, "midpoint reconstruction distance {dist}");
        // The recovered density reproduces previsions of fresh measurements.
        let fresh = unit_gue(2, &mut rng);
        let bounds = lower_prevision(&m, &fresh).unwrap();
        let predicted = rebuilt.expectation(&fresh);
        assert!((0.5 * (bounds.lower + bounds.upper) - predicted).abs() < 1e-5);
    }
}
