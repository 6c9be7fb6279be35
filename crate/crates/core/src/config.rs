//! Numerical tolerances and solver parameters.
//!
//! Every classification the library makes (hermiticity, orderings, cone
//! membership, boundary bands) is relative to a tolerance from this module,
//! so boundary behaviour is reproducible across runs and configurable by
//! callers that need tighter or looser bands.

/// Tolerances used across the library. All fields are absolute unless noted.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Max allowed |H[j][k] - conj(H[k][j])| when validating Hermitian input.
    pub hermiticity: f64,
    /// Max allowed deviation from orthonormality for basis kets.
    pub orthonormal: f64,
    /// Max entrywise error for reconstructions (spectral round trips,
    /// projector algebra, mixture identities).
    pub recon: f64,
    /// Half-width of the band around zero inside which an eigenvalue is
    /// treated as zero when classifying orderings.
    pub eig: f64,
    /// Max deviation from unit norm for a normalized ket.
    pub norm: f64,
    /// Operator-norm threshold below which a projected measurement counts
    /// as indifferent (kernel membership).
    pub indiff: f64,
    /// Residual norm below which a candidate basis vector is rejected as
    /// linearly dependent during orthonormalization.
    pub independence: f64,
    /// Max |trace - 1| for a density operator.
    pub trace: f64,
    /// Tolerance for re-verifying solver certificates arithmetically.
    pub cert: f64,
    /// Absolute accuracy target for optimal values of conic programs.
    pub opt: f64,
    /// Max disagreement between the two lower-prevision routes before the
    /// result is flagged as boundary.
    pub dual_gap: f64,
    /// Margin realizing the open cone of positive-definite measurements:
    /// "strictly positive" means min eigenvalue > eps after normalization.
    pub strict_eps: f64,
    /// Smallest event mass that may be conditioned on.
    pub cond_mass: f64,
    /// Max prevision interval width for a model to count as linear when
    /// evaluating conditional previsions.
    pub linear_width: f64,
    /// Hard cap on operator dimension.
    pub dim_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-10,
            orthonormal: 1e-10,
            recon: 1e-10,
            eig: 1e-9,
            norm: 1e-12,
            indiff: 1e-9,
            independence: 1e-8,
            trace: 1e-9,
            cert: 1e-7,
            opt: 1e-7,
            dual_gap: 1e-5,
            strict_eps: 1e-6,
            cond_mass: 1e-8,
            linear_width: 1e-3,
            dim_cap: 64,
        }
    }
}

impl Tolerances {
    /// Set a tolerance by its config key. Returns false for unknown keys.
    pub fn set_by_key(&mut self, key: &str, value: f64) -> bool {
        match key {
            "hermiticity" => self.hermiticity = value,
            "orthonormal" => self.orthonormal = value,
            "recon" => self.recon = value,
            "eig" => self.eig = value,
            "norm" => self.norm = value,
            "indiff" => self.indiff = value,
            "independence" => self.independence = value,
            "trace" => self.trace = value,
            "cert" => self.cert = value,
            "opt" => self.opt = value,
            "dual_gap" => self.dual_gap = value,
            "strict_eps" => self.strict_eps = value,
            "cond_mass" => self.cond_mass = value,
            "linear_width" => self.linear_width = value,
            "dim_cap" => self.dim_cap = value as usize,
            _ => return false,
        }
        true
    }
}

/// Interior-point solver parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    /// Iteration cap. Hitting it without a certificate is reported as a
    /// stall, never silently truncated.
    pub max_iter: usize,
    /// Relative feasibility tolerance.
    pub tol_feas: f64,
    /// Absolute complementarity-gap tolerance.
    pub tol_gap_abs: f64,
    /// Relative complementarity-gap tolerance.
    pub tol_gap_rel: f64,
    /// Fraction of the distance to the cone boundary taken each step.
    pub step_frac: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol_feas: 1e-8,
            tol_gap_abs: 1e-9,
            tol_gap_rel: 1e-9,
            step_frac: 0.99,
        }
    }
}
