//! Problem file parsing and validation.
//!
//! A problem is a UTF-8 JSON document with top-level keys `dim`,
//! `operators`, `subspaces`, `assessments`, `densities` and `config`.
//! Complex numbers are `[re, im]` pairs, matrices row-major, kets plain
//! lists of pairs. Every named object is validated at load time; validation
//! failures name the object and the violated invariant.

use std::collections::BTreeMap;

use serde::Deserialize;

use desq_core::desirability::Assessment;
use desq_core::hermitian::{HermitianOperator, Ket, Subspace};
use desq_core::previsions::DensityOperator;
use desq_core::Tolerances;

use crate::CliError;

type ComplexPair = [f64; 2];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dim: usize,
    #[serde(default)]
    pub config: ConfigBlock,
    #[serde(default)]
    pub operators: BTreeMap<String, Vec<Vec<ComplexPair>>>,
    #[serde(default)]
    pub subspaces: BTreeMap<String, Vec<Vec<ComplexPair>>>,
    #[serde(default)]
    pub assessments: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub densities: BTreeMap<String, String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigBlock {
    pub seed: Option<u64>,
    pub eps: Option<f64>,
    #[serde(default)]
    pub tol: BTreeMap<String, f64>,
}

/// Fully validated problem: every name resolves, every matrix is Hermitian,
/// every density passes the trace-one and positivity checks.
pub struct Problem {
    pub dim: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub operators: BTreeMap<String, HermitianOperator>,
    pub subspaces: BTreeMap<String, Subspace>,
    pub assessments: BTreeMap<String, Assessment>,
    pub densities: BTreeMap<String, DensityOperator>,
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, CliError> {
    serde_json::from_str(text)
        .map_err(|e| CliError::Parse(format!("line {}, column {}: {}", e.line(), e.column(), e)))
}

/// Applies config overrides in order: defaults, problem config block, then
/// command-line settings.
pub fn compile_problem(
    file: &ProblemFile,
    cli_eps: Option<f64>,
    cli_tols: &[(String, f64)],
    cli_seed: Option<u64>,
) -> Result<Problem, CliError> {
    let mut tolerances = Tolerances::default();
    for (key, value) in &file.config.tol {
        if !tolerances.set_by_key(key, *value) {
            return Err(CliError::Validation(format!(
                "config.tol: unknown tolerance key `{key}`"
            )));
        }
    }
    if let Some(eps) = file.config.eps {
        tolerances.strict_eps = eps;
    }
    for (key, value) in cli_tols {
        if !tolerances.set_by_key(key, *value) {
            return Err(CliError::Validation(format!(
                "--tol: unknown tolerance key `{key}`"
            )));
        }
    }
    if let Some(eps) = cli_eps {
        tolerances.strict_eps = eps;
    }
    let seed = cli_seed.or(file.config.seed).unwrap_or(0);

    let dim = file.dim;
    if dim == 0 {
        return Err(CliError::Validation("dim must be positive".into()));
    }
    if dim > tolerances.dim_cap {
        return Err(CliError::Validation(format!(
            "dim {dim} exceeds the configured cap {}",
            tolerances.dim_cap
        )));
    }

    let mut operators = BTreeMap::new();
    for (name, rows) in &file.operators {
        operators.insert(name.clone(), build_operator(name, dim, rows, &tolerances)?);
    }

    let mut subspaces = BTreeMap::new();
    for (name, kets) in &file.subspaces {
        if kets.is_empty() {
            return Err(CliError::Validation(format!(
                "subspace `{name}`: needs at least one basis ket"
            )));
        }
        let mut parsed = Vec::with_capacity(kets.len());
        for (i, amplitudes) in kets.iter().enumerate() {
            if amplitudes.len() != dim {
                return Err(CliError::Validation(format!(
                    "subspace `{name}`, ket {i}: expected {dim} amplitudes, got {}",
                    amplitudes.len()
                )));
            }
            parsed.push(Ket::from_pairs(
                &amplitudes.iter().map(|p| (p[0], p[1])).collect::<Vec<_>>(),
            ));
        }
        let subspace = Subspace::new(dim, parsed, &tolerances)
            .map_err(|e| CliError::Validation(format!("subspace `{name}`: {e}")))?;
        subspaces.insert(name.clone(), subspace);
    }

    let mut assessments = BTreeMap::new();
    for (name, op_names) in &file.assessments {
        let mut gens = Vec::with_capacity(op_names.len());
        for op_name in op_names {
            let op = operators.get(op_name).ok_or_else(|| {
                CliError::Validation(format!("assessment `{name}`: unknown operator `{op_name}`"))
            })?;
            gens.push(op.clone());
        }
        let assessment = Assessment::new(dim, gens)
            .map_err(|e| CliError::Validation(format!("assessment `{name}`: {e}")))?;
        assessments.insert(name.clone(), assessment);
    }

    let mut densities = BTreeMap::new();
    for (name, op_name) in &file.densities {
        let op = operators.get(op_name).ok_or_else(|| {
            CliError::Validation(format!("density `{name}`: unknown operator `{op_name}`"))
        })?;
        let density = DensityOperator::new(op.clone(), &tolerances)
            .map_err(|e| CliError::Validation(format!("density `{name}`: {e}")))?;
        densities.insert(name.clone(), density);
    }

    Ok(Problem {
        dim,
        seed,
        tolerances,
        operators,
        subspaces,
        assessments,
        densities,
    })
}

fn build_operator(
    name: &str,
    dim: usize,
    rows: &[Vec<ComplexPair>],
    tolerances: &Tolerances,
) -> Result<HermitianOperator, CliError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(CliError::Validation(format!(
            "operator `{name}`: expected a {dim}x{dim} matrix"
        )));
    }
    let entries: Vec<(f64, f64)> = rows
        .iter()
        .flat_map(|r| r.iter().map(|p| (p[0], p[1])))
        .collect();
    HermitianOperator::from_entries(dim, &entries, tolerances)
        .map_err(|e| CliError::Validation(format!("operator `{name}`: {e}")))
}

impl Problem {
    pub fn operator(&self, name: &str) -> Result<&HermitianOperator, CliError> {
        self.operators
            .get(name)
            .ok_or_else(|| CliError::Usage(format!("unknown operator `{name}`")))
    }

    pub fn assessment(&self, name: &str) -> Result<&Assessment, CliError> {
        self.assessments
            .get(name)
            .ok_or_else(|| CliError::Usage(format!("unknown assessment `{name}`")))
    }

    pub fn subspace(&self, name: &str) -> Result<&Subspace, CliError> {
        self.subspaces
            .get(name)
            .ok_or_else(|| CliError::Usage(format!("unknown subspace `{name}`")))
    }

    pub fn density(&self, name: &str) -> Result<&DensityOperator, CliError> {
        self.densities
            .get(name)
            .ok_or_else(|| CliError::Usage(format!("unknown density `{name}`")))
    }
}
