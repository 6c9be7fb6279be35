//! Desirable-measurement calculus for uncertainty about quantum states on
//! finite-dimensional Hilbert spaces.
//!
//! A belief state is a set of Hermitian measurement operators the agent
//! strictly prefers to the null measurement. This crate provides:
//!
//! * exact-structure Hermitian algebra: spectra, spectral orderings,
//!   projectors and the measurement projections A -> P A P and
//!   A -> sum_k P_k A P_k ([`hermitian`]);
//! * the conic engine answering positive-hull and spectrahedron questions
//!   with re-verified certificates ([`cone`]);
//! * assessments, consistency, natural-extension membership and coherence
//!   audits ([`desirability`]);
//! * lower/upper previsions, credal sets of density operators and the
//!   density operator of a linear prevision ([`previsions`]);
//! * conditioning of models, previsions and density operators on a subspace
//!   or on a union of mutually orthogonal subspaces ([`conditioning`]).

pub mod conditioning;
pub mod cone;
pub mod config;
pub mod desirability;
pub mod error;
pub mod hermitian;
pub mod previsions;
pub mod random;
pub mod spin_pair;

pub use config::{SolverParams, Tolerances};
pub use error::{Error, Result};
