use thiserror::Error;

use crate::radial::Space;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid problem spec: {}", .0.join("; "))]
    InvalidSpec(Vec<String>),

    #[error("dimension N={dim} is too small, the threshold polynomial needs N >= 5")]
    DimensionTooSmall { dim: usize },

    #[error("theorem window is empty: lower bound {lo} >= upper bound {hi}")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("Newton iteration for zero {index} of J_{order} did not converge")]
    BesselZeroFailure { order: f64, index: usize },

    #[error("field is in {found:?} space, expected {expected:?}")]
    SpaceMismatch { expected: Space, found: Space },

    #[error("field has {found} samples but the plan has {expected} nodes")]
    PlanMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("grid with {k} nodes is too small")]
    GridTooSmall { k: usize },

    #[error("invalid grid parameters: {0}")]
    InvalidGrid(String),

    #[error("operation needs the {0} family fields which are not set")]
    SpecMismatch(&'static str),

    #[error("field is identically zero")]
    ZeroField,

    #[error("no convergence after {iterations} iterations, last residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("stabilizing factor oscillated over a dynamic range of {range:e}")]
    StagnationDetected { range: f64 },

    #[error("certification failed: {}", .0.join("; "))]
    CertificationFailure(Vec<String>),

    #[error("cutoff radius {r} must lie in (0, {r_max})")]
    RangeError { r: f64, r_max: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("no local mass recorded at R={r}")]
    MissingDiagnostic { r: f64 },

    #[error("run too short for a fit: {0}")]
    RunTooShort(String),

    #[error("invalid run configuration: {0}")]
    InvalidRunConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
