use thiserror::Error;

use crate::averaging::MeanKind;

/// A value outside the domain of a thermodynamic or averaging operation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("{kind:?} mean requires positive finite arguments, got {value}")]
    NonPositiveMeanArgument { kind: MeanKind, value: f64 },
    #[error("Stolarsky exponent must exceed 1, got {0}")]
    StolarskyExponent(f64),
    #[error("inadmissible state: density {rho}, pressure {pressure}")]
    Inadmissible { rho: f64, pressure: f64 },
    #[error("invalid gas constants: {0}")]
    GasConstants(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("polynomial degree must be at least 1, got {0}")]
    InvalidDegree(usize),
    #[error("need at least one cell/element per direction")]
    NoCells,
    #[error("degenerate bounds in direction {direction}: [{lower}, {upper}]")]
    DegenerateBounds { direction: usize, lower: f64, upper: f64 },
    #[error("non-positive Jacobian {jacobian} at element {element}, node {node}")]
    NonPositiveJacobian { element: usize, node: usize, jacobian: f64 },
    #[error("interface coordinates disagree by {mismatch} between elements {left} and {right}")]
    InterfaceMismatch { left: usize, right: usize, mismatch: f64 },
    #[error("discrete metric identity violated: residual {residual} (scale {scale}) in element {element}")]
    MetricIdentity { element: usize, residual: f64, scale: f64 },
    #[error("curvilinear metrics are only implemented in 1D and 2D, requested {0}D")]
    UnsupportedDimension(usize),
}

/// Failure while evaluating a right-hand side or advancing in time.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("inadmissible state at index {index}: {source}")]
    Inadmissible { index: usize, source: DomainError },
    #[error("non-finite value at index {index}, t = {time}")]
    NonFinite { index: usize, time: f64 },
    #[error("right-hand side failed in stage {stage} at t = {time}: {source}")]
    Stage { stage: usize, time: f64, source: Box<EvalError> },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error("{0}")]
    Inconsistent(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Crate-level error.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
