use thiserror::Error;

use crate::vertex_metrics::MetricViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("duplicate vertex label `{0}`")]
    DuplicateVertex(String),
    #[error("simplex references unknown vertex `{0}`")]
    UnknownVertexInSimplex(String),
    #[error("empty simplex")]
    EmptySimplex,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("negative barycentric weight {weight} at vertex `{vertex}`")]
    NegativeWeight { vertex: String, weight: f64 },
    #[error("weights sum to {0}, cannot normalize")]
    WeightsNotNormalizable(f64),
    #[error("support {0:?} does not span a simplex")]
    SupportNotASimplex(Vec<String>),
    #[error("points do not lie in a common simplex")]
    NoCommonSimplex,
    #[error("vertex map is not a simplicial automorphism: {0}")]
    NotAnAutomorphism(String),

    #[error("complex is disconnected")]
    DisconnectedComplex,
    #[error("invalid vertex metric: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidMetric(Vec<MetricViolation>),
    #[error("metric matrix has shape {rows}x{cols}, expected {expected}x{expected}")]
    MetricShape { rows: usize, cols: usize, expected: usize },
    #[error("supplied linear-bound constant {supplied} is below the minimal admissible {minimal}")]
    SuppliedConstantTooSmall { supplied: f64, minimal: f64 },
    #[error("quasi-isometry constants (A={a}, B={b}) fail on {pairs} vertex pair(s)")]
    QiConstantsViolated { a: f64, b: f64, pairs: usize },
    #[error("quasi-isometry constants required but not supplied")]
    MissingQIConstants,

    #[error("carrier {index} does not contain both endpoints of its step")]
    InvalidCarrier { index: usize },
    #[error("consecutive chain simplices {index} and {next} do not intersect", next = .index + 1)]
    EmptyIntersection { index: usize },
    #[error("path endpoint is not contained in its carrier simplex")]
    EndpointNotInCarrier,
    #[error("chain search exhausted its budget ({0}) before optimality was proven")]
    ChainBudgetExceeded(String),
    #[error("linear program failed: {0}")]
    LinearProgram(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("point is not on the grid of resolution 1/{0}")]
    PointNotOnGrid(u32),
    #[error("grid of resolution 1/{0} is disconnected")]
    ResolutionTooCoarse(u32),
    #[error("1-skeleton is not a tree")]
    NotATree,

    #[error("invalid probe configuration: {0}")]
    InvalidConfiguration(String),
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error("malformed input: {0}")]
    Parse(String),
}
