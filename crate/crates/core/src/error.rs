//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown type label `{0}`")]
    BadTypeLabel(String),
    #[error("rank {rank} out of range for series {series}")]
    RankOutOfRange { series: char, rank: usize },
    #[error("node {node} lies outside the queried support")]
    NodeOutsideSupport { node: usize },
    #[error("unrecognized Dynkin sub-diagram")]
    UnrecognizedDiagram,
    #[error("simple component rank {rank} exceeds the configured cap {cap}")]
    ComponentCapExceeded { rank: usize, cap: usize },
    #[error("total rank {rank} exceeds the configured cap {cap}")]
    RankCapExceeded { rank: usize, cap: usize },
    #[error("algebra consistency check failed: {0}")]
    InternalConsistency(String),
    #[error("operands belong to different ambient algebras")]
    AlgebraMismatch,
    #[error("element is not nilpotent: adjoint series did not terminate")]
    NotNilpotent,
    #[error("pair is not admissible: {0}")]
    NotAdmissible(String),
    #[error("malformed datum: {0}")]
    BadDatum(String),
    #[error("closures assign conflicting roles to a shared root: {0}")]
    ConflictingClosures(String),
    #[error("no sign vector achieves bracket closure")]
    NoClosingSigns,
    #[error("input is not of standardly embedded solvable form: {0}")]
    NotStandardForm(String),
    #[error("transformation precondition failed: {0}")]
    TransformNotApplicable(String),
    #[error("orbit size exceeded the configured bound {0}")]
    OrbitBoundExceeded(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
