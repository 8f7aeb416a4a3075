use thiserror::Error;

use crate::groups::GroupId;
use crate::scalars::Field;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: Field, right: Field },

    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    Shape {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("singular matrix: pivot magnitude {pivot:.3e} below threshold {threshold:.3e}")]
    Singular { pivot: f64, threshold: f64 },

    #[error("{group} expects a torus angle vector of length {expected}, got {got}")]
    Rank {
        group: GroupId,
        expected: usize,
        got: usize,
    },

    #[error("operation requires a {expected} group, got {group}")]
    WrongKind {
        group: GroupId,
        expected: &'static str,
    },

    #[error("unsupported embedding {src} -> {dst}")]
    UnsupportedEmbedding { src: GroupId, dst: GroupId },

    #[error("matrix is not a member of {group} (residual {residual:.3e})")]
    NotMember { group: GroupId, residual: f64 },

    #[error("tangent vector is not tangent to {group} (residual {residual:.3e})")]
    NotTangent { group: GroupId, residual: f64 },

    #[error("quadrature needs at least one sample")]
    EmptyQuadrature,

    #[error("basis is rank deficient: {rank} < {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("metric tensor is not positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
