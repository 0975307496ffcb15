//! Exact-arithmetic toolkit for two-party convex set disjointness.
//!
//! Everything here runs over exact rationals: the geometry primitives
//! (`geom`), the Caratheodory-type procedures and bottom-vertex
//! triangulation (`caratheodory`), the halfspace container machinery
//! (`containers`), the deterministic two-party protocols (`protocols`),
//! and the hard-instance generators (`hardness`).
//!
//! All public types are immutable after construction and all operations
//! are pure functions, so everything is safe to call from concurrent
//! contexts.

pub(crate) mod bitset;
pub(crate) mod linalg;

pub mod caratheodory;
pub mod containers;
pub mod formats;
pub mod geom;
pub mod hardness;
pub mod protocols;
pub mod scalar;

pub use scalar::Scalar;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty input set")]
    EmptySet,
    #[error("halfspace normal must not be the zero vector")]
    ZeroNormal,
    #[error("duplicate point in domain at index {0}")]
    DuplicatePoint(usize),
    #[error("point index {index} out of range for domain of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("polytope is empty")]
    EmptyPolytope,
    #[error("polytope is unbounded")]
    UnboundedPolytope,
    #[error("point is not inside the polytope")]
    PointNotInPolytope,
    #[error("point is not in the convex hull")]
    NotInHull,
    #[error("convex hulls are disjoint")]
    DisjointHulls,
    #[error("invalid constraint sequence: tightening produced an empty face")]
    InvalidSequence,
    #[error("malformed container code: {0}")]
    MalformedCode(String),
    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),
    #[error("epsilon must satisfy 0 < eps <= 1")]
    EpsilonOutOfRange,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("bit vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("lift block index {index} out of range 1..={blocks}")]
    LiftIndexOutOfRange { index: usize, blocks: usize },
    #[error("sample assigns both labels to point {0}")]
    ContradictorySample(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
