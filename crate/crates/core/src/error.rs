//! Crate-wide error type.
//!
//! Refutations are not errors: an optimality check that fails cleanly returns
//! a report saying so. Errors are reserved for malformed inputs, violated
//! preconditions, and shapes the exact machinery does not cover.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot parse rational literal {0:?}")]
    ParseRational(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} cap exceeded: limit {limit}, found {found}")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        found: usize,
    },

    #[error("polyhedron is empty")]
    EmptyPolyhedron,

    #[error("strict relation not allowed here (only cells may use lt)")]
    StrictRelationNotAllowed,

    #[error("linear constraints only: quadratic data has no polyhedral epigraph")]
    QuadraticNotLinear,

    #[error("removed cell {index} is not contained in the hull")]
    CellOutsideHull { index: usize },

    #[error("removed cell {index} meets the relative interior of the hull")]
    CellMeetsInterior { index: usize },

    #[error("removed cells {first} and {second} overlap")]
    CellsOverlap { first: usize, second: usize },

    #[error("override cell {index} is not contained in the hull")]
    OverrideOutsideHull { index: usize },

    #[error("override cell {index} meets the relative interior of the domain hull")]
    OverrideNotOnBoundary { index: usize },

    #[error("override cell {index} overlaps removed cell {removed}")]
    OverrideMeetsRemoved { index: usize, removed: usize },

    #[error("override cells {first} and {second} overlap")]
    OverridesOverlap { first: usize, second: usize },

    #[error("override value on cell {index} does not strictly exceed the base there")]
    OverrideNotAboveBase { index: usize },

    #[error("quadratic form is not positive semidefinite (witness direction {direction:?})")]
    NotPsd { direction: Vec<String> },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("function kinds do not match (maxaffine vs quadratic)")]
    KindMismatch,

    #[error("operation requires override-free functions")]
    HasOverrides,

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("point is not in the function's domain")]
    PointNotInDomain,

    #[error("point is not in the set")]
    PointNotFeasible,

    #[error("segment endpoint {which} is not a member of the set")]
    EndpointNotInSet { which: &'static str },

    #[error("a quadratic functional constraint requires an explicit interior-point hint")]
    QuadraticNeedsHint,

    #[error("quadratic functional constraints admit certification only: {0}")]
    QuadraticConstraintUnsolved(String),

    #[error("active-set enumeration cap exceeded ({subsets} subsets)")]
    ActiveSetCapExceeded { subsets: u64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("json: {0}")]
    Json(String),

    #[error("internal invariant breached: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors that signal a violated mathematical hypothesis rather
    /// than malformed input. The CLI maps these to their own exit code.
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(
            self,
            Error::HypothesisViolated(_)
                | Error::QuadraticNeedsHint
                | Error::PointNotInDomain
                | Error::PointNotFeasible
                | Error::EndpointNotInSet { .. }
        )
    }
}
