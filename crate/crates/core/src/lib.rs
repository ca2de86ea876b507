//! Exact convex geometry over rational polyhedral data, extended with
//! controlled non-convexity: closed polyhedra with finitely many relative
//! boundary cells carved out, and convex functions overridden on finitely
//! many boundary cells of their domains.
//!
//! Everything is computed in arbitrary-precision rational arithmetic and the
//! library favors certificates over trust: linear programs return Farkas
//! multipliers or improving rays, semidefiniteness checks return a violating
//! direction, and optimization reports carry exact witness points.

pub mod affine;
pub mod error;
pub mod fm;
pub mod funcs;
pub mod json;
pub mod kkt;
pub mod linalg;
pub mod lp;
pub mod opt;
pub mod oracle;
pub mod par;
pub mod plot;
pub mod qp;
pub mod repro;
pub mod rat;
pub mod sets;

pub use affine::{AffineForm, LinearConstraint, Relation};
pub use error::Error;
pub use funcs::{
    evaluate, fn_max, fn_sum, lsc_hull, subdiff, subdiff_lsc, ClosedDomain, ConvexBase, Domain,
    LscFunction, NCFunction, Override,
};
pub use lp::{lp_solve, lp_strict_feasible, LpOutcome, Sense, StrictOutcome};
pub use qp::{qp_solve, QpOutcome};
pub use rat::{ExtVal, Rat, RatVec};
pub use sets::{
    fg_cone, fg_equal, fg_member, fg_sum, intersect_carved, product, validate_carved, CarveIssue,
    CarveReport, CarvedPolyhedron, Cell, FGSet, FgWeights, Polyhedron,
};
