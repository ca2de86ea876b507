//! Nearly convex functions and their lower semicontinuous hulls.
//!
//! An `NCFunction` is a globally continuous convex base q (a maximum of
//! affine pieces or a PSD quadratic) restricted to a carved domain, with
//! optional value overrides on boundary cells. The override invariants keep
//! the epigraph squeezed between a convex set and its closure, so the
//! function stays nearly convex while being allowed to jump upward on
//! boundary cells or drop points from its domain there.
//!
//! The lsc hull is computable in closed form for this representation: drop
//! the overrides and close the domain. Subdifferentials come out as finitely
//! generated sets, with the convention that the subdifferential is empty at
//! finite-override points because the base value lies strictly below
//! arbitrarily nearby.

use num::Zero;

use crate::affine::{AffineForm, LinearConstraint, Relation};
use crate::error::Error;
use crate::linalg::{check_psd, mat_vec, quad_form};
use crate::lp::lp_strict_feasible;
use crate::rat::{dot, rat_int, vadd, zeros, ExtVal, Rat, RatVec};
use crate::sets::{fg_sum, CarvedPolyhedron, Cell, FGSet, Polyhedron};

/// A globally continuous convex base function.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexBase {
    /// q(x) = max_k (a_k·x + b_k); the piece list is nonempty.
    MaxAffine { pieces: Vec<AffineForm> },
    /// q(x) = xᵀQx + b·x + c with Q symmetric positive semidefinite.
    Quadratic { q: Vec<RatVec>, b: RatVec, c: Rat },
}

impl ConvexBase {
    pub fn max_affine(pieces: Vec<AffineForm>) -> Self {
        ConvexBase::MaxAffine { pieces }
    }

    pub fn quadratic(q: Vec<RatVec>, b: RatVec, c: Rat) -> Self {
        ConvexBase::Quadratic { q, b, c }
    }

    /// A single affine piece a·x + b.
    pub fn affine(coeffs: RatVec, constant: Rat) -> Self {
        ConvexBase::MaxAffine { pieces: vec![AffineForm::new(coeffs, constant)] }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBase::MaxAffine { pieces } => pieces.first().map_or(0, |p| p.dim()),
            ConvexBase::Quadratic { q, .. } => q.len(),
        }
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        match self {
            ConvexBase::MaxAffine { pieces } => {
                pieces.iter().map(|p| p.eval(x)).max().expect("nonempty pieces")
            }
            ConvexBase::Quadratic { q, b, c } => quad_form(q, x) + dot(b, x) + c,
        }
    }

    /// The subdifferential of the base alone: the convex hull of active
    /// piece gradients, or the gradient 2Qx + b.
    pub fn subdiff_at(&self, x: &[Rat]) -> FGSet {
        match self {
            ConvexBase::MaxAffine { pieces } => {
                let value = self.eval(x);
                let active: Vec<RatVec> = pieces
                    .iter()
                    .filter(|p| p.eval(x) == value)
                    .map(|p| p.coeffs.clone())
                    .collect();
                FGSet::new(x.len(), active, Vec::new()).expect("gradient dims match")
            }
            ConvexBase::Quadratic { q, b, .. } => {
                let two = rat_int(2);
                let grad = vadd(&crate::rat::vscale(&two, &mat_vec(q, x)), b);
                FGSet::point(grad)
            }
        }
    }

    fn validate(&self) -> Result<(), Error> {
        match self {
            ConvexBase::MaxAffine { pieces } => {
                if pieces.is_empty() {
                    return Err(Error::UnsupportedShape("a max-affine base needs at least one piece".into()));
                }
                let dim = pieces[0].dim();
                for p in pieces {
                    if p.dim() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
                    }
                }
                Ok(())
            }
            ConvexBase::Quadratic { q, b, .. } => {
                check_psd(q)?;
                if b.len() != q.len() {
                    return Err(Error::DimensionMismatch { expected: q.len(), found: b.len() });
                }
                Ok(())
            }
        }
    }
}

/// The domain a nearly convex function is restricted to.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Full { dim: usize },
    Carved(CarvedPolyhedron),
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Full { dim } => *dim,
            Domain::Carved(c) => c.dim(),
        }
    }

    pub fn member(&self, x: &[Rat]) -> Result<bool, Error> {
        match self {
            Domain::Full { dim } => {
                if x.len() != *dim {
                    return Err(Error::DimensionMismatch { expected: *dim, found: x.len() });
                }
                Ok(true)
            }
            Domain::Carved(c) => c.member(x),
        }
    }

    pub fn ri_member(&self, x: &[Rat]) -> Result<bool, Error> {
        match self {
            Domain::Full { dim } => {
                if x.len() != *dim {
                    return Err(Error::DimensionMismatch { expected: *dim, found: x.len() });
                }
                Ok(true)
            }
            Domain::Carved(c) => c.ri_member(x),
        }
    }

    pub fn ri_witness(&self) -> Result<RatVec, Error> {
        match self {
            Domain::Full { dim } => Ok(zeros(*dim)),
            Domain::Carved(c) => c.ri_witness(),
        }
    }

    /// Normal cone of the domain hull at x; {0} for the full space.
    pub fn hull_normal_cone(&self, x: &[Rat]) -> Result<FGSet, Error> {
        match self {
            Domain::Full { dim } => {
                if x.len() != *dim {
                    return Err(Error::DimensionMismatch { expected: *dim, found: x.len() });
                }
                Ok(FGSet::point(zeros(*dim)))
            }
            Domain::Carved(c) => {
                if !c.hull().member(x)? {
                    return Ok(FGSet::empty(c.dim()));
                }
                c.hull().normal_cone(x)
            }
        }
    }

    pub fn carved(&self) -> Option<&CarvedPolyhedron> {
        match self {
            Domain::Full { .. } => None,
            Domain::Carved(c) => Some(c),
        }
    }
}

/// One boundary override: on `cell` the function takes `value` instead of
/// the base. A finite value must strictly exceed the base on the cell; +∞
/// removes the cell from the effective domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Override {
    pub cell: Cell,
    pub value: ExtVal,
}

/// A nearly convex function: continuous convex base, carved domain,
/// boundary overrides.
#[derive(Clone, Debug, PartialEq)]
pub struct NCFunction {
    base: ConvexBase,
    domain: Domain,
    overrides: Vec<Override>,
}

impl NCFunction {
    pub fn new(base: ConvexBase, domain: Domain, overrides: Vec<Override>) -> Result<Self, Error> {
        base.validate()?;
        let dim = base.dim();
        if domain.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: domain.dim() });
        }
        if matches!(base, ConvexBase::Quadratic { .. }) && !overrides.is_empty() {
            return Err(Error::UnsupportedShape(
                "quadratic bases do not take boundary overrides".into(),
            ));
        }
        validate_overrides(&base, &domain, &overrides)?;
        Ok(Self { base, domain, overrides })
    }

    /// Base on the full space, no overrides.
    pub fn unrestricted(base: ConvexBase) -> Result<Self, Error> {
        let dim = base.dim();
        Self::new(base, Domain::Full { dim }, Vec::new())
    }

    pub fn base(&self) -> &ConvexBase {
        &self.base
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn overrides(&self) -> &[Override] {
        &self.overrides
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Override value at x first, then the base on the carved domain, then
    /// +∞ outside.
    pub fn evaluate(&self, x: &[Rat]) -> Result<ExtVal, Error> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        for ov in &self.overrides {
            if ov.cell.member(x)? {
                return Ok(ov.value.clone());
            }
        }
        if self.domain.member(x)? {
            return Ok(ExtVal::Finite(self.base.eval(x)));
        }
        Ok(ExtVal::PlusInf)
    }

    /// Whether x belongs to the effective domain {f < +∞}.
    pub fn in_dom(&self, x: &[Rat]) -> Result<bool, Error> {
        Ok(self.evaluate(x)?.is_finite())
    }

    /// A point of ri(dom f), which equals ri of the domain hull.
    pub fn domain_ri_witness(&self) -> Result<RatVec, Error> {
        self.domain.ri_witness()
    }

    pub fn is_in_ri_dom(&self, x: &[Rat]) -> Result<bool, Error> {
        self.domain.ri_member(x)
    }

    /// The lsc hull: overrides dropped, domain closed. The result is proper
    /// because ri of the domain hull always survives into dom f.
    pub fn lsc_hull(&self) -> LscFunction {
        let domain = match &self.domain {
            Domain::Full { dim } => ClosedDomain::Full { dim: *dim },
            Domain::Carved(c) => ClosedDomain::Poly(c.closure().clone()),
        };
        LscFunction { base: self.base.clone(), domain }
    }

    /// Subdifferential at x̄: empty on finite-override cells, otherwise
    /// ∂q(x̄) + N(x̄; domain hull).
    pub fn subdiff(&self, x: &[Rat]) -> Result<FGSet, Error> {
        match self.evaluate(x)? {
            ExtVal::PlusInf => Err(Error::PointNotInDomain),
            ExtVal::Finite(_) => {
                for ov in &self.overrides {
                    if ov.cell.member(x)? {
                        return Ok(FGSet::empty(self.dim()));
                    }
                }
                fg_sum(&self.base.subdiff_at(x), &self.domain.hull_normal_cone(x)?)
            }
        }
    }
}

/// Lower semicontinuous hull: the same base on the closed domain.
#[derive(Clone, Debug, PartialEq)]
pub enum ClosedDomain {
    Full { dim: usize },
    Poly(Polyhedron),
}

impl ClosedDomain {
    pub fn dim(&self) -> usize {
        match self {
            ClosedDomain::Full { dim } => *dim,
            ClosedDomain::Poly(p) => p.dim(),
        }
    }

    pub fn member(&self, x: &[Rat]) -> Result<bool, Error> {
        match self {
            ClosedDomain::Full { dim } => {
                if x.len() != *dim {
                    return Err(Error::DimensionMismatch { expected: *dim, found: x.len() });
                }
                Ok(true)
            }
            ClosedDomain::Poly(p) => p.member(x),
        }
    }

    pub fn polyhedron(&self) -> Option<&Polyhedron> {
        match self {
            ClosedDomain::Full { .. } => None,
            ClosedDomain::Poly(p) => Some(p),
        }
    }
}

/// A proper lsc convex function: continuous convex base on a closed convex
/// polyhedral domain.
#[derive(Clone, Debug, PartialEq)]
pub struct LscFunction {
    base: ConvexBase,
    domain: ClosedDomain,
}

impl LscFunction {
    pub fn new(base: ConvexBase, domain: ClosedDomain) -> Result<Self, Error> {
        base.validate()?;
        if domain.dim() != base.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), found: domain.dim() });
        }
        Ok(Self { base, domain })
    }

    pub fn base(&self) -> &ConvexBase {
        &self.base
    }

    pub fn domain(&self) -> &ClosedDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn evaluate(&self, x: &[Rat]) -> Result<ExtVal, Error> {
        if self.domain.member(x)? {
            Ok(ExtVal::Finite(self.base.eval(x)))
        } else {
            Ok(ExtVal::PlusInf)
        }
    }

    /// ∂q(x̄) + N(x̄; domain polyhedron).
    pub fn subdiff(&self, x: &[Rat]) -> Result<FGSet, Error> {
        if !self.domain.member(x)? {
            return Err(Error::PointNotInDomain);
        }
        let cone = match &self.domain {
            ClosedDomain::Full { dim } => FGSet::point(zeros(*dim)),
            ClosedDomain::Poly(p) => p.normal_cone(x)?,
        };
        fg_sum(&self.base.subdiff_at(x), &cone)
    }

    /// Whether the function is continuous at x: everywhere for a full
    /// domain, and at topological-interior points of a polyhedral one.
    pub fn continuous_at(&self, x: &[Rat]) -> Result<bool, Error> {
        match &self.domain {
            ClosedDomain::Full { dim } => {
                if x.len() != *dim {
                    return Err(Error::DimensionMismatch { expected: *dim, found: x.len() });
                }
                Ok(true)
            }
            ClosedDomain::Poly(p) => {
                if x.len() != p.dim() {
                    return Err(Error::DimensionMismatch { expected: p.dim(), found: x.len() });
                }
                Ok(p.rows().iter().all(|row| match row.rel {
                    Relation::Eq => false,
                    _ => row.form.eval(x) < Rat::zero(),
                }))
            }
        }
    }
}

/// Alias for the module-level operation names.
pub fn evaluate(f: &NCFunction, x: &[Rat]) -> Result<ExtVal, Error> {
    f.evaluate(x)
}

pub fn lsc_hull(f: &NCFunction) -> LscFunction {
    f.lsc_hull()
}

pub fn subdiff(f: &NCFunction, x: &[Rat]) -> Result<FGSet, Error> {
    f.subdiff(x)
}

pub fn subdiff_lsc(f: &LscFunction, x: &[Rat]) -> Result<FGSet, Error> {
    f.subdiff(x)
}

/// Pointwise sum of two override-free functions of the same base kind.
/// Requires ri(dom f1) ∩ ri(dom f2) ≠ ∅ so the domains intersect cleanly.
pub fn fn_sum(f1: &NCFunction, f2: &NCFunction) -> Result<NCFunction, Error> {
    if f1.dim() != f2.dim() {
        return Err(Error::DimensionMismatch { expected: f1.dim(), found: f2.dim() });
    }
    if !f1.overrides.is_empty() || !f2.overrides.is_empty() {
        return Err(Error::HasOverrides);
    }
    let base = match (&f1.base, &f2.base) {
        (ConvexBase::MaxAffine { pieces: p1 }, ConvexBase::MaxAffine { pieces: p2 }) => {
            let mut pieces = Vec::with_capacity(p1.len() * p2.len());
            for a in p1 {
                for b in p2 {
                    let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
                    pieces.push(AffineForm::new(coeffs, &a.constant + &b.constant));
                }
            }
            ConvexBase::MaxAffine { pieces }
        }
        (
            ConvexBase::Quadratic { q: q1, b: b1, c: c1 },
            ConvexBase::Quadratic { q: q2, b: b2, c: c2 },
        ) => {
            let q = q1
                .iter()
                .zip(q2)
                .map(|(r1, r2)| r1.iter().zip(r2).map(|(x, y)| x + y).collect())
                .collect();
            ConvexBase::Quadratic { q, b: vadd(b1, b2), c: c1 + c2 }
        }
        _ => return Err(Error::KindMismatch),
    };
    let domain = match (&f1.domain, &f2.domain) {
        (Domain::Full { dim }, Domain::Full { .. }) => Domain::Full { dim: *dim },
        (Domain::Full { .. }, Domain::Carved(c)) | (Domain::Carved(c), Domain::Full { .. }) => {
            Domain::Carved(c.clone())
        }
        (Domain::Carved(a), Domain::Carved(b)) => Domain::Carved(crate::sets::intersect_carved(a, b)?),
    };
    NCFunction::new(base, domain, Vec::new())
}

/// Pointwise maximum of override-free max-affine functions on the full
/// space: piece lists concatenate.
pub fn fn_max(fs: &[NCFunction]) -> Result<NCFunction, Error> {
    if fs.is_empty() {
        return Err(Error::UnsupportedShape("max of an empty family".into()));
    }
    let dim = fs[0].dim();
    let mut pieces = Vec::new();
    for f in fs {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: f.dim() });
        }
        if !f.overrides.is_empty() || !matches!(f.domain, Domain::Full { .. }) {
            return Err(Error::UnsupportedShape(
                "max needs full-space functions without overrides".into(),
            ));
        }
        match &f.base {
            ConvexBase::MaxAffine { pieces: ps } => pieces.extend(ps.iter().cloned()),
            ConvexBase::Quadratic { .. } => {
                return Err(Error::UnsupportedShape("max of quadratic bases".into()))
            }
        }
    }
    NCFunction::new(ConvexBase::MaxAffine { pieces }, Domain::Full { dim }, Vec::new())
}

fn validate_overrides(
    base: &ConvexBase,
    domain: &Domain,
    overrides: &[Override],
) -> Result<(), Error> {
    if overrides.is_empty() {
        return Ok(());
    }
    let dim = base.dim();
    let carved = match domain {
        Domain::Full { .. } => {
            for (i, ov) in overrides.iter().enumerate() {
                if !ov.cell.is_empty_set()? {
                    return Err(Error::OverrideNotOnBoundary { index: i });
                }
            }
            return Ok(());
        }
        Domain::Carved(c) => c,
    };
    let hull = carved.hull();
    let mut vacuous = vec![false; overrides.len()];
    for (i, ov) in overrides.iter().enumerate() {
        if ov.cell.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: ov.cell.dim() });
        }
        let mut meet_hull = ov.cell.rows().to_vec();
        meet_hull.extend_from_slice(hull.rows());
        if !lp_strict_feasible(dim, &meet_hull)?.is_feasible() {
            vacuous[i] = true;
            continue;
        }
        for hrow in hull.rows() {
            let violated = match hrow.rel {
                Relation::Le => vec![LinearConstraint::new(hrow.form.negated(), Relation::Lt)],
                Relation::Eq => vec![
                    LinearConstraint::new(hrow.form.negated(), Relation::Lt),
                    LinearConstraint::new(hrow.form.clone(), Relation::Lt),
                ],
                Relation::Lt => unreachable!("hulls have no strict rows"),
            };
            for v in violated {
                let mut sys = ov.cell.rows().to_vec();
                sys.push(v);
                if lp_strict_feasible(dim, &sys)?.is_feasible() {
                    return Err(Error::OverrideOutsideHull { index: i });
                }
            }
        }
        let mut meet_ri = ov.cell.rows().to_vec();
        meet_ri.extend_from_slice(hull.ri_rows());
        if lp_strict_feasible(dim, &meet_ri)?.is_feasible() {
            return Err(Error::OverrideNotOnBoundary { index: i });
        }
        for (j, removed) in carved.removed().iter().enumerate() {
            let mut sys = ov.cell.rows().to_vec();
            sys.extend_from_slice(removed.rows());
            if lp_strict_feasible(dim, &sys)?.is_feasible() {
                return Err(Error::OverrideMeetsRemoved { index: i, removed: j });
            }
        }
        if let ExtVal::Finite(v) = &ov.value {
            let pieces = match base {
                ConvexBase::MaxAffine { pieces } => pieces,
                ConvexBase::Quadratic { .. } => unreachable!("quadratic overrides rejected earlier"),
            };
            for piece in pieces {
                // Infeasibility of {x ∈ cell, piece(x) ≥ v} for every piece
                // means q < v everywhere on the cell.
                let reach = LinearConstraint::new(
                    AffineForm::new(piece.coeffs.iter().map(|c| -c).collect(), v - &piece.constant),
                    Relation::Le,
                );
                let mut sys = ov.cell.rows().to_vec();
                sys.push(reach);
                if lp_strict_feasible(dim, &sys)?.is_feasible() {
                    return Err(Error::OverrideNotAboveBase { index: i });
                }
            }
        }
    }
    for i in 0..overrides.len() {
        for j in (i + 1)..overrides.len() {
            if vacuous[i] || vacuous[j] {
                continue;
            }
            let mut sys = overrides[i].cell.rows().to_vec();
            sys.extend_from_slice(overrides[j].cell.rows());
            if lp_strict_feasible(dim, &sys)?.is_feasible() {
                return Err(Error::OverridesOverlap { first: i, second: j });
            }
        }
    }
    Ok(())
}
