//! Polyhedra, boundary-carved polyhedra, and finitely generated convex sets.
//!
//! A `CarvedPolyhedron` is a closed polyhedron P with finitely many convex
//! cells removed from its relative boundary. Removing boundary cells keeps
//! ri P inside the set, so ri P ⊂ Ω ⊂ P holds by construction and every
//! operation that only depends on the closure or the relative interior can
//! work on P directly. `FGSet` is the dual workhorse: conv(V) + cone(R)
//! with exact LP membership, used for normal cones and subdifferentials.

use std::fmt;
use std::sync::OnceLock;

use num::Zero;

use crate::affine::{check_dims, AffineForm, LinearConstraint, Relation};
use crate::error::Error;
use crate::lp::{lp_solve, lp_strict_feasible, LpOutcome, Sense};
use crate::rat::{rat_int, vadd, zeros, Rat, RatVec};

/// Ambient dimension cap for publicly constructed sets.
pub const MAX_DIMENSION: usize = 6;
/// Constraint-row cap per publicly constructed system.
pub const MAX_CONSTRAINTS: usize = 32;
/// Removed-cell cap per carved polyhedron.
pub const MAX_CELLS: usize = 32;

fn check_caps(dim: usize, nrows: usize) -> Result<(), Error> {
    if dim > MAX_DIMENSION {
        return Err(Error::CapExceeded { what: "dimension", limit: MAX_DIMENSION, found: dim });
    }
    if nrows > MAX_CONSTRAINTS {
        return Err(Error::CapExceeded {
            what: "constraint rows",
            limit: MAX_CONSTRAINTS,
            found: nrows,
        });
    }
    Ok(())
}

/// Decides whether `rows` forces `row` to hold everywhere. An infeasible
/// system implies anything.
pub fn rows_imply_row(rows: &[LinearConstraint], row: &LinearConstraint) -> Result<bool, Error> {
    row.require_rel(&[Relation::Le, Relation::Eq])?;
    let max_at_most_zero = |obj: &AffineForm| -> Result<bool, Error> {
        Ok(match lp_solve(Sense::Maximize, obj, rows)? {
            LpOutcome::Optimal { value, .. } => value <= Rat::zero(),
            LpOutcome::Infeasible { .. } => true,
            LpOutcome::Unbounded { .. } => false,
        })
    };
    match row.rel {
        Relation::Le => max_at_most_zero(&row.form),
        Relation::Eq => Ok(max_at_most_zero(&row.form)? && max_at_most_zero(&row.form.negated())?),
        Relation::Lt => unreachable!("require_rel rejected lt"),
    }
}

/// A nonempty closed polyhedron {x : a_i·x ≤ b_i, c_j·x = d_j}.
///
/// Implicit equalities among the inequality rows are detected at
/// construction, which pins down the relative interior exactly.
#[derive(Clone, Debug)]
pub struct Polyhedron {
    dim: usize,
    rows: Vec<LinearConstraint>,
    implicit_le: Vec<usize>,
    ri_rows: Vec<LinearConstraint>,
    ri_witness_cache: OnceLock<RatVec>,
}

impl PartialEq for Polyhedron {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rows == other.rows
    }
}
impl Eq for Polyhedron {}

impl Polyhedron {
    pub fn new(dim: usize, rows: Vec<LinearConstraint>) -> Result<Self, Error> {
        check_caps(dim, rows.len())?;
        check_dims(&rows, dim)?;
        for r in &rows {
            r.require_rel(&[Relation::Le, Relation::Eq])?;
        }
        if !lp_strict_feasible(dim, &rows)?.is_feasible() {
            return Err(Error::EmptyPolyhedron);
        }
        let mut implicit_le = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.rel != Relation::Le {
                continue;
            }
            let mut probe: Vec<LinearConstraint> = rows.clone();
            probe[i] = LinearConstraint::new(row.form.clone(), Relation::Lt);
            if !lp_strict_feasible(dim, &probe)?.is_feasible() {
                implicit_le.push(i);
            }
        }
        let ri_rows = rows
            .iter()
            .enumerate()
            .map(|(i, row)| match row.rel {
                Relation::Eq => row.clone(),
                Relation::Le if implicit_le.contains(&i) => {
                    LinearConstraint::new(row.form.clone(), Relation::Eq)
                }
                Relation::Le => LinearConstraint::new(row.form.clone(), Relation::Lt),
                Relation::Lt => unreachable!("constructor rejected lt"),
            })
            .collect();
        Ok(Self { dim, rows, implicit_le, ri_rows, ri_witness_cache: OnceLock::new() })
    }

    /// Axis-aligned box given by per-coordinate closed bounds.
    pub fn boxed(bounds: &[(Rat, Rat)]) -> Result<Self, Error> {
        let dim = bounds.len();
        let mut rows = Vec::with_capacity(2 * dim);
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            let mut up = zeros(dim);
            up[i] = rat_int(1);
            rows.push(LinearConstraint::le(up, hi.clone()));
            let mut down = zeros(dim);
            down[i] = rat_int(-1);
            rows.push(LinearConstraint::le(down, -lo));
        }
        Self::new(dim, rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[LinearConstraint] {
        &self.rows
    }

    /// Indices of inequality rows that hold with equality everywhere on the
    /// polyhedron.
    pub fn implicit_equalities(&self) -> &[usize] {
        &self.implicit_le
    }

    /// Constraint system describing ri P: implicit and explicit equalities
    /// stay equalities, every other inequality becomes strict.
    pub fn ri_rows(&self) -> &[LinearConstraint] {
        &self.ri_rows
    }

    pub fn member(&self, x: &[Rat]) -> Result<bool, Error> {
        self.check_point(x)?;
        Ok(self.rows.iter().all(|r| r.holds_at(x)))
    }

    pub fn ri_member(&self, x: &[Rat]) -> Result<bool, Error> {
        self.check_point(x)?;
        Ok(self.ri_rows.iter().all(|r| r.holds_at(x)))
    }

    /// Some point of ri P, which is nonempty because P is.
    pub fn ri_witness(&self) -> Result<RatVec, Error> {
        if let Some(w) = self.ri_witness_cache.get() {
            return Ok(w.clone());
        }
        let point = match lp_strict_feasible(self.dim, &self.ri_rows)? {
            crate::lp::StrictOutcome::Feasible { point, .. } => point,
            crate::lp::StrictOutcome::Infeasible { .. } => {
                return Err(Error::Internal("relative interior of a nonempty polyhedron is empty".into()))
            }
        };
        let _ = self.ri_witness_cache.set(point.clone());
        Ok(point)
    }

    /// Normal cone at x̄: the cone of outward normals of rows active at x̄,
    /// with equality rows contributing both signs. Empty when x̄ ∉ P.
    pub fn normal_cone(&self, x: &[Rat]) -> Result<FGSet, Error> {
        self.check_point(x)?;
        if !self.member(x)? {
            return Ok(FGSet::empty(self.dim));
        }
        let mut rays = Vec::new();
        for row in &self.rows {
            if !row.form.eval(x).is_zero() {
                continue;
            }
            rays.push(row.form.coeffs.clone());
            if row.rel == Relation::Eq {
                rays.push(row.form.negated().coeffs);
            }
        }
        FGSet::new(self.dim, vec![zeros(self.dim)], rays)
    }

    /// Same point set as `other`, decided by mutual row implication.
    pub fn equivalent(&self, other: &Polyhedron) -> Result<bool, Error> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        for row in &other.rows {
            if !rows_imply_row(&self.rows, row)? {
                return Ok(false);
            }
        }
        for row in &self.rows {
            if !rows_imply_row(&other.rows, row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_point(&self, x: &[Rat]) -> Result<(), Error> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(())
    }
}

/// Indices of inequality rows of `p` that are implicit equalities.
pub fn detect_implicit_equalities(p: &Polyhedron) -> &[usize] {
    p.implicit_equalities()
}

/// A convex cell that may use strict inequalities; possibly empty,
/// possibly relatively open. Used for removed boundary pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    dim: usize,
    rows: Vec<LinearConstraint>,
}

impl Cell {
    pub fn new(dim: usize, rows: Vec<LinearConstraint>) -> Result<Self, Error> {
        check_caps(dim, rows.len())?;
        check_dims(&rows, dim)?;
        Ok(Self { dim, rows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[LinearConstraint] {
        &self.rows
    }

    pub fn member(&self, x: &[Rat]) -> Result<bool, Error> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(self.rows.iter().all(|r| r.holds_at(x)))
    }

    pub fn is_empty_set(&self) -> Result<bool, Error> {
        Ok(!lp_strict_feasible(self.dim, &self.rows)?.is_feasible())
    }

    fn with_extra_rows(&self, extra: &[LinearConstraint]) -> Result<Self, Error> {
        let mut rows = self.rows.clone();
        for r in extra {
            if !rows.contains(r) {
                rows.push(r.clone());
            }
        }
        Cell::new(self.dim, rows)
    }

    fn lifted(&self, left_pad: usize, total: usize) -> Result<Self, Error> {
        let rows = self.rows.iter().map(|r| lift_row(r, left_pad, total)).collect();
        Cell::new(total, rows)
    }
}

fn lift_row(row: &LinearConstraint, left_pad: usize, total: usize) -> LinearConstraint {
    let mut coeffs = zeros(total);
    for (i, c) in row.form.coeffs.iter().enumerate() {
        coeffs[left_pad + i] = c.clone();
    }
    LinearConstraint::new(AffineForm::new(coeffs, row.form.constant.clone()), row.rel)
}

/// Negations of one row, as the disjoint pieces of its complement. An
/// inequality yields one piece, an equality yields the two open sides.
fn violated_pieces(row: &LinearConstraint) -> Vec<LinearConstraint> {
    match row.rel {
        Relation::Le => vec![LinearConstraint::new(row.form.negated(), Relation::Lt)],
        Relation::Lt => vec![LinearConstraint::new(row.form.negated(), Relation::Le)],
        Relation::Eq => vec![
            LinearConstraint::new(row.form.negated(), Relation::Lt),
            LinearConstraint::new(row.form.clone(), Relation::Lt),
        ],
    }
}

/// Splits `minuend ∖ subtrahend` into pairwise disjoint convex cells by the
/// first-violated-row decomposition; empty pieces are dropped.
pub fn cell_subtract(minuend: &Cell, subtrahend: &Cell) -> Result<Vec<Cell>, Error> {
    if minuend.dim != subtrahend.dim {
        return Err(Error::DimensionMismatch { expected: minuend.dim, found: subtrahend.dim });
    }
    let mut pieces = Vec::new();
    let mut prefix: Vec<LinearConstraint> = Vec::new();
    for row in &subtrahend.rows {
        for violated in violated_pieces(row) {
            let mut rows = prefix.clone();
            rows.push(violated);
            let piece = minuend.with_extra_rows(&rows)?;
            if !piece.is_empty_set()? {
                pieces.push(piece);
            }
        }
        prefix.push(row.clone());
    }
    Ok(pieces)
}

/// Rewrites a cell list so the cells are pairwise disjoint without changing
/// their union: each cell is replaced by its part not covered by earlier
/// cells. Cells that end up empty disappear.
fn disjointify(cells: Vec<Cell>) -> Result<Vec<Cell>, Error> {
    let mut out: Vec<Cell> = Vec::new();
    for (i, cell) in cells.iter().enumerate() {
        let mut pieces = vec![cell.clone()];
        for prior in &cells[..i] {
            let mut next = Vec::new();
            for piece in &pieces {
                next.extend(cell_subtract(piece, prior)?);
            }
            pieces = next;
        }
        out.extend(pieces);
    }
    out.retain(|c| !matches!(c.is_empty_set(), Ok(true)));
    Ok(out)
}

/// One diagnostic finding of `validate_carved`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CarveIssue {
    /// The cell does not meet the hull at all; removing it changes nothing.
    VacuousRemoval { cell: usize },
    /// The cell has points outside the hull.
    OutsideHull { cell: usize },
    /// The cell has points in the relative interior of the hull.
    MeetsInterior { cell: usize },
    /// Two removed cells share a point.
    Overlap { first: usize, second: usize },
}

impl CarveIssue {
    pub fn is_warning(&self) -> bool {
        matches!(self, CarveIssue::VacuousRemoval { .. })
    }
}

impl fmt::Display for CarveIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CarveIssue::VacuousRemoval { cell } => {
                write!(f, "warning: cell {cell} does not meet the hull (vacuous removal)")
            }
            CarveIssue::OutsideHull { cell } => {
                write!(f, "violation: cell {cell} is not contained in the hull")
            }
            CarveIssue::MeetsInterior { cell } => {
                write!(f, "violation: cell {cell} meets the relative interior of the hull")
            }
            CarveIssue::Overlap { first, second } => {
                write!(f, "violation: cells {first} and {second} overlap")
            }
        }
    }
}

/// Validation report for a hull plus removed-cell list.
#[derive(Clone, Debug, Default)]
pub struct CarveReport {
    pub issues: Vec<CarveIssue>,
}

impl CarveReport {
    /// True when every issue is at most a warning.
    pub fn is_valid(&self) -> bool {
        self.issues.iter().all(|i| i.is_warning())
    }
}

/// Checks the carving invariants by LP and reports every finding instead of
/// stopping at the first.
pub fn validate_carved(hull: &Polyhedron, cells: &[Cell]) -> Result<CarveReport, Error> {
    let dim = hull.dim();
    let mut report = CarveReport::default();
    let mut vacuous = vec![false; cells.len()];
    for (ci, cell) in cells.iter().enumerate() {
        if cell.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: cell.dim() });
        }
        let mut meet_hull = cell.rows().to_vec();
        meet_hull.extend_from_slice(hull.rows());
        if !lp_strict_feasible(dim, &meet_hull)?.is_feasible() {
            vacuous[ci] = true;
            report.issues.push(CarveIssue::VacuousRemoval { cell: ci });
            continue;
        }
        let escapes = hull.rows().iter().try_fold(false, |acc, hrow| {
            if acc {
                return Ok::<bool, Error>(true);
            }
            for piece in violated_pieces(hrow) {
                let mut sys = cell.rows().to_vec();
                sys.push(piece);
                if lp_strict_feasible(dim, &sys)?.is_feasible() {
                    return Ok(true);
                }
            }
            Ok(false)
        })?;
        if escapes {
            report.issues.push(CarveIssue::OutsideHull { cell: ci });
        }
        let mut meet_ri = cell.rows().to_vec();
        meet_ri.extend_from_slice(hull.ri_rows());
        if lp_strict_feasible(dim, &meet_ri)?.is_feasible() {
            report.issues.push(CarveIssue::MeetsInterior { cell: ci });
        }
    }
    for i in 0..cells.len() {
        for j in (i + 1)..cells.len() {
            if vacuous[i] || vacuous[j] {
                continue;
            }
            let mut sys = cells[i].rows().to_vec();
            sys.extend_from_slice(cells[j].rows());
            if lp_strict_feasible(dim, &sys)?.is_feasible() {
                report.issues.push(CarveIssue::Overlap { first: i, second: j });
            }
        }
    }
    Ok(report)
}

/// A closed polyhedron with pairwise disjoint convex cells removed from its
/// relative boundary: Ω = P ∖ ⋃ R_j with ri P ⊂ Ω ⊂ P.
#[derive(Clone, Debug, PartialEq)]
pub struct CarvedPolyhedron {
    hull: Polyhedron,
    removed: Vec<Cell>,
}

impl CarvedPolyhedron {
    pub fn new(hull: Polyhedron, removed: Vec<Cell>) -> Result<Self, Error> {
        if removed.len() > MAX_CELLS {
            return Err(Error::CapExceeded {
                what: "removed cells",
                limit: MAX_CELLS,
                found: removed.len(),
            });
        }
        let report = validate_carved(&hull, &removed)?;
        for issue in &report.issues {
            match *issue {
                CarveIssue::VacuousRemoval { .. } => {}
                CarveIssue::OutsideHull { cell } => return Err(Error::CellOutsideHull { index: cell }),
                CarveIssue::MeetsInterior { cell } => {
                    return Err(Error::CellMeetsInterior { index: cell })
                }
                CarveIssue::Overlap { first, second } => {
                    return Err(Error::CellsOverlap { first, second })
                }
            }
        }
        Ok(Self { hull, removed })
    }

    pub fn from_polyhedron(hull: Polyhedron) -> Self {
        Self { hull, removed: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.hull.dim()
    }

    pub fn hull(&self) -> &Polyhedron {
        &self.hull
    }

    pub fn removed(&self) -> &[Cell] {
        &self.removed
    }

    /// The closure of the set, which is exactly the hull.
    pub fn closure(&self) -> &Polyhedron {
        &self.hull
    }

    pub fn member(&self, x: &[Rat]) -> Result<bool, Error> {
        if !self.hull.member(x)? {
            return Ok(false);
        }
        for cell in &self.removed {
            if cell.member(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Membership in ri Ω, which equals ri of the hull.
    pub fn ri_member(&self, x: &[Rat]) -> Result<bool, Error> {
        self.hull.ri_member(x)
    }

    /// A point of ri Ω; it always avoids the removed cells.
    pub fn ri_witness(&self) -> Result<RatVec, Error> {
        self.hull.ri_witness()
    }

    /// Normal cone at x̄, computed on the hull; empty when x̄ ∉ Ω.
    pub fn normal_cone(&self, x: &[Rat]) -> Result<FGSet, Error> {
        if !self.member(x)? {
            return Ok(FGSet::empty(self.dim()));
        }
        self.hull.normal_cone(x)
    }

    pub fn validate(&self) -> Result<CarveReport, Error> {
        validate_carved(&self.hull, &self.removed)
    }
}

/// Intersection of two carved polyhedra. Requires ri P1 ∩ ri P2 ≠ ∅, which
/// makes ri(P1∩P2) = ri P1 ∩ ri P2 and keeps the carving invariants intact.
pub fn intersect_carved(
    a: &CarvedPolyhedron,
    b: &CarvedPolyhedron,
) -> Result<CarvedPolyhedron, Error> {
    let dim = a.dim();
    if b.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: b.dim() });
    }
    let mut overlap_probe = a.hull().ri_rows().to_vec();
    overlap_probe.extend_from_slice(b.hull().ri_rows());
    if !lp_strict_feasible(dim, &overlap_probe)?.is_feasible() {
        return Err(Error::HypothesisViolated(
            "relative interiors of the hulls do not intersect".into(),
        ));
    }
    let mut hull_rows = a.hull().rows().to_vec();
    for r in b.hull().rows() {
        if !hull_rows.contains(r) {
            hull_rows.push(r.clone());
        }
    }
    let hull = Polyhedron::new(dim, hull_rows)?;
    let mut cells = Vec::new();
    for cell in a.removed() {
        cells.push(cell.with_extra_rows(b.hull().rows())?);
    }
    for cell in b.removed() {
        cells.push(cell.with_extra_rows(a.hull().rows())?);
    }
    let cells = disjointify(cells)?;
    if cells.len() > MAX_CELLS {
        return Err(Error::CapExceeded { what: "removed cells", limit: MAX_CELLS, found: cells.len() });
    }
    CarvedPolyhedron::new(hull, cells)
}

/// Cartesian product. Coordinates concatenate; a removed cell of either
/// factor lifts to cell × other-hull, and the lifted cells are made
/// pairwise disjoint again by subtraction.
pub fn product(a: &CarvedPolyhedron, b: &CarvedPolyhedron) -> Result<CarvedPolyhedron, Error> {
    let (na, nb) = (a.dim(), b.dim());
    let total = na + nb;
    let mut hull_rows: Vec<LinearConstraint> =
        a.hull().rows().iter().map(|r| lift_row(r, 0, total)).collect();
    hull_rows.extend(b.hull().rows().iter().map(|r| lift_row(r, na, total)));
    let hull = Polyhedron::new(total, hull_rows)?;
    let mut cells = Vec::new();
    for cell in a.removed() {
        let lifted = cell.lifted(0, total)?;
        let other: Vec<LinearConstraint> =
            b.hull().rows().iter().map(|r| lift_row(r, na, total)).collect();
        cells.push(lifted.with_extra_rows(&other)?);
    }
    for cell in b.removed() {
        let lifted = cell.lifted(na, total)?;
        let other: Vec<LinearConstraint> =
            a.hull().rows().iter().map(|r| lift_row(r, 0, total)).collect();
        cells.push(lifted.with_extra_rows(&other)?);
    }
    let cells = disjointify(cells)?;
    if cells.len() > MAX_CELLS {
        return Err(Error::CapExceeded { what: "removed cells", limit: MAX_CELLS, found: cells.len() });
    }
    CarvedPolyhedron::new(hull, cells)
}

/// Finitely generated convex set conv(V) + cone(R). An empty V means the
/// empty set. Membership, equality, sums, and cones are all decided by
/// small exact LPs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FGSet {
    dim: usize,
    points: Vec<RatVec>,
    rays: Vec<RatVec>,
}

/// Convex-combination and cone weights certifying an FGSet membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FgWeights {
    pub point_weights: Vec<Rat>,
    pub ray_weights: Vec<Rat>,
}

impl FGSet {
    pub fn new(dim: usize, points: Vec<RatVec>, rays: Vec<RatVec>) -> Result<Self, Error> {
        for v in points.iter().chain(rays.iter()) {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
        }
        Ok(Self { dim, points, rays })
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, points: Vec::new(), rays: Vec::new() }
    }

    /// The singleton {p}.
    pub fn point(p: RatVec) -> Self {
        let dim = p.len();
        Self { dim, points: vec![p], rays: Vec::new() }
    }

    /// The cone generated by `rays`, containing the origin.
    pub fn cone(dim: usize, rays: Vec<RatVec>) -> Result<Self, Error> {
        Self::new(dim, vec![zeros(dim)], rays)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[RatVec] {
        &self.points
    }

    pub fn rays(&self) -> &[RatVec] {
        &self.rays
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn member(&self, x: &[Rat]) -> Result<bool, Error> {
        Ok(self.member_weights(x)?.is_some())
    }

    /// Membership with an exact certificate: convex weights over V and
    /// nonnegative weights over R reproducing x.
    pub fn member_weights(&self, x: &[Rat]) -> Result<Option<FgWeights>, Error> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        if self.points.is_empty() {
            return Ok(None);
        }
        let np = self.points.len();
        let nr = self.rays.len();
        let nvars = np + nr;
        let mut rows = Vec::new();
        for i in 0..nvars {
            let mut coeffs = zeros(nvars);
            coeffs[i] = rat_int(-1);
            rows.push(LinearConstraint::new(AffineForm::new(coeffs, Rat::zero()), Relation::Le));
        }
        let mut sum_coeffs = zeros(nvars);
        for c in sum_coeffs.iter_mut().take(np) {
            *c = rat_int(1);
        }
        rows.push(LinearConstraint::new(AffineForm::new(sum_coeffs, rat_int(-1)), Relation::Eq));
        for c in 0..self.dim {
            let mut coeffs = zeros(nvars);
            for (i, v) in self.points.iter().enumerate() {
                coeffs[i] = v[c].clone();
            }
            for (j, r) in self.rays.iter().enumerate() {
                coeffs[np + j] = r[c].clone();
            }
            rows.push(LinearConstraint::new(AffineForm::new(coeffs, -&x[c]), Relation::Eq));
        }
        match lp_solve(Sense::Minimize, &AffineForm::zero(nvars), &rows)? {
            LpOutcome::Optimal { point, .. } => Ok(Some(FgWeights {
                point_weights: point[..np].to_vec(),
                ray_weights: point[np..].to_vec(),
            })),
            LpOutcome::Infeasible { .. } => Ok(None),
            LpOutcome::Unbounded { .. } => {
                Err(Error::Internal("feasibility program reported unbounded".into()))
            }
        }
    }

    /// Whether r lies in cone(R), the recession cone of the set.
    pub fn ray_member(&self, r: &[Rat]) -> Result<bool, Error> {
        if r.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: r.len() });
        }
        FGSet::new(self.dim, vec![zeros(self.dim)], self.rays.clone())?.member(r)
    }
}

impl fmt::Display for FGSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "empty");
        }
        let fmt_vecs = |vs: &[RatVec]| {
            vs.iter().map(|v| crate::rat::point_display(v)).collect::<Vec<_>>().join(", ")
        };
        write!(f, "conv{{{}}}", fmt_vecs(&self.points))?;
        if !self.rays.is_empty() {
            write!(f, " + cone{{{}}}", fmt_vecs(&self.rays))?;
        }
        Ok(())
    }
}

/// Minkowski sum: pairwise sums of points, union of rays. The sum with an
/// empty set is empty.
pub fn fg_sum(a: &FGSet, b: &FGSet) -> Result<FGSet, Error> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    if a.is_empty() || b.is_empty() {
        return Ok(FGSet::empty(a.dim()));
    }
    let mut points = Vec::with_capacity(a.points.len() * b.points.len());
    for p in &a.points {
        for q in &b.points {
            points.push(vadd(p, q));
        }
    }
    let mut rays = a.rays.clone();
    for r in &b.rays {
        if !rays.contains(r) {
            rays.push(r.clone());
        }
    }
    FGSet::new(a.dim(), points, rays)
}

/// Whether both sets contain each other, decided by mutual generator
/// membership: points directly, rays in the other recession cone.
pub fn fg_equal(a: &FGSet, b: &FGSet) -> Result<bool, Error> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    if a.is_empty() || b.is_empty() {
        return Ok(a.is_empty() == b.is_empty());
    }
    for (from, to) in [(a, b), (b, a)] {
        for p in &from.points {
            if !to.member(p)? {
                return Ok(false);
            }
        }
        for r in &from.rays {
            if !to.ray_member(r)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Membership x ∈ conv(V) + cone(R).
pub fn fg_member(s: &FGSet, x: &[Rat]) -> Result<bool, Error> {
    s.member(x)
}

/// The cone generated by the set: cone(V ∪ R) for nonempty V, empty for the
/// empty set.
pub fn fg_cone(s: &FGSet) -> Result<FGSet, Error> {
    if s.is_empty() {
        return Ok(FGSet::empty(s.dim()));
    }
    let mut rays: Vec<RatVec> = Vec::new();
    for g in s.points.iter().chain(s.rays.iter()) {
        if !crate::rat::is_zero_vec(g) && !rays.contains(g) {
            rays.push(g.clone());
        }
    }
    FGSet::cone(s.dim(), rays)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn le(coeffs: &[i64], rhs: i64) -> LinearConstraint {
        LinearConstraint::le(coeffs.iter().map(|&c| rat_int(c)).collect(), rat_int(rhs))
    }

    fn eqr(coeffs: &[i64], rhs: i64) -> LinearConstraint {
        LinearConstraint::eq(coeffs.iter().map(|&c| rat_int(c)).collect(), rat_int(rhs))
    }

    fn unit_square() -> Polyhedron {
        Polyhedron::boxed(&[(rat_int(0), rat_int(1)), (rat_int(0), rat_int(1))]).unwrap()
    }

    fn pt(coords: &[i64]) -> RatVec {
        coords.iter().map(|&c| rat_int(c)).collect()
    }

    /// Half-plane x1 ≥ 0 with the boundary slot {0}×(−1,1) removed.
    fn halfplane_slit() -> CarvedPolyhedron {
        let hull = Polyhedron::new(2, vec![le(&[-1, 0], 0)]).unwrap();
        let cell = Cell::new(
            2,
            vec![
                eqr(&[1, 0], 0),
                LinearConstraint::lt(vec![rat_int(0), rat_int(-1)], rat_int(1)),
                LinearConstraint::lt(vec![rat_int(0), rat_int(1)], rat_int(1)),
            ],
        )
        .unwrap();
        CarvedPolyhedron::new(hull, vec![cell]).unwrap()
    }

    #[test]
    fn carving_accepts_boundary_slot() {
        let report = halfplane_slit().validate().unwrap();
        assert!(report.is_valid());
        assert!(report.issues.is_empty());
    }

    #[test]
    fn carving_rejects_interior_hole() {
        let hull = unit_square();
        let hole = Cell::new(
            2,
            vec![
                LinearConstraint::lt(vec![rat_int(-1), rat_int(0)], rat(-1, 4)),
                LinearConstraint::lt(vec![rat_int(1), rat_int(0)], rat(1, 2)),
                LinearConstraint::lt(vec![rat_int(0), rat_int(-1)], rat(-1, 4)),
                LinearConstraint::lt(vec![rat_int(0), rat_int(1)], rat(1, 2)),
            ],
        )
        .unwrap();
        let report = validate_carved(&hull, &[hole.clone()]).unwrap();
        assert!(!report.is_valid());
        assert_eq!(report.issues, vec![CarveIssue::MeetsInterior { cell: 0 }]);
        assert_eq!(
            CarvedPolyhedron::new(hull, vec![hole]),
            Err(Error::CellMeetsInterior { index: 0 })
        );
    }

    #[test]
    fn carving_reports_disjoint_cell_as_vacuous_warning() {
        let hull = unit_square();
        let off = Cell::new(2, vec![eqr(&[1, 0], 2)]).unwrap();
        let report = validate_carved(&hull, &[off.clone()]).unwrap();
        assert_eq!(report.issues, vec![CarveIssue::VacuousRemoval { cell: 0 }]);
        assert!(report.is_valid());
        assert!(CarvedPolyhedron::new(hull, vec![off]).is_ok());
    }

    #[test]
    fn carving_rejects_overlapping_cells() {
        let hull = unit_square();
        let edge = |lo: Rat, hi: Rat| {
            Cell::new(
                2,
                vec![
                    eqr(&[1, 0], 0),
                    LinearConstraint::lt(vec![rat_int(0), rat_int(-1)], -lo),
                    LinearConstraint::lt(vec![rat_int(0), rat_int(1)], hi),
                ],
            )
            .unwrap()
        };
        let a = edge(rat_int(0), rat(1, 2));
        let b = edge(rat(1, 4), rat(3, 4));
        assert_eq!(
            CarvedPolyhedron::new(hull, vec![a, b]),
            Err(Error::CellsOverlap { first: 0, second: 1 })
        );
    }

    #[test]
    fn membership_respects_removed_cells() {
        let omega = halfplane_slit();
        assert!(!omega.member(&pt(&[0, 0])).unwrap());
        assert!(omega.member(&pt(&[0, 1])).unwrap());
        assert!(omega.member(&pt(&[5, 0])).unwrap());
        assert!(!omega.member(&pt(&[-1, 0])).unwrap());
    }

    #[test]
    fn closure_is_the_hull() {
        let omega = halfplane_slit();
        assert!(omega.closure().member(&pt(&[0, 0])).unwrap());
        let plain = CarvedPolyhedron::from_polyhedron(unit_square());
        assert_eq!(plain.closure(), &unit_square());
    }

    #[test]
    fn ri_membership_uses_implicit_equalities() {
        let square = unit_square();
        assert!(square.ri_member(&[rat(1, 2), rat(1, 2)]).unwrap());
        assert!(!square.ri_member(&[rat_int(0), rat(1, 2)]).unwrap());

        let segment =
            Polyhedron::new(2, vec![eqr(&[1, 0], 0), le(&[0, 1], 1), le(&[0, -1], 0)]).unwrap();
        assert!(segment.ri_member(&[rat_int(0), rat(1, 2)]).unwrap());
        assert!(!segment.ri_member(&[rat_int(0), rat_int(0)]).unwrap());

        let halfline = Polyhedron::new(2, vec![le(&[-1, 0], 0), eqr(&[0, 1], 0)]).unwrap();
        assert!(!halfline.ri_member(&pt(&[0, 0])).unwrap());
        assert!(halfline.ri_member(&pt(&[3, 0])).unwrap());
    }

    #[test]
    fn ri_witness_lands_in_relative_interior() {
        for poly in [
            unit_square(),
            Polyhedron::new(2, vec![eqr(&[1, 0], 0), le(&[0, 1], 1), le(&[0, -1], 0)]).unwrap(),
            halfplane_slit().hull().clone(),
        ] {
            let w = poly.ri_witness().unwrap();
            assert!(poly.ri_member(&w).unwrap());
        }
    }

    #[test]
    fn implicit_equalities_found_exactly() {
        let mirrored = Polyhedron::new(2, vec![le(&[1, 0], 0), le(&[-1, 0], 0)]).unwrap();
        assert_eq!(mirrored.implicit_equalities(), &[0, 1]);
        assert_eq!(unit_square().implicit_equalities(), &[] as &[usize]);
        let point = Polyhedron::new(2, vec![le(&[1, 1], 1), le(&[-1, 0], -1), le(&[0, -1], 0)]).unwrap();
        assert_eq!(point.implicit_equalities(), &[0, 1, 2]);
    }

    #[test]
    fn normal_cone_at_square_corner_and_interior() {
        let square = unit_square();
        let corner = square.normal_cone(&pt(&[0, 0])).unwrap();
        let expected = FGSet::cone(2, vec![pt(&[-1, 0]), pt(&[0, -1])]).unwrap();
        assert!(fg_equal(&corner, &expected).unwrap());
        assert!(corner.member(&pt(&[-3, -5])).unwrap());
        assert!(!corner.member(&pt(&[1, 0])).unwrap());

        let interior = square.normal_cone(&[rat(1, 2), rat(1, 2)]).unwrap();
        assert!(fg_equal(&interior, &FGSet::point(pt(&[0, 0]))).unwrap());
    }

    #[test]
    fn normal_cone_ignores_carving_and_empties_outside() {
        let omega = halfplane_slit();
        let at_kept_endpoint = omega.normal_cone(&pt(&[0, 1])).unwrap();
        let expected = FGSet::cone(2, vec![pt(&[-1, 0])]).unwrap();
        assert!(fg_equal(&at_kept_endpoint, &expected).unwrap());
        assert!(omega.normal_cone(&pt(&[0, 0])).unwrap().is_empty());
        assert!(omega.normal_cone(&pt(&[-2, 0])).unwrap().is_empty());
    }

    #[test]
    fn intersection_is_idempotent_up_to_redundancy() {
        let omega = halfplane_slit();
        let twice = intersect_carved(&omega, &omega).unwrap();
        assert!(twice.hull().equivalent(omega.hull()).unwrap());
        assert_eq!(twice.removed().len(), 1);
        assert!(!twice.member(&pt(&[0, 0])).unwrap());
        assert!(twice.member(&pt(&[0, 1])).unwrap());
    }

    #[test]
    fn intersection_with_box_keeps_the_slot() {
        let omega = halfplane_slit();
        let boxed = CarvedPolyhedron::from_polyhedron(
            Polyhedron::boxed(&[(rat_int(-1), rat_int(1)), (rat_int(-1), rat_int(1))]).unwrap(),
        );
        let meet = intersect_carved(&omega, &boxed).unwrap();
        for x_num in -2..=2 {
            for y_num in -4..=4 {
                let p = vec![rat(x_num, 2), rat(y_num, 4)];
                let expect = omega.member(&p).unwrap() && boxed.member(&p).unwrap();
                assert_eq!(meet.member(&p).unwrap(), expect, "at {p:?}");
            }
        }
    }

    #[test]
    fn intersection_requires_overlapping_relative_interiors() {
        let left = CarvedPolyhedron::from_polyhedron(
            Polyhedron::new(1, vec![le(&[1], 0)]).unwrap(),
        );
        let right = CarvedPolyhedron::from_polyhedron(
            Polyhedron::new(1, vec![le(&[-1], 0)]).unwrap(),
        );
        let err = intersect_carved(&left, &right).unwrap_err();
        assert!(err.is_hypothesis_violation());
    }

    #[test]
    fn product_lifts_and_disjointifies_cells() {
        let slit_interval = {
            let hull = Polyhedron::boxed(&[(rat_int(0), rat_int(1))]).unwrap();
            let cell = Cell::new(1, vec![eqr(&[1], 0)]).unwrap();
            CarvedPolyhedron::new(hull, vec![cell]).unwrap()
        };
        let prod = product(&slit_interval, &slit_interval).unwrap();
        assert_eq!(prod.dim(), 2);
        for (x, y, expect) in [
            (rat(1, 2), rat(1, 2), true),
            (rat_int(0), rat(1, 2), false),
            (rat(1, 2), rat_int(0), false),
            (rat_int(0), rat_int(0), false),
            (rat_int(1), rat_int(1), true),
        ] {
            assert_eq!(prod.member(&[x.clone(), y.clone()]).unwrap(), expect);
        }
        for (i, a) in prod.removed().iter().enumerate() {
            for b in prod.removed().iter().skip(i + 1) {
                let mut sys = a.rows().to_vec();
                sys.extend_from_slice(b.rows());
                assert!(!lp_strict_feasible(2, &sys).unwrap().is_feasible());
            }
        }
    }

    #[test]
    fn product_relative_interior_is_componentwise() {
        let square = CarvedPolyhedron::from_polyhedron(unit_square());
        let segment = CarvedPolyhedron::from_polyhedron(
            Polyhedron::new(1, vec![le(&[1], 1), le(&[-1], 0)]).unwrap(),
        );
        let prod = product(&square, &segment).unwrap();
        let probe = [rat(1, 2), rat(1, 2), rat(1, 2)];
        assert!(prod.ri_member(&probe).unwrap());
        let edge = [rat_int(0), rat(1, 2), rat(1, 2)];
        assert!(!prod.ri_member(&edge).unwrap());
    }

    #[test]
    fn fg_sum_of_axis_cones_is_the_negative_quadrant() {
        let a = FGSet::cone(2, vec![pt(&[-1, 0])]).unwrap();
        let b = FGSet::cone(2, vec![pt(&[0, -1])]).unwrap();
        let sum = fg_sum(&a, &b).unwrap();
        let quadrant = FGSet::cone(2, vec![pt(&[-1, 0]), pt(&[0, -1])]).unwrap();
        assert!(fg_equal(&sum, &quadrant).unwrap());
        assert!(sum.member(&pt(&[-2, -7])).unwrap());
        assert!(!sum.member(&pt(&[-2, 1])).unwrap());
    }

    #[test]
    fn fg_cone_of_single_gradient_is_its_ray() {
        let grad = FGSet::point(pt(&[-1, 1]));
        let cone = fg_cone(&grad).unwrap();
        let ray = FGSet::cone(2, vec![pt(&[-1, 1])]).unwrap();
        assert!(fg_equal(&cone, &ray).unwrap());
        assert!(cone.member(&[rat(-1, 2), rat(1, 2)]).unwrap());
        assert!(!cone.member(&pt(&[1, 1])).unwrap());
    }

    #[test]
    fn fg_equal_ignores_redundant_generators() {
        let with_redundant =
            FGSet::cone(2, vec![pt(&[1, 0]), pt(&[0, 1]), pt(&[1, 1])]).unwrap();
        let minimal = FGSet::cone(2, vec![pt(&[1, 0]), pt(&[0, 1])]).unwrap();
        assert!(fg_equal(&with_redundant, &minimal).unwrap());
        let line = FGSet::cone(2, vec![pt(&[1, 0]), pt(&[-1, 0])]).unwrap();
        assert!(!fg_equal(&with_redundant, &line).unwrap());
    }

    #[test]
    fn fg_membership_produces_verifiable_weights() {
        let s = FGSet::new(2, vec![pt(&[0, 0]), pt(&[2, 0])], vec![pt(&[0, 1])]).unwrap();
        let x = [rat_int(1), rat_int(3)];
        let w = s.member_weights(&x).unwrap().expect("member");
        let mut rebuilt = zeros(2);
        for (theta, v) in w.point_weights.iter().zip(s.points()) {
            rebuilt = vadd(&rebuilt, &crate::rat::vscale(theta, v));
        }
        for (mu, r) in w.ray_weights.iter().zip(s.rays()) {
            assert!(*mu >= Rat::zero());
            rebuilt = vadd(&rebuilt, &crate::rat::vscale(mu, r));
        }
        assert_eq!(rebuilt, x.to_vec());
        let total: Rat = w.point_weights.iter().sum();
        assert_eq!(total, rat_int(1));
        assert!(!s.member(&[rat_int(1), rat_int(-1)]).unwrap());
    }

    #[test]
    fn empty_fg_set_behaves_like_empty_set()
    {
        let e = FGSet::empty(2);
        assert!(e.is_empty());
        assert!(!e.member(&pt(&[0, 0])).unwrap());
        let s = FGSet::point(pt(&[1, 1]));
        assert!(fg_sum(&e, &s).unwrap().is_empty());
        assert!(fg_cone(&e).unwrap().is_empty());
        assert!(fg_equal(&e, &FGSet::empty(2)).unwrap());
        assert!(!fg_equal(&e, &s).unwrap());
    }

    #[test]
    fn polyhedron_constructor_enforces_caps_and_nonemptiness() {
        let rows = vec![le(&[1], 0), le(&[-1], -1)];
        assert_eq!(Polyhedron::new(1, rows), Err(Error::EmptyPolyhedron));
        let too_high = Polyhedron::new(7, vec![]);
        assert!(matches!(too_high, Err(Error::CapExceeded { what: "dimension", .. })));
        let many = (0..33).map(|_| le(&[1], 1)).collect();
        assert!(matches!(Polyhedron::new(1, many), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn cell_subtraction_partitions_the_difference() {
        let big = Cell::new(1, vec![le(&[1], 4), le(&[-1], 0)]).unwrap();
        let mid = Cell::new(1, vec![le(&[1], 3), le(&[-1], -1)]).unwrap();
        let parts = cell_subtract(&big, &mid).unwrap();
        assert_eq!(parts.len(), 2);
        for x_num in 0..=16 {
            let p = vec![rat(x_num, 4)];
            let expect = big.member(&p).unwrap() && !mid.member(&p).unwrap();
            let got = parts.iter().filter(|c| c.member(&p).unwrap()).count();
            assert_eq!(got, usize::from(expect), "at {p:?}");
        }
    }
}
