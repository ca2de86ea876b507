//! Minimization of nearly convex functions over carved polyhedra.
//!
//! A problem pairs an objective [`NCFunction`] with a feasible
//! [`CarvedPolyhedron`]. Its associated problem replaces the objective by
//! its lower semicontinuous hull and the feasible set by its closure,
//! yielding an ordinary convex program that is solved exactly. Under the
//! regularity condition (the relative interiors of the feasible set and of
//! the objective's domain meet) both problems share their optimal value,
//! and the solution set of the original problem is the associated solution
//! polyhedron minus finitely many carved cells.
//!
//! The module also certifies first-order optimality (0 ∈ ∂f(x̄) + N(x̄; D))
//! with exact convex-combination weights, classifies individual points
//! against both problems, and corroborates the local-to-global property on
//! rational grids.

use crate::affine::{AffineForm, LinearConstraint};
use crate::error::Error;
use crate::funcs::{lsc_hull, ConvexBase, LscFunction, NCFunction};
use crate::lp::{lp_solve, lp_strict_feasible, LpOutcome, Sense, StrictOutcome};
use crate::oracle::{gradient_l1_bound, grid_local_minima, GridLocalCluster, GridSpec};
use crate::qp::{qp_solve, solution_set_rows, QpOutcome};
use crate::rat::{rat_int, vadd, vscale, zeros, ExtVal, Rat, RatVec};
use crate::sets::{fg_sum, CarvedPolyhedron, Cell, FGSet, FgWeights, Polyhedron};

const REGULARITY_VIOLATED: &str =
    "regularity fails: the relative interiors of the feasible set and of the objective domain do not meet";

/// Minimize a nearly convex function over a carved polyhedron.
#[derive(Debug, Clone)]
pub struct Problem {
    objective: NCFunction,
    feasible_set: CarvedPolyhedron,
}

impl Problem {
    pub fn new(objective: NCFunction, feasible_set: CarvedPolyhedron) -> Result<Self, Error> {
        if objective.dim() != feasible_set.dim() {
            return Err(Error::DimensionMismatch {
                expected: objective.dim(),
                found: feasible_set.dim(),
            });
        }
        Ok(Problem { objective, feasible_set })
    }

    pub fn objective(&self) -> &NCFunction {
        &self.objective
    }

    pub fn feasible_set(&self) -> &CarvedPolyhedron {
        &self.feasible_set
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }
}

/// The convex relaxation of a [`Problem`]: the lsc hull of the objective
/// minimized over the closure of the feasible set. Built by [`associate`].
#[derive(Debug, Clone)]
pub struct AssociatedProblem {
    objective: LscFunction,
    feasible_set: Polyhedron,
}

impl AssociatedProblem {
    pub fn objective(&self) -> &LscFunction {
        &self.objective
    }

    pub fn feasible_set(&self) -> &Polyhedron {
        &self.feasible_set
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }
}

/// Builds the associated convex problem.
pub fn associate(p: &Problem) -> AssociatedProblem {
    AssociatedProblem {
        objective: lsc_hull(p.objective()),
        feasible_set: p.feasible_set().closure().clone(),
    }
}

/// Whether the relative interiors of the feasible set and of the objective
/// domain intersect, with an exact witness or refutation.
#[derive(Debug, Clone)]
pub enum Regularity {
    Holds { witness: RatVec },
    /// `farkas` certifies that even the closures miss each other; otherwise
    /// `slack_bound` proves no common relative-interior point exists.
    Fails { farkas: Option<RatVec>, slack_bound: Option<RatVec> },
}

impl Regularity {
    pub fn holds(&self) -> bool {
        matches!(self, Regularity::Holds { .. })
    }
}

/// Decides the regularity condition by one strict-feasibility program over
/// the relative-interior rows of both sets.
pub fn check_regularity(p: &Problem) -> Result<Regularity, Error> {
    let mut rows = p.feasible_set().hull().ri_rows().to_vec();
    if let Some(dom) = p.objective().domain().carved() {
        rows.extend(dom.hull().ri_rows().iter().cloned());
    }
    match lp_strict_feasible(p.dim(), &rows)? {
        StrictOutcome::Feasible { point, .. } => Ok(Regularity::Holds { witness: point }),
        StrictOutcome::Infeasible { farkas, slack_bound } => {
            Ok(Regularity::Fails { farkas, slack_bound })
        }
    }
}

/// Result of solving an associated problem exactly.
#[derive(Debug, Clone)]
pub enum AssociatedOutcome {
    /// `minimizers` is the full solution polyhedron.
    Optimal { value: Rat, minimizers: Polyhedron },
    Infeasible,
    Unbounded,
}

/// Solves the associated problem: an epigraph linear program for max-affine
/// objectives, an exact quadratic program otherwise. On optimality the
/// entire minimizer polyhedron is returned.
pub fn solve_associated(ap: &AssociatedProblem) -> Result<AssociatedOutcome, Error> {
    solve_associated_capped(ap, None)
}

/// Like [`solve_associated`], with an explicit bound on how many active
/// sets a quadratic objective may enumerate before giving up.
pub fn solve_associated_capped(
    ap: &AssociatedProblem,
    max_active_sets: Option<u64>,
) -> Result<AssociatedOutcome, Error> {
    let dim = ap.dim();
    let mut rows = ap.feasible_set().rows().to_vec();
    if let Some(dom) = ap.objective().domain().polyhedron() {
        for r in dom.rows() {
            if !rows.contains(r) {
                rows.push(r.clone());
            }
        }
    }
    match ap.objective().base() {
        ConvexBase::MaxAffine { pieces } => {
            let mut lifted: Vec<LinearConstraint> = rows.iter().map(|r| lift_row(r)).collect();
            for piece in pieces {
                let mut coeffs = piece.coeffs.clone();
                coeffs.push(rat_int(-1));
                lifted.push(LinearConstraint::le(coeffs, -piece.constant.clone()));
            }
            let mut t_coeffs = zeros(dim);
            t_coeffs.push(rat_int(1));
            let objective = AffineForm::new(t_coeffs, rat_int(0));
            match lp_solve(Sense::Minimize, &objective, &lifted)? {
                LpOutcome::Optimal { value, .. } => {
                    let mut srows = rows;
                    for piece in pieces {
                        srows.push(LinearConstraint::le(
                            piece.coeffs.clone(),
                            value.clone() - piece.constant.clone(),
                        ));
                    }
                    let minimizers = Polyhedron::new(dim, srows)?;
                    Ok(AssociatedOutcome::Optimal { value, minimizers })
                }
                LpOutcome::Unbounded { .. } => Ok(AssociatedOutcome::Unbounded),
                LpOutcome::Infeasible { .. } => Ok(AssociatedOutcome::Infeasible),
            }
        }
        ConvexBase::Quadratic { q, b, c } => match qp_solve(q, b, c, &rows, max_active_sets)? {
            QpOutcome::Optimal { value, point } => {
                let srows = solution_set_rows(q, b, &rows, &point);
                let minimizers = Polyhedron::new(dim, srows)?;
                Ok(AssociatedOutcome::Optimal { value, minimizers })
            }
            QpOutcome::Unbounded { .. } => Ok(AssociatedOutcome::Unbounded),
            QpOutcome::Infeasible => Ok(AssociatedOutcome::Infeasible),
        },
    }
}

fn lift_row(row: &LinearConstraint) -> LinearConstraint {
    let mut coeffs = row.form.coeffs.clone();
    coeffs.push(rat_int(0));
    LinearConstraint::new(AffineForm::new(coeffs, row.form.constant.clone()), row.rel)
}

/// A polyhedron minus finitely many cells. Unlike [`CarvedPolyhedron`] the
/// cells carry no placement invariants; the type only answers membership.
#[derive(Debug, Clone)]
pub struct DiffSet {
    pub base: Polyhedron,
    pub removed: Vec<Cell>,
}

impl DiffSet {
    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn member(&self, x: &[Rat]) -> Result<bool, Error> {
        if !self.base.member(x)? {
            return Ok(false);
        }
        for cell in &self.removed {
            if cell.member(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Outcome of [`solve_original`].
#[derive(Debug, Clone)]
pub enum SolveStatus {
    Optimal {
        value: Rat,
        /// Solution polyhedron of the associated problem.
        associated_solutions: Polyhedron,
        /// Solution set of the original problem.
        solutions: DiffSet,
    },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub regularity: Regularity,
}

/// Solves the original problem by solving its associated problem; both
/// share the optimal value under regularity, which is required up front.
/// The original solution set is the associated solution polyhedron minus
/// the carved cells and override cells that meet it.
pub fn solve_original(p: &Problem) -> Result<SolveReport, Error> {
    solve_original_capped(p, None)
}

/// Like [`solve_original`], with an explicit bound on how many active sets
/// a quadratic objective may enumerate before giving up.
pub fn solve_original_capped(
    p: &Problem,
    max_active_sets: Option<u64>,
) -> Result<SolveReport, Error> {
    let regularity = check_regularity(p)?;
    if !regularity.holds() {
        return Err(Error::HypothesisViolated(REGULARITY_VIOLATED.into()));
    }
    let status = match solve_associated_capped(&associate(p), max_active_sets)? {
        AssociatedOutcome::Infeasible => SolveStatus::Infeasible,
        AssociatedOutcome::Unbounded => SolveStatus::Unbounded,
        AssociatedOutcome::Optimal { value, minimizers } => {
            let solutions = subtract_excluded_cells(p, &minimizers)?;
            SolveStatus::Optimal { value, associated_solutions: minimizers, solutions }
        }
    };
    Ok(SolveReport { status, regularity })
}

/// Removes from `base` the feasible-set cells, the objective-domain cells,
/// and the override cells, keeping only cells that actually meet `base`.
fn subtract_excluded_cells(p: &Problem, base: &Polyhedron) -> Result<DiffSet, Error> {
    let mut candidates: Vec<&Cell> = p.feasible_set().removed().iter().collect();
    if let Some(dom) = p.objective().domain().carved() {
        candidates.extend(dom.removed().iter());
    }
    for ov in p.objective().overrides() {
        candidates.push(&ov.cell);
    }
    diff_set_with_cells(base, candidates)
}

/// Builds `base` minus the given cells, dropping cells that miss `base`.
pub(crate) fn diff_set_with_cells(
    base: &Polyhedron,
    candidates: Vec<&Cell>,
) -> Result<DiffSet, Error> {
    let mut removed = Vec::new();
    for cell in candidates {
        let mut rows = cell.rows().to_vec();
        rows.extend(base.rows().iter().cloned());
        if lp_strict_feasible(base.dim(), &rows)?.is_feasible() {
            removed.push(cell.clone());
        }
    }
    Ok(DiffSet { base: base.clone(), removed })
}

/// Exact first-order optimality certificate: whether 0 lies in
/// ∂f(x̄) + N(x̄; D), with reproducing weights when it does.
#[derive(Debug, Clone)]
pub struct FermatCertificate {
    pub holds: bool,
    /// ∂f(x̄) + N(x̄; D) as a finitely generated set.
    pub optimality_set: FGSet,
    pub weights: Option<FgWeights>,
}

/// Certifies 0 ∈ ∂f(x̄) + N(x̄; D) for the original problem. Requires
/// regularity, x̄ ∈ D, and f(x̄) finite; the returned weights are
/// re-verified arithmetically before being reported.
pub fn fermat_check(p: &Problem, x: &[Rat]) -> Result<FermatCertificate, Error> {
    if !check_regularity(p)?.holds() {
        return Err(Error::HypothesisViolated(REGULARITY_VIOLATED.into()));
    }
    if !p.feasible_set().member(x)? {
        return Err(Error::PointNotFeasible);
    }
    if !p.objective().evaluate(x)?.is_finite() {
        return Err(Error::PointNotInDomain);
    }
    let sub = p.objective().subdiff(x)?;
    let cone = p.feasible_set().normal_cone(x)?;
    certify_origin(sub, cone)
}

/// Certifies 0 ∈ ∂f̄(x̄) + N(x̄; D̄) for the associated problem. Requires
/// x̄ ∈ D̄; at points where f̄ is +∞ the subdifferential is empty and the
/// certificate reports `holds: false`.
pub fn fermat_check_associated(
    ap: &AssociatedProblem,
    x: &[Rat],
) -> Result<FermatCertificate, Error> {
    if !ap.feasible_set().member(x)? {
        return Err(Error::PointNotFeasible);
    }
    if !ap.objective().evaluate(x)?.is_finite() {
        return Ok(FermatCertificate {
            holds: false,
            optimality_set: FGSet::empty(ap.dim()),
            weights: None,
        });
    }
    let sub = ap.objective().subdiff(x)?;
    let cone = ap.feasible_set().normal_cone(x)?;
    certify_origin(sub, cone)
}

fn certify_origin(sub: FGSet, cone: FGSet) -> Result<FermatCertificate, Error> {
    let optimality_set = fg_sum(&sub, &cone)?;
    let origin = zeros(optimality_set.dim());
    let weights = optimality_set.member_weights(&origin)?;
    if let Some(w) = &weights {
        verify_origin_weights(&optimality_set, w)?;
    }
    Ok(FermatCertificate { holds: weights.is_some(), optimality_set, weights })
}

fn verify_origin_weights(set: &FGSet, w: &FgWeights) -> Result<(), Error> {
    if w.point_weights.len() != set.points().len() || w.ray_weights.len() != set.rays().len() {
        return Err(Error::Internal("certificate weight count mismatch".into()));
    }
    let zero = rat_int(0);
    let mut total = rat_int(0);
    let mut combo = zeros(set.dim());
    for (th, p) in w.point_weights.iter().zip(set.points()) {
        if th < &zero {
            return Err(Error::Internal("negative convex weight in certificate".into()));
        }
        total += th.clone();
        combo = vadd(&combo, &vscale(th, p));
    }
    for (mu, r) in w.ray_weights.iter().zip(set.rays()) {
        if mu < &zero {
            return Err(Error::Internal("negative ray weight in certificate".into()));
        }
        combo = vadd(&combo, &vscale(mu, r));
    }
    if total != rat_int(1) || !crate::rat::is_zero_vec(&combo) {
        return Err(Error::Internal("certificate weights do not reproduce the origin".into()));
    }
    Ok(())
}

/// How a point relates to the original problem and its associated problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Solves both problems.
    SolutionBoth,
    /// Solves the associated problem only.
    AssociatedOnly,
    /// Feasible for the associated problem but solves neither.
    NotSolution,
    /// Outside the closed feasible set.
    Infeasible,
}

/// Classifies x̄ against both problems without a full solve: an associated
/// Fermat certificate pins the associated optimal value at f̄(x̄), and x̄
/// solves the original problem exactly when it is feasible with f(x̄) equal
/// to that value. The `NotSolution` verdict is exact whenever the problem
/// is regular; `SolutionBoth` and `AssociatedOnly` are exact
/// unconditionally.
pub fn classify_point(p: &Problem, x: &[Rat]) -> Result<Classification, Error> {
    let ap = associate(p);
    if !ap.feasible_set().member(x)? {
        return Ok(Classification::Infeasible);
    }
    let cert = fermat_check_associated(&ap, x)?;
    if !cert.holds {
        return Ok(Classification::NotSolution);
    }
    let vbar = ap.objective().evaluate(x)?;
    if p.feasible_set().member(x)? && p.objective().evaluate(x)? == vbar {
        Ok(Classification::SolutionBoth)
    } else {
        Ok(Classification::AssociatedOnly)
    }
}

/// Grid corroboration of the local-to-global property.
#[derive(Debug, Clone)]
pub struct LocalGlobalReport {
    pub regular: bool,
    /// Associated optimal value; present only for regular bounded problems.
    pub optimal_value: Option<Rat>,
    /// Lipschitz slack L·step admitted when comparing grid values.
    pub margin: Option<Rat>,
    pub clusters: Vec<GridLocalCluster>,
    /// Indices of clusters whose finite value exceeds the optimal value by
    /// more than the margin.
    pub failing: Vec<usize>,
    pub all_within_margin: Option<bool>,
}

/// Lists grid-local minimizer clusters and, for regular problems, checks
/// that every finite cluster value is within a Lipschitz margin of the
/// optimal value. For irregular problems the clusters are reported without
/// a verdict; they are candidate local solutions only.
pub fn local_global_check(p: &Problem, spec: &GridSpec) -> Result<LocalGlobalReport, Error> {
    let regularity = check_regularity(p)?;
    let clusters = grid_local_minima(p.objective(), p.feasible_set(), spec)?;
    if !regularity.holds() {
        return Ok(LocalGlobalReport {
            regular: false,
            optimal_value: None,
            margin: None,
            clusters,
            failing: Vec::new(),
            all_within_margin: None,
        });
    }
    let AssociatedOutcome::Optimal { value, .. } = solve_associated(&associate(p))? else {
        return Ok(LocalGlobalReport {
            regular: true,
            optimal_value: None,
            margin: None,
            clusters,
            failing: Vec::new(),
            all_within_margin: None,
        });
    };
    let margin = gradient_l1_bound(p.objective(), &spec.max_abs()) * spec.step().clone();
    let bound = value.clone() + margin.clone();
    let failing: Vec<usize> = clusters
        .iter()
        .enumerate()
        .filter(|(_, c)| matches!(&c.value, ExtVal::Finite(v) if v > &bound))
        .map(|(i, _)| i)
        .collect();
    let all_within_margin = Some(failing.is_empty());
    Ok(LocalGlobalReport {
        regular: true,
        optimal_value: Some(value),
        margin: Some(margin),
        clusters,
        failing,
        all_within_margin,
    })
}
