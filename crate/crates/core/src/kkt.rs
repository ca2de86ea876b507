//! Lagrange multiplier certification for nearly convex problems under
//! functional constraints.
//!
//! A constrained problem minimizes a nearly convex objective over
//! D = Ω₀ ∩ {x : gᵢ(x) ≤ 0, i = 1..m} with nearly convex gᵢ. Under the
//! Slater condition (a point of ri Ω₀ satisfying every constraint
//! strictly) the associated convex problem admits an exact
//! Karush-Kuhn-Tucker characterization: x̄ solves it iff
//! 0 ∈ ∂f̄(x̄) + Σ λᵢ∂ḡᵢ(x̄) + N(x̄; Ω̄₀) for some λ ≥ 0 with
//! λᵢḡᵢ(x̄) = 0. Certificates carry exact multipliers and
//! convex-combination weights, re-verified arithmetically; refutations
//! carry infeasibility multipliers for the certificate program.
//!
//! Solving goes through one of two routes: piecewise affine constraint
//! systems are assembled into a carved polyhedron and solved exactly,
//! while quadratic constraints are handled by solving the relaxation
//! without them and proving them inactive on its solution set.

use crate::affine::{AffineForm, LinearConstraint, Relation};
use crate::error::Error;
use crate::funcs::{lsc_hull, ConvexBase, LscFunction, NCFunction};
use crate::linalg::{mat_vec, quad_form, solve_linear_system, LinearSolution};
use crate::lp::{lp_solve, lp_strict_feasible, LpOutcome, Sense, StrictOutcome};
use crate::opt::{
    associate, diff_set_with_cells, solve_original_capped, AssociatedOutcome, DiffSet, Problem,
    SolveStatus,
};
use crate::rat::{dot, is_zero_vec, rat_int, vadd, vscale, zeros, ExtVal, Rat, RatVec};
use crate::sets::{
    fg_cone, fg_sum, intersect_carved, rows_imply_row, CarvedPolyhedron, Cell, FGSet, FgWeights,
    Polyhedron,
};
use num::Zero;

const SLATER_FAILS: &str =
    "the generalized Slater condition fails: no point of the common relative interior satisfies every constraint strictly";
const NO_RI_DOM_F_WITNESS: &str =
    "no Slater point lies in the relative interior of the objective domain";

/// Minimize a nearly convex objective over a geometric set intersected
/// with finitely many nearly convex sublevel constraints gᵢ(x) ≤ 0.
#[derive(Debug, Clone)]
pub struct ConstrainedProblem {
    objective: NCFunction,
    geometric_set: CarvedPolyhedron,
    constraints: Vec<NCFunction>,
    slater_hint: Option<RatVec>,
}

impl ConstrainedProblem {
    pub fn new(
        objective: NCFunction,
        geometric_set: CarvedPolyhedron,
        constraints: Vec<NCFunction>,
        slater_hint: Option<RatVec>,
    ) -> Result<Self, Error> {
        let dim = objective.dim();
        if geometric_set.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: geometric_set.dim() });
        }
        for g in &constraints {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: g.dim() });
            }
        }
        if let Some(hint) = &slater_hint {
            if hint.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: hint.len() });
            }
        }
        Ok(ConstrainedProblem { objective, geometric_set, constraints, slater_hint })
    }

    pub fn objective(&self) -> &NCFunction {
        &self.objective
    }

    pub fn geometric_set(&self) -> &CarvedPolyhedron {
        &self.geometric_set
    }

    pub fn constraints(&self) -> &[NCFunction] {
        &self.constraints
    }

    pub fn slater_hint(&self) -> Option<&RatVec> {
        self.slater_hint.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }
}

/// A Slater point together with its strict-feasibility margins −gᵢ(x⁰).
#[derive(Debug, Clone)]
pub struct SlaterWitness {
    pub x0: RatVec,
    pub margins: Vec<Rat>,
}

/// Outcome of the Slater test. `in_ri_dom_f` records whether the witness
/// also lies in the relative interior of the objective domain, which the
/// multiplier theorems require.
#[derive(Debug, Clone)]
pub enum SlaterOutcome {
    Holds { witness: SlaterWitness, in_ri_dom_f: bool },
    Fails { farkas: Option<RatVec>, slack_bound: Option<RatVec> },
}

impl SlaterOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, SlaterOutcome::Holds { .. })
    }
}

/// Decides the generalized Slater condition: is there x⁰ ∈ ri Ω₀ with
/// gᵢ(x⁰) < 0 for every i?
///
/// A provided hint is verified exactly and wins over the search. Without
/// a hint, piecewise affine constraint systems are searched by one
/// strict-feasibility program over the relative-interior rows and the
/// strict piece rows, preferring a witness inside ri(dom f); quadratic
/// constraints cannot be searched and report [`Error::QuadraticNeedsHint`].
pub fn check_slater(cp: &ConstrainedProblem) -> Result<SlaterOutcome, Error> {
    if let Some(hint) = cp.slater_hint() {
        return verify_hint(cp, hint);
    }
    if cp
        .constraints()
        .iter()
        .any(|g| matches!(g.base(), ConvexBase::Quadratic { .. }))
    {
        return Err(Error::QuadraticNeedsHint);
    }
    let f_restricted = cp.objective().domain().carved().is_some();
    match lp_strict_feasible(cp.dim(), &slater_rows(cp, true))? {
        StrictOutcome::Feasible { point, .. } => return finish_witness(cp, point, true),
        StrictOutcome::Infeasible { farkas, slack_bound } if !f_restricted => {
            return Ok(SlaterOutcome::Fails { farkas, slack_bound });
        }
        StrictOutcome::Infeasible { .. } => {}
    }
    match lp_strict_feasible(cp.dim(), &slater_rows(cp, false))? {
        StrictOutcome::Feasible { point, .. } => finish_witness(cp, point, false),
        StrictOutcome::Infeasible { farkas, slack_bound } => {
            Ok(SlaterOutcome::Fails { farkas, slack_bound })
        }
    }
}

fn slater_rows(cp: &ConstrainedProblem, include_f_dom: bool) -> Vec<LinearConstraint> {
    let mut rows = cp.geometric_set().hull().ri_rows().to_vec();
    for g in cp.constraints() {
        if let Some(dom) = g.domain().carved() {
            rows.extend(dom.hull().ri_rows().iter().cloned());
        }
        if let ConvexBase::MaxAffine { pieces } = g.base() {
            for piece in pieces {
                rows.push(LinearConstraint::new(piece.clone(), Relation::Lt));
            }
        }
    }
    if include_f_dom {
        if let Some(dom) = cp.objective().domain().carved() {
            rows.extend(dom.hull().ri_rows().iter().cloned());
        }
    }
    rows
}

fn finish_witness(
    cp: &ConstrainedProblem,
    x0: RatVec,
    in_ri_dom_f: bool,
) -> Result<SlaterOutcome, Error> {
    let mut margins = Vec::new();
    for g in cp.constraints() {
        match g.evaluate(&x0)? {
            ExtVal::Finite(v) if v < rat_int(0) => margins.push(-v),
            _ => return Err(Error::Internal("Slater witness failed re-verification".into())),
        }
    }
    Ok(SlaterOutcome::Holds { witness: SlaterWitness { x0, margins }, in_ri_dom_f })
}

fn verify_hint(cp: &ConstrainedProblem, hint: &RatVec) -> Result<SlaterOutcome, Error> {
    if !cp.geometric_set().ri_member(hint)? {
        return Err(Error::HypothesisViolated(
            "the Slater hint is not in the relative interior of the geometric set".into(),
        ));
    }
    let mut margins = Vec::new();
    for (i, g) in cp.constraints().iter().enumerate() {
        if !g.is_in_ri_dom(hint)? {
            return Err(Error::HypothesisViolated(format!(
                "the Slater hint is not in the relative interior of the domain of constraint {i}"
            )));
        }
        match g.evaluate(hint)? {
            ExtVal::Finite(v) if v < rat_int(0) => margins.push(-v),
            _ => {
                return Err(Error::HypothesisViolated(format!(
                    "the Slater hint does not satisfy constraint {i} strictly"
                )));
            }
        }
    }
    let in_ri_dom_f = cp.objective().is_in_ri_dom(hint)?;
    Ok(SlaterOutcome::Holds {
        witness: SlaterWitness { x0: hint.clone(), margins },
        in_ri_dom_f,
    })
}

/// Closure of the sublevel set Ω₁ = {x : gᵢ(x) ≤ 0 for all i}, exact
/// under the Slater condition.
#[derive(Debug, Clone)]
pub enum ClosureOmega1 {
    /// All constraints piecewise affine: an explicit polyhedron.
    Polyhedral(Polyhedron),
    /// Some constraint quadratic: membership is decided by evaluating the
    /// lsc hulls, without an explicit inequality description.
    Symbolic { dim: usize, constraints: Vec<LscFunction> },
}

impl ClosureOmega1 {
    pub fn member(&self, x: &[Rat]) -> Result<bool, Error> {
        match self {
            ClosureOmega1::Polyhedral(p) => p.member(x),
            ClosureOmega1::Symbolic { constraints, .. } => {
                for gbar in constraints {
                    match gbar.evaluate(x)? {
                        ExtVal::Finite(v) if v <= rat_int(0) => {}
                        _ => return Ok(false),
                    }
                }
                Ok(true)
            }
        }
    }
}

/// Computes the closure of the functional constraint set: every piece of
/// every piecewise affine ḡᵢ at most zero, intersected with the domain
/// hulls; quadratic constraints fall back to symbolic membership.
pub fn closure_omega1(cp: &ConstrainedProblem) -> Result<ClosureOmega1, Error> {
    let dim = cp.dim();
    let gbars: Vec<LscFunction> = cp.constraints().iter().map(lsc_hull).collect();
    let quadratic = cp
        .constraints()
        .iter()
        .any(|g| matches!(g.base(), ConvexBase::Quadratic { .. }));
    if quadratic {
        return Ok(ClosureOmega1::Symbolic { dim, constraints: gbars });
    }
    let mut rows: Vec<LinearConstraint> = Vec::new();
    for gbar in &gbars {
        if let Some(p) = gbar.domain().polyhedron() {
            for r in p.rows() {
                push_unique(&mut rows, r);
            }
        }
        if let ConvexBase::MaxAffine { pieces } = gbar.base() {
            for piece in pieces {
                push_unique(
                    &mut rows,
                    &LinearConstraint::new(piece.clone(), Relation::Le),
                );
            }
        }
    }
    Ok(ClosureOmega1::Polyhedral(Polyhedron::new(dim, rows)?))
}

fn push_unique(rows: &mut Vec<LinearConstraint>, row: &LinearConstraint) {
    if !rows.contains(row) {
        rows.push(row.clone());
    }
}

/// Normal cone of the closed sublevel set Ω̄₁ at x̄: the sum of the cones
/// generated by ∂ḡᵢ(x̄) over the active constraints, {0} when none is
/// active. Requires every ḡᵢ continuous at x̄ and x̄ ∈ Ω̄₁.
pub fn normal_cone_sublevel(cp: &ConstrainedProblem, x: &[Rat]) -> Result<FGSet, Error> {
    let gbars: Vec<LscFunction> = cp.constraints().iter().map(lsc_hull).collect();
    let values = feasible_values(&gbars, x)?;
    require_continuity(&gbars, x)?;
    let mut cone = FGSet::cone(cp.dim(), Vec::new())?;
    for (i, v) in values.iter().enumerate() {
        if v.is_zero() {
            cone = fg_sum(&cone, &fg_cone(&gbars[i].subdiff(x)?)?)?;
        }
    }
    Ok(cone)
}

fn feasible_values(gbars: &[LscFunction], x: &[Rat]) -> Result<Vec<Rat>, Error> {
    let mut values = Vec::new();
    for gbar in gbars {
        match gbar.evaluate(x)? {
            ExtVal::Finite(v) if v <= rat_int(0) => values.push(v),
            _ => return Err(Error::PointNotFeasible),
        }
    }
    Ok(values)
}

fn require_continuity(gbars: &[LscFunction], x: &[Rat]) -> Result<(), Error> {
    for (i, gbar) in gbars.iter().enumerate() {
        if !gbar.continuous_at(x)? {
            return Err(Error::HypothesisViolated(format!(
                "constraint {i} is not continuous at the point"
            )));
        }
    }
    Ok(())
}

/// An exact Karush-Kuhn-Tucker certificate for the associated problem.
///
/// The weight groups decompose 0 = s_f + Σᵢ cᵢ + n with s_f ∈ ∂f̄(x̄)
/// (convex weights), cᵢ ∈ λᵢ∂ḡᵢ(x̄) (cone weights; λᵢ is the sum of the
/// point-generator weights), and n ∈ N(x̄; Ω̄₀).
#[derive(Debug, Clone)]
pub struct KKTCertificate {
    pub point: RatVec,
    /// Indices of constraints with ḡᵢ(x̄) = 0.
    pub active: Vec<usize>,
    /// One multiplier per constraint; zero for inactive constraints.
    pub lambdas: Vec<Rat>,
    pub objective_weights: FgWeights,
    /// Cone weights on ∂ḡᵢ(x̄) per active constraint, `None` when inactive.
    pub constraint_weights: Vec<Option<FgWeights>>,
    pub normal_weights: FgWeights,
}

/// Outcome of the multiplier search at a point.
#[derive(Debug, Clone)]
pub enum KKTOutcome {
    Certified(KKTCertificate),
    /// The certificate program is infeasible; the multipliers prove it.
    Refuted { multipliers: RatVec },
}

impl KKTOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, KKTOutcome::Certified(_))
    }
}

/// Searches for exact Lagrange multipliers certifying that x̄ solves the
/// associated problem, or refutes their existence. Requires the Slater
/// condition with a witness in ri(dom f), x̄ ∈ Ω̄₀ ∩ Ω̄₁ with f̄(x̄)
/// finite, and every ḡᵢ continuous at x̄; under these hypotheses the
/// refutation is exact, not just a failed search.
pub fn kkt_certify_associated(cp: &ConstrainedProblem, x: &[Rat]) -> Result<KKTOutcome, Error> {
    let slater = check_slater(cp)?;
    let SlaterOutcome::Holds { in_ri_dom_f, .. } = slater else {
        return Err(Error::HypothesisViolated(SLATER_FAILS.into()));
    };
    if !in_ri_dom_f {
        return Err(Error::HypothesisViolated(NO_RI_DOM_F_WITNESS.into()));
    }
    if !cp.geometric_set().closure().member(x)? {
        return Err(Error::PointNotFeasible);
    }
    let fbar = lsc_hull(cp.objective());
    let gbars: Vec<LscFunction> = cp.constraints().iter().map(lsc_hull).collect();
    let values = feasible_values(&gbars, x)?;
    if !fbar.evaluate(x)?.is_finite() {
        return Err(Error::PointNotInDomain);
    }
    require_continuity(&gbars, x)?;

    let active: Vec<usize> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_zero())
        .map(|(i, _)| i)
        .collect();
    let sub_f = fbar.subdiff(x)?;
    let mut sub_g: Vec<(usize, FGSet)> = Vec::new();
    for &i in &active {
        sub_g.push((i, gbars[i].subdiff(x)?));
    }
    let ncone = cp.geometric_set().closure().normal_cone(x)?;

    // One block of LP variables per generator family. `convex` blocks are
    // convex-combination weights summing to one; the rest are cone weights.
    struct Block<'a> {
        gens: &'a [RatVec],
        convex: bool,
    }
    let mut blocks: Vec<Block> = vec![
        Block { gens: sub_f.points(), convex: true },
        Block { gens: sub_f.rays(), convex: false },
    ];
    for (_, s) in &sub_g {
        blocks.push(Block { gens: s.points(), convex: false });
        blocks.push(Block { gens: s.rays(), convex: false });
    }
    blocks.push(Block { gens: ncone.points(), convex: true });
    blocks.push(Block { gens: ncone.rays(), convex: false });

    let dim = cp.dim();
    let nvars: usize = blocks.iter().map(|b| b.gens.len()).sum();
    let mut rows: Vec<LinearConstraint> = Vec::new();
    for c in 0..dim {
        let mut coeffs = zeros(nvars);
        let mut k = 0;
        for b in &blocks {
            for g in b.gens {
                coeffs[k] = g[c].clone();
                k += 1;
            }
        }
        rows.push(LinearConstraint::eq(coeffs, rat_int(0)));
    }
    let mut offset = 0;
    for b in &blocks {
        if b.convex {
            let mut coeffs = zeros(nvars);
            for c in coeffs.iter_mut().skip(offset).take(b.gens.len()) {
                *c = rat_int(1);
            }
            rows.push(LinearConstraint::eq(coeffs, rat_int(1)));
        }
        offset += b.gens.len();
    }
    for k in 0..nvars {
        let mut coeffs = zeros(nvars);
        coeffs[k] = rat_int(-1);
        rows.push(LinearConstraint::le(coeffs, rat_int(0)));
    }

    let w = match lp_solve(Sense::Minimize, &AffineForm::new(zeros(nvars), rat_int(0)), &rows)? {
        LpOutcome::Optimal { point, .. } => point,
        LpOutcome::Infeasible { multipliers } => {
            return Ok(KKTOutcome::Refuted { multipliers });
        }
        LpOutcome::Unbounded { .. } => {
            return Err(Error::Internal("feasibility program reported unbounded".into()));
        }
    };

    let zero = rat_int(0);
    let mut combo = zeros(dim);
    let mut k = 0;
    for b in &blocks {
        let mut total = rat_int(0);
        for g in b.gens {
            if w[k] < zero {
                return Err(Error::Internal("negative weight in multiplier certificate".into()));
            }
            total += w[k].clone();
            combo = vadd(&combo, &vscale(&w[k], g));
        }
        if b.convex && total != rat_int(1) {
            return Err(Error::Internal(
                "convex weights in multiplier certificate do not sum to one".into(),
            ));
        }
        k += b.gens.len();
    }
    if !is_zero_vec(&combo) {
        return Err(Error::Internal(
            "multiplier certificate weights do not reproduce the origin".into(),
        ));
    }

    let take = |cursor: &mut usize, n: usize| -> Vec<Rat> {
        let slice = w[*cursor..*cursor + n].to_vec();
        *cursor += n;
        slice
    };
    let mut cursor = 0;
    let objective_weights = FgWeights {
        point_weights: take(&mut cursor, sub_f.points().len()),
        ray_weights: take(&mut cursor, sub_f.rays().len()),
    };
    let m = cp.constraints().len();
    let mut lambdas = vec![rat_int(0); m];
    let mut constraint_weights: Vec<Option<FgWeights>> = vec![None; m];
    for (i, s) in &sub_g {
        let point_weights = take(&mut cursor, s.points().len());
        let ray_weights = take(&mut cursor, s.rays().len());
        lambdas[*i] = point_weights.iter().fold(rat_int(0), |acc, v| acc + v.clone());
        constraint_weights[*i] = Some(FgWeights { point_weights, ray_weights });
    }
    let normal_weights = FgWeights {
        point_weights: take(&mut cursor, ncone.points().len()),
        ray_weights: take(&mut cursor, ncone.rays().len()),
    };

    Ok(KKTOutcome::Certified(KKTCertificate {
        point: x.to_vec(),
        active,
        lambdas,
        objective_weights,
        constraint_weights,
        normal_weights,
    }))
}

/// Result of transferring an associated certificate to the original
/// problem. The multipliers always transfer as a necessary condition;
/// they are also sufficient exactly when the point lies in ri(dom f).
#[derive(Debug, Clone)]
pub struct KKTTransfer {
    pub sufficient: bool,
}

/// Transfers a certificate of the associated problem to the original one.
/// Requires the certified point to be feasible for the original problem
/// with finite objective value, and the objective and every constraint to
/// agree with their lsc hulls there; override points fail these checks.
pub fn kkt_transfer_original(
    cp: &ConstrainedProblem,
    cert: &KKTCertificate,
) -> Result<KKTTransfer, Error> {
    let x = &cert.point;
    if !cp.geometric_set().member(x)? {
        return Err(Error::PointNotFeasible);
    }
    let mut gvals = Vec::new();
    for g in cp.constraints() {
        match g.evaluate(x)? {
            ExtVal::Finite(v) if v <= rat_int(0) => gvals.push(v),
            _ => return Err(Error::PointNotFeasible),
        }
    }
    let fv = match cp.objective().evaluate(x)? {
        ExtVal::Finite(v) => v,
        ExtVal::PlusInf => return Err(Error::PointNotInDomain),
    };
    if lsc_hull(cp.objective()).evaluate(x)? != ExtVal::Finite(fv) {
        return Err(Error::HypothesisViolated(
            "the objective exceeds its lower semicontinuous hull at the point".into(),
        ));
    }
    for (i, g) in cp.constraints().iter().enumerate() {
        if lsc_hull(g).evaluate(x)? != ExtVal::Finite(gvals[i].clone()) {
            return Err(Error::HypothesisViolated(format!(
                "constraint {i} exceeds its lower semicontinuous hull at the point"
            )));
        }
    }
    Ok(KKTTransfer { sufficient: cp.objective().is_in_ri_dom(x)? })
}

/// Assembles the feasible set D = Ω₀ ∩ {x : gᵢ(x) ≤ 0} as a carved
/// polyhedron. Every constraint must be piecewise affine and the Slater
/// condition must hold; each sublevel set is carved from its piece rows
/// and domain hull, with domain cells and positive override cells
/// removed, then everything is intersected.
pub fn assemble_feasible_set(cp: &ConstrainedProblem) -> Result<CarvedPolyhedron, Error> {
    for g in cp.constraints() {
        if matches!(g.base(), ConvexBase::Quadratic { .. }) {
            return Err(Error::UnsupportedShape(
                "assembling the feasible set needs piecewise affine constraints".into(),
            ));
        }
    }
    if !check_slater(cp)?.holds() {
        return Err(Error::HypothesisViolated(SLATER_FAILS.into()));
    }
    let mut result = cp.geometric_set().clone();
    for g in cp.constraints() {
        result = intersect_carved(&result, &sublevel_carved(g)?)?;
    }
    Ok(result)
}

/// The sublevel set {x : g(x) ≤ 0} of one piecewise affine constraint.
fn sublevel_carved(g: &NCFunction) -> Result<CarvedPolyhedron, Error> {
    let ConvexBase::MaxAffine { pieces } = g.base() else {
        return Err(Error::UnsupportedShape(
            "sublevel carving needs a piecewise affine constraint".into(),
        ));
    };
    let mut rows: Vec<LinearConstraint> = Vec::new();
    let mut cells: Vec<Cell> = Vec::new();
    if let Some(dom) = g.domain().carved() {
        for r in dom.hull().rows() {
            push_unique(&mut rows, r);
        }
        cells.extend(dom.removed().iter().cloned());
    }
    for piece in pieces {
        push_unique(&mut rows, &LinearConstraint::new(piece.clone(), Relation::Le));
    }
    for ov in g.overrides() {
        let positive = match &ov.value {
            ExtVal::PlusInf => true,
            ExtVal::Finite(v) => *v > rat_int(0),
        };
        if positive {
            cells.push(ov.cell.clone());
        }
    }
    let dom_carrier = match g.domain().carved() {
        Some(dom) => CarvedPolyhedron::new(dom.hull().clone(), cells)?,
        None => {
            debug_assert!(cells.is_empty());
            CarvedPolyhedron::from_polyhedron(Polyhedron::new(g.dim(), Vec::new())?)
        }
    };
    let sublevel =
        CarvedPolyhedron::from_polyhedron(Polyhedron::new(g.dim(), rows)?);
    intersect_carved(&dom_carrier, &sublevel)
}

/// Outcome of solving a constrained problem.
#[derive(Debug, Clone)]
pub enum ConstrainedOutcome {
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
pub struct ConstrainedReport {
    pub witness: SlaterWitness,
    pub in_ri_dom_f: bool,
    pub outcome: ConstrainedOutcome,
}

/// Solves the constrained problem exactly under the Slater condition with
/// a witness in ri(dom f).
///
/// Piecewise affine constraints are folded into the feasible set and the
/// problem is solved as a geometric one. With quadratic constraints the
/// relaxation without them is solved first; if its entire solution set
/// provably satisfies every constraint, that solves the constrained
/// problem, and otherwise the constraint is reported unsolved rather than
/// approximated.
pub fn solve_constrained(cp: &ConstrainedProblem) -> Result<ConstrainedReport, Error> {
    solve_constrained_capped(cp, None)
}

/// Like [`solve_constrained`], with an explicit bound on how many active
/// sets a quadratic objective may enumerate before giving up.
pub fn solve_constrained_capped(
    cp: &ConstrainedProblem,
    max_active_sets: Option<u64>,
) -> Result<ConstrainedReport, Error> {
    let SlaterOutcome::Holds { witness, in_ri_dom_f } = check_slater(cp)? else {
        return Err(Error::HypothesisViolated(SLATER_FAILS.into()));
    };
    let quadratic = cp
        .constraints()
        .iter()
        .any(|g| matches!(g.base(), ConvexBase::Quadratic { .. }));
    let outcome = if quadratic {
        if !in_ri_dom_f {
            return Err(Error::HypothesisViolated(NO_RI_DOM_F_WITNESS.into()));
        }
        solve_via_relaxation(cp, max_active_sets)?
    } else {
        let omega1 = assemble_feasible_set(cp)?;
        let p = Problem::new(cp.objective().clone(), omega1)?;
        match solve_original_capped(&p, max_active_sets)?.status {
            SolveStatus::Optimal { value, associated_solutions, solutions } => {
                ConstrainedOutcome::Optimal { value, associated_solutions, solutions }
            }
            SolveStatus::Infeasible => ConstrainedOutcome::Infeasible,
            SolveStatus::Unbounded => ConstrainedOutcome::Unbounded,
        }
    };
    Ok(ConstrainedReport { witness, in_ri_dom_f, outcome })
}

fn solve_via_relaxation(
    cp: &ConstrainedProblem,
    max_active_sets: Option<u64>,
) -> Result<ConstrainedOutcome, Error> {
    let relaxed = Problem::new(
        cp.objective().clone(),
        CarvedPolyhedron::from_polyhedron(cp.geometric_set().closure().clone()),
    )?;
    let (value, s0) = match crate::opt::solve_associated_capped(&associate(&relaxed), max_active_sets)?
    {
        AssociatedOutcome::Optimal { value, minimizers } => (value, minimizers),
        AssociatedOutcome::Infeasible => return Ok(ConstrainedOutcome::Infeasible),
        AssociatedOutcome::Unbounded => {
            return Err(Error::QuadraticConstraintUnsolved(
                "the relaxation without functional constraints is unbounded".into(),
            ));
        }
    };
    let gbars: Vec<LscFunction> = cp.constraints().iter().map(lsc_hull).collect();
    verify_constraints_inactive(&gbars, &s0)?;

    let mut candidates: Vec<&Cell> = cp.geometric_set().removed().iter().collect();
    if let Some(dom) = cp.objective().domain().carved() {
        candidates.extend(dom.removed().iter());
    }
    for ov in cp.objective().overrides() {
        candidates.push(&ov.cell);
    }
    for g in cp.constraints() {
        if let Some(dom) = g.domain().carved() {
            candidates.extend(dom.removed().iter());
        }
        for ov in g.overrides() {
            let positive = match &ov.value {
                ExtVal::PlusInf => true,
                ExtVal::Finite(v) => *v > rat_int(0),
            };
            if positive {
                candidates.push(&ov.cell);
            }
        }
    }
    let solutions = diff_set_with_cells(&s0, candidates)?;
    Ok(ConstrainedOutcome::Optimal { value, associated_solutions: s0, solutions })
}

/// Proves ḡᵢ ≤ 0 on all of `s0`, constraint by constraint: the domain
/// hull rows must be implied, every affine piece must be at most zero,
/// and a quadratic constraint must be affine along the affine hull of
/// `s0` (Q annihilates its directions) with the restricted affine form at
/// most zero.
fn verify_constraints_inactive(gbars: &[LscFunction], s0: &Polyhedron) -> Result<(), Error> {
    let eqs: Vec<(RatVec, Rat)> = s0
        .ri_rows()
        .iter()
        .filter(|r| r.rel == Relation::Eq)
        .map(|r| (r.form.coeffs.clone(), -r.form.constant.clone()))
        .collect();
    let directions: Vec<RatVec> = match solve_linear_system(s0.dim(), &eqs)? {
        LinearSolution::Unique(_) => Vec::new(),
        LinearSolution::Parametric { basis, .. } => basis,
        LinearSolution::Inconsistent => {
            return Err(Error::Internal("solution set has inconsistent equality rows".into()));
        }
    };
    let unsolved = |i: usize| {
        Error::QuadraticConstraintUnsolved(format!(
            "constraint {i} cannot be proven inactive on the relaxed solution set"
        ))
    };
    for (i, gbar) in gbars.iter().enumerate() {
        if let Some(p) = gbar.domain().polyhedron() {
            for row in p.rows() {
                if !rows_imply_row(s0.rows(), row)? {
                    return Err(unsolved(i));
                }
            }
        }
        match gbar.base() {
            ConvexBase::MaxAffine { pieces } => {
                for piece in pieces {
                    let row = LinearConstraint::new(piece.clone(), Relation::Le);
                    if !rows_imply_row(s0.rows(), &row)? {
                        return Err(unsolved(i));
                    }
                }
            }
            ConvexBase::Quadratic { q, b, c } => {
                for d in &directions {
                    if !is_zero_vec(&mat_vec(q, d)) {
                        return Err(unsolved(i));
                    }
                }
                let xstar = s0.ri_witness()?;
                let grad = vadd(&vscale(&rat_int(2), &mat_vec(q, &xstar)), b);
                let gval = quad_form(q, &xstar) + dot(b, &xstar) + c.clone();
                let constant = gval - dot(&grad, &xstar);
                let row = LinearConstraint::new(AffineForm::new(grad, constant), Relation::Le);
                if !rows_imply_row(s0.rows(), &row)? {
                    return Err(unsolved(i));
                }
            }
        }
    }
    Ok(())
}
