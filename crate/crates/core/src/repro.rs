//! The embedded regression corpus: every instance the library is built
//! around, run end to end and compared against frozen expected values.
//!
//! Each row rebuilds one instance from scratch, runs the relevant solves
//! and certifications, and renders both the expected and the computed
//! results as short `label=value` strings with exact rationals. A row
//! matches when the two strings are equal, so a report is a faithful
//! regression table rather than a tolerance check.

use crate::affine::{AffineForm, LinearConstraint};
use crate::error::Error;
use crate::funcs::{ConvexBase, Domain, NCFunction, Override};
use crate::kkt::{
    check_slater, kkt_certify_associated, solve_constrained, ConstrainedOutcome,
    ConstrainedProblem, KKTOutcome, SlaterOutcome,
};
use crate::opt::{
    associate, check_regularity, classify_point, fermat_check, solve_associated, solve_original,
    AssociatedOutcome, Classification, Problem, SolveStatus,
};
use crate::oracle::{
    grid_local_minima, grid_min, ho_witness_test, GridSpec, HoOutcome, OracleSet,
};
use crate::rat::{point_display, rat, rat_display, rat_int, rat_parse, ExtVal, Rat, RatVec};
use crate::sets::{CarvedPolyhedron, Cell, Polyhedron};

/// One corpus row: the instance name and the rendered expected and
/// computed result strings.
#[derive(Debug, Clone)]
pub struct ReproRow {
    pub name: &'static str,
    pub expected: String,
    pub computed: String,
    pub matched: bool,
}

#[derive(Debug, Clone)]
pub struct ReproReport {
    pub rows: Vec<ReproRow>,
}

impl ReproReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matched)
    }
}

type Checks = Vec<(&'static str, String, String)>;

fn row(name: &'static str, checks: Checks) -> ReproRow {
    let expected = checks
        .iter()
        .map(|(label, want, _)| format!("{label}={want}"))
        .collect::<Vec<_>>()
        .join(" ");
    let computed = checks
        .iter()
        .map(|(label, _, got)| format!("{label}={got}"))
        .collect::<Vec<_>>()
        .join(" ");
    let matched = checks.iter().all(|(_, want, got)| want == got);
    ReproRow { name, expected, computed, matched }
}

/// Runs the whole corpus in its fixed declaration order.
pub fn run_corpus() -> Result<ReproReport, Error> {
    let rows = vec![
        halfplane_slit()?,
        box_edge_slot()?,
        rational_strip()?,
        disk_hole()?,
        disk_punched_open()?,
        slit_box_linear()?,
        halfplane_parabola()?,
        vee_on_notched_box_row()?,
        spiked_corner()?,
        spiked_corner_fermat()?,
        spiked_corner_solutions()?,
        notched_box_local_minima()?,
        capped_vee_locals()?,
        quadratic_kkt_showcase()?,
    ];
    Ok(ReproReport { rows })
}

fn ho_text(outcome: &HoOutcome) -> String {
    match outcome {
        HoOutcome::FoundWitness(t) => format!("witness({})", rat_display(t)),
        HoOutcome::NoneUpTo(levels) => format!("none_up_to({levels})"),
    }
}

fn ext_text(v: &ExtVal) -> String {
    match v {
        ExtVal::Finite(r) => rat_display(r),
        ExtVal::PlusInf => "inf".into(),
    }
}

fn classification_text(c: Classification) -> &'static str {
    match c {
        Classification::SolutionBoth => "solution_both",
        Classification::AssociatedOnly => "associated_only",
        Classification::NotSolution => "not_solution",
        Classification::Infeasible => "infeasible",
    }
}

fn le(coeffs: &[i64], rhs: i64) -> LinearConstraint {
    LinearConstraint::le(coeffs.iter().map(|&v| rat_int(v)).collect(), rat_int(rhs))
}

fn ler(coeffs: &[i64], rhs: Rat) -> LinearConstraint {
    LinearConstraint::le(coeffs.iter().map(|&v| rat_int(v)).collect(), rhs)
}

fn ltr(coeffs: &[i64], rhs: Rat) -> LinearConstraint {
    LinearConstraint::lt(coeffs.iter().map(|&v| rat_int(v)).collect(), rhs)
}

fn eqr(coeffs: &[i64], rhs: i64) -> LinearConstraint {
    LinearConstraint::eq(coeffs.iter().map(|&v| rat_int(v)).collect(), rat_int(rhs))
}

fn pt(coords: &[i64]) -> RatVec {
    coords.iter().map(|&v| rat_int(v)).collect()
}

fn ppt(coords: &[&str]) -> RatVec {
    coords.iter().map(|s| rat_parse(s).expect("corpus coordinate")).collect()
}

fn unit_box() -> Result<Polyhedron, Error> {
    Polyhedron::new(
        2,
        vec![le(&[-1, 0], 0), le(&[1, 0], 1), le(&[0, -1], 0), le(&[0, 1], 1)],
    )
}

fn unit_grid(step: Rat) -> Result<GridSpec, Error> {
    GridSpec::new(
        vec![(rat_int(0), rat_int(1)), (rat_int(0), rat_int(1))],
        step,
        30,
    )
}

fn vee_pieces() -> ConvexBase {
    ConvexBase::max_affine(vec![
        AffineForm::new(vec![rat_int(0), rat_int(1)], rat(-1, 2)),
        AffineForm::new(vec![rat_int(0), rat_int(-1)], rat(1, 2)),
    ])
}

/// Closed right halfplane with the open edge slot {0}×(−1, 1) removed:
/// nearly convex, with no segment witness toward (0, 1) from (0, −1).
fn halfplane_slit() -> Result<ReproRow, Error> {
    let hull = Polyhedron::new(2, vec![le(&[-1, 0], 0)])?;
    let slot = Cell::new(
        2,
        vec![eqr(&[1, 0], 0), ltr(&[0, -1], rat_int(1)), ltr(&[0, 1], rat_int(1))],
    )?;
    let set = OracleSet::Carved(CarvedPolyhedron::new(hull, vec![slot])?);
    let outcome = ho_witness_test(&set, &pt(&[0, -1]), &pt(&[0, 1]), 30)?;
    Ok(row(
        "halfplane_slit",
        vec![("segment_probe", "none_up_to(30)".into(), ho_text(&outcome))],
    ))
}

/// Unit box with the open slot {1}×(1/2, 3/4) removed from its right
/// edge; same verdict as the slit halfplane.
fn box_edge_slot() -> Result<ReproRow, Error> {
    let slot = Cell::new(
        2,
        vec![eqr(&[1, 0], 1), ltr(&[0, -1], rat(-1, 2)), ltr(&[0, 1], rat(3, 4))],
    )?;
    let set = OracleSet::Carved(CarvedPolyhedron::new(unit_box()?, vec![slot])?);
    let outcome = ho_witness_test(&set, &ppt(&["1", "1/2"]), &ppt(&["1", "3/4"]), 30)?;
    Ok(row(
        "box_edge_slot",
        vec![("segment_probe", "none_up_to(30)".into(), ho_text(&outcome))],
    ))
}

/// Rationals times a unit interval: every rational segment point stays
/// inside, so the very first probe is a witness.
fn rational_strip() -> Result<ReproRow, Error> {
    let set = OracleSet::Product(
        Box::new(OracleSet::Rationals { dim: 1 }),
        Box::new(OracleSet::Intervals { bounds: vec![(rat_int(0), rat_int(1))] }),
    );
    let outcome = ho_witness_test(&set, &pt(&[0, 0]), &pt(&[1, 1]), 30)?;
    Ok(row(
        "rational_strip",
        vec![("segment_probe", "witness(1/2)".into(), ho_text(&outcome))],
    ))
}

/// Radius-5 disk minus a closed unit disk at (2, 0): the segment from
/// (−1, 0) to (5, 0) leaves the hole at t = 1/4.
fn disk_hole() -> Result<ReproRow, Error> {
    let set = OracleSet::Intersection(vec![
        OracleSet::Ball { center: pt(&[0, 0]), radius_sq: rat_int(25), closed: true },
        OracleSet::Complement(Box::new(OracleSet::Ball {
            center: pt(&[2, 0]),
            radius_sq: rat_int(1),
            closed: true,
        })),
    ]);
    let outcome = ho_witness_test(&set, &pt(&[-1, 0]), &pt(&[5, 0]), 30)?;
    Ok(row("disk_hole", vec![("segment_probe", "witness(1/4)".into(), ho_text(&outcome))]))
}

/// Radius-4 disk intersected with the strict exterior of the same unit
/// disk; from the center toward (4, 0) the first witness is t = 1/8.
fn disk_punched_open() -> Result<ReproRow, Error> {
    let set = OracleSet::Intersection(vec![
        OracleSet::Ball { center: pt(&[0, 0]), radius_sq: rat_int(16), closed: true },
        OracleSet::Complement(Box::new(OracleSet::Ball {
            center: pt(&[2, 0]),
            radius_sq: rat_int(1),
            closed: true,
        })),
    ]);
    let outcome = ho_witness_test(&set, &pt(&[0, 0]), &pt(&[4, 0]), 30)?;
    Ok(row(
        "disk_punched_open",
        vec![("segment_probe", "witness(1/8)".into(), ho_text(&outcome))],
    ))
}

/// Minimize x1 over the unit box with the closed slit {0}×[1/4, 3/4]
/// removed: value 0 with a two-armed, non nearly convex solution set.
fn slit_box_linear() -> Result<ReproRow, Error> {
    let slit = Cell::new(
        2,
        vec![eqr(&[1, 0], 0), ler(&[0, -1], rat(-1, 4)), ler(&[0, 1], rat(3, 4))],
    )?;
    let d = CarvedPolyhedron::new(unit_box()?, vec![slit])?;
    let f = NCFunction::unrestricted(ConvexBase::affine(pt(&[1, 0]), rat_int(0)))?;
    let report = solve_original(&Problem::new(f, d)?)?;
    let SolveStatus::Optimal { value, solutions, .. } = report.status else {
        return Err(Error::Internal("slit box instance failed to solve".into()));
    };
    let mut checks: Checks = vec![("value", "0".into(), rat_display(&value))];
    let probes: [(&[&str; 2], bool); 9] = [
        (&["0", "0"], true),
        (&["0", "1/4"], false),
        (&["0", "1/5"], true),
        (&["0", "3/4"], false),
        (&["0", "4/5"], true),
        (&["0", "1"], true),
        (&["1/2", "0"], false),
        (&["0", "1/2"], false),
        (&["1", "1"], false),
    ];
    for (coords, want) in probes {
        let got = solutions.member(&ppt(coords))?;
        checks.push(("solution_member", want.to_string(), got.to_string()));
    }
    Ok(row("slit_box_linear", checks))
}

/// Minimize x1² + x1 over the right halfplane with the open slot
/// {0}×(−1, 1) removed: the solution set is the slotted vertical axis.
fn halfplane_parabola() -> Result<ReproRow, Error> {
    let hull = Polyhedron::new(2, vec![le(&[-1, 0], 0)])?;
    let slot = Cell::new(
        2,
        vec![eqr(&[1, 0], 0), ltr(&[0, -1], rat_int(1)), ltr(&[0, 1], rat_int(1))],
    )?;
    let d = CarvedPolyhedron::new(hull, vec![slot])?;
    let f = NCFunction::unrestricted(ConvexBase::quadratic(
        vec![pt(&[1, 0]), pt(&[0, 0])],
        pt(&[1, 0]),
        rat_int(0),
    ))?;
    let report = solve_original(&Problem::new(f, d)?)?;
    let SolveStatus::Optimal { value, associated_solutions, solutions } = report.status else {
        return Err(Error::Internal("slotted halfplane instance failed to solve".into()));
    };
    let axis = Polyhedron::new(2, vec![eqr(&[1, 0], 0)])?;
    let mut checks: Checks = vec![
        ("value", "0".into(), rat_display(&value)),
        (
            "associated_solutions_are_axis",
            "true".into(),
            associated_solutions.equivalent(&axis)?.to_string(),
        ),
    ];
    let probes: [(&[&str; 2], bool); 6] = [
        (&["0", "1"], true),
        (&["0", "-1"], true),
        (&["0", "2"], true),
        (&["0", "-2"], true),
        (&["0", "0"], false),
        (&["0", "1/2"], false),
    ];
    for (coords, want) in probes {
        let got = solutions.member(&ppt(coords))?;
        checks.push(("solution_member", want.to_string(), got.to_string()));
    }
    Ok(row("halfplane_parabola", checks))
}

/// The vee |x2 − 1/2| restricted to x1 ≤ 0, over the unit box with the
/// open notch {0}×(1/4, 2/3) removed from its left edge.
fn vee_on_notched_box() -> Result<(NCFunction, CarvedPolyhedron), Error> {
    let notch = Cell::new(
        2,
        vec![eqr(&[1, 0], 0), ltr(&[0, -1], rat(-1, 4)), ltr(&[0, 1], rat(2, 3))],
    )?;
    let d = CarvedPolyhedron::new(unit_box()?, vec![notch])?;
    let dom = CarvedPolyhedron::from_polyhedron(Polyhedron::new(2, vec![le(&[1, 0], 0)])?);
    let f = NCFunction::new(vee_pieces(), Domain::Carved(dom), vec![])?;
    Ok((f, d))
}

/// The notched-box vee is irregular: the original value 1/6 exceeds the
/// associated value 0, and only a grid bracket pins the former.
fn vee_on_notched_box_row() -> Result<ReproRow, Error> {
    let (f, d) = vee_on_notched_box()?;
    let p = Problem::new(f.clone(), d.clone())?;
    let regularity = check_regularity(&p)?;
    let AssociatedOutcome::Optimal { value, minimizers } = solve_associated(&associate(&p))?
    else {
        return Err(Error::Internal("notched box association failed to solve".into()));
    };
    let spec = unit_grid(rat(1, 128))?;
    let report = grid_min(&f, &d, &spec)?;
    let bracket = report.bracket();
    let sixth = ExtVal::Finite(rat(1, 6));
    let narrow = match bracket.width() {
        ExtVal::Finite(w) => w <= rat(1, 100),
        ExtVal::PlusInf => false,
    };
    Ok(row(
        "vee_on_notched_box",
        vec![
            ("regularity", "fails".into(), if regularity.holds() { "holds" } else { "fails" }.into()),
            ("associated_value", "0".into(), rat_display(&value)),
            (
                "associated_minimizer",
                "true".into(),
                minimizers.member(&ppt(&["0", "1/2"]))?.to_string(),
            ),
            ("grid_bracket_holds_sixth", "true".into(), bracket.contains(&sixth).to_string()),
            ("grid_bracket_narrow", "true".into(), narrow.to_string()),
            ("grid_minimum", "11/64".into(), ext_text(&report.minimum)),
        ],
    ))
}

/// Zero function spiked to 1 at the box corner (0, 0); the feasible set
/// is the full box.
fn spiked_corner_problem() -> Result<Problem, Error> {
    let spike = Cell::new(2, vec![eqr(&[1, 0], 0), eqr(&[0, 1], 0)])?;
    let f = NCFunction::new(
        ConvexBase::max_affine(vec![AffineForm::new(pt(&[0, 0]), rat_int(0))]),
        Domain::Carved(CarvedPolyhedron::from_polyhedron(unit_box()?)),
        vec![Override { cell: spike, value: ExtVal::Finite(rat_int(1)) }],
    )?;
    Problem::new(f, CarvedPolyhedron::from_polyhedron(unit_box()?))
}

/// The corner point solves the associated problem but not the original
/// one: the hull flattens the spike away.
fn spiked_corner() -> Result<ReproRow, Error> {
    let p = spiked_corner_problem()?;
    let fbar = crate::funcs::lsc_hull(p.objective());
    Ok(row(
        "spiked_corner",
        vec![
            (
                "regularity",
                "holds".into(),
                if check_regularity(&p)?.holds() { "holds" } else { "fails" }.into(),
            ),
            (
                "corner_class",
                "associated_only".into(),
                classification_text(classify_point(&p, &pt(&[0, 0]))?).into(),
            ),
            (
                "objective_at_corner",
                "1".into(),
                ext_text(&p.objective().evaluate(&pt(&[0, 0]))?),
            ),
            ("hull_at_corner", "0".into(), ext_text(&fbar.evaluate(&pt(&[0, 0]))?)),
        ],
    ))
}

/// Fermat certificates hold everywhere on the box except at the spiked
/// corner, where the subdifferential is empty.
fn spiked_corner_fermat() -> Result<ReproRow, Error> {
    let p = spiked_corner_problem()?;
    let mut checks: Checks = Vec::new();
    for coords in [["1", "0"], ["0", "1"], ["1", "1"], ["1/2", "1/2"], ["0", "1/2"]] {
        let cert = fermat_check(&p, &ppt(&coords))?;
        checks.push(("certified", "true".into(), cert.holds.to_string()));
    }
    let corner = fermat_check(&p, &pt(&[0, 0]))?;
    checks.push(("corner_certified", "false".into(), corner.holds.to_string()));
    Ok(row("spiked_corner_fermat", checks))
}

/// The associated solution set is the whole box; the original solution
/// set drops exactly the spiked corner.
fn spiked_corner_solutions() -> Result<ReproRow, Error> {
    let p = spiked_corner_problem()?;
    let report = solve_original(&p)?;
    let SolveStatus::Optimal { value, associated_solutions, solutions } = report.status else {
        return Err(Error::Internal("spiked corner instance failed to solve".into()));
    };
    Ok(row(
        "spiked_corner_solutions",
        vec![
            ("value", "0".into(), rat_display(&value)),
            (
                "associated_solutions_are_box",
                "true".into(),
                associated_solutions.equivalent(&unit_box()?)?.to_string(),
            ),
            ("cells_dropped", "1".into(), solutions.removed.len().to_string()),
            (
                "corner_in_solutions",
                "false".into(),
                solutions.member(&pt(&[0, 0]))?.to_string(),
            ),
            (
                "interior_in_solutions",
                "true".into(),
                solutions.member(&ppt(&["1/2", "1/2"]))?.to_string(),
            ),
            (
                "edge_in_solutions",
                "true".into(),
                solutions.member(&ppt(&["0", "1/2"]))?.to_string(),
            ),
        ],
    ))
}

/// The notched-box vee has two grid-local plateaus with distinct values:
/// the global one near the notch top and a strictly worse one at its
/// bottom lip.
fn notched_box_local_minima() -> Result<ReproRow, Error> {
    let (f, d) = vee_on_notched_box()?;
    let spec = unit_grid(rat(1, 64))?;
    let clusters = grid_local_minima(&f, &d, &spec)?;
    let finite: Vec<_> = clusters.iter().filter(|c| c.value.is_finite()).collect();
    let mut checks: Checks =
        vec![("finite_clusters", "2".into(), finite.len().to_string())];
    if finite.len() == 2 {
        checks.push(("global_value", "11/64".into(), ext_text(&finite[0].value)));
        checks.push((
            "global_representative",
            "(0, 43/64)".into(),
            point_display(&finite[0].representative),
        ));
        checks.push(("local_value", "1/4".into(), ext_text(&finite[1].value)));
        checks.push((
            "local_representative",
            "(0, 1/4)".into(),
            point_display(&finite[1].representative),
        ));
    }
    Ok(row("notched_box_local_minima", checks))
}

/// The vee capped at x2 = 3/4 over the notched box is regular, solves to
/// 0 on a horizontal segment, and keeps an infinite-value plateau of
/// local non-global points above the cap.
fn capped_vee_locals() -> Result<ReproRow, Error> {
    let notch = Cell::new(
        2,
        vec![eqr(&[1, 0], 0), ltr(&[0, -1], rat(-1, 4)), ltr(&[0, 1], rat(2, 3))],
    )?;
    let d = CarvedPolyhedron::new(unit_box()?, vec![notch])?;
    let dom = CarvedPolyhedron::from_polyhedron(Polyhedron::new(
        2,
        vec![ler(&[0, 1], rat(3, 4))],
    )?);
    let f = NCFunction::new(vee_pieces(), Domain::Carved(dom), vec![])?;
    let p = Problem::new(f.clone(), d.clone())?;
    let report = solve_original(&p)?;
    let SolveStatus::Optimal { value, associated_solutions, solutions } = report.status else {
        return Err(Error::Internal("capped vee instance failed to solve".into()));
    };
    let stripe = Polyhedron::new(
        2,
        vec![eqr(&[0, 2], 1), le(&[-1, 0], 0), le(&[1, 0], 1)],
    )?;
    let clusters = grid_local_minima(&f, &d, &unit_grid(rat(1, 8))?)?;
    let finite: Vec<_> = clusters.iter().filter(|c| c.value.is_finite()).collect();
    let infinite = clusters.len() - finite.len();
    Ok(row(
        "capped_vee_locals",
        vec![
            (
                "regularity",
                "holds".into(),
                if report.regularity.holds() { "holds" } else { "fails" }.into(),
            ),
            ("value", "0".into(), rat_display(&value)),
            (
                "associated_solutions_are_stripe",
                "true".into(),
                associated_solutions.equivalent(&stripe)?.to_string(),
            ),
            (
                "right_end_in_solutions",
                "true".into(),
                solutions.member(&ppt(&["1", "1/2"]))?.to_string(),
            ),
            (
                "middle_in_solutions",
                "true".into(),
                solutions.member(&ppt(&["1/2", "1/2"]))?.to_string(),
            ),
            (
                "notched_end_in_solutions",
                "false".into(),
                solutions.member(&ppt(&["0", "1/2"]))?.to_string(),
            ),
            ("finite_clusters", "1".into(), finite.len().to_string()),
            (
                "finite_cluster_value",
                "0".into(),
                finite.first().map_or("missing".into(), |c| ext_text(&c.value)),
            ),
            ("infinite_clusters", "1".into(), infinite.to_string()),
        ],
    ))
}

/// Quadratic objective x1² − x1 over the double-notched box under the
/// quadratic constraint x1² − 3x1 + x2 ≤ 0, with a Slater hint.
fn quadratic_kkt_showcase() -> Result<ReproRow, Error> {
    let f = NCFunction::unrestricted(ConvexBase::quadratic(
        vec![pt(&[1, 0]), pt(&[0, 0])],
        pt(&[-1, 0]),
        rat_int(0),
    ))?;
    let g = NCFunction::unrestricted(ConvexBase::quadratic(
        vec![pt(&[1, 0]), pt(&[0, 0])],
        pt(&[-3, 1]),
        rat_int(0),
    ))?;
    let vertical = Cell::new(
        2,
        vec![eqr(&[1, 0], 0), ltr(&[0, -1], rat(-1, 4)), ltr(&[0, 1], rat(2, 3))],
    )?;
    let horizontal = Cell::new(
        2,
        vec![eqr(&[0, 1], 0), ltr(&[-1, 0], rat(-1, 4)), ltr(&[1, 0], rat(2, 3))],
    )?;
    let omega0 = CarvedPolyhedron::new(unit_box()?, vec![vertical, horizontal])?;
    let cp = ConstrainedProblem::new(f, omega0, vec![g], Some(ppt(&["1/2", "1/2"])))?;

    let slater = check_slater(&cp)?;
    let margin = match &slater {
        SlaterOutcome::Holds { witness, .. } => rat_display(&witness.margins[0]),
        SlaterOutcome::Fails { .. } => "failed".into(),
    };
    let mut checks: Checks = vec![("slater_margin", "3/4".into(), margin)];

    for coords in [["1/2", "0"], ["1/2", "1/2"], ["1/2", "1"]] {
        let outcome = kkt_certify_associated(&cp, &ppt(&coords))?;
        let got = match outcome {
            KKTOutcome::Certified(cert) => format!("lambda={}", rat_display(&cert.lambdas[0])),
            KKTOutcome::Refuted { .. } => "refuted".into(),
        };
        checks.push(("segment_certificate", "lambda=0".into(), got));
    }
    for coords in [["0", "0"], ["1", "1"]] {
        let outcome = kkt_certify_associated(&cp, &ppt(&coords))?;
        let got = if outcome.is_certified() { "certified" } else { "refuted" };
        checks.push(("corner_certificate", "refuted".into(), got.into()));
    }

    let report = solve_constrained(&cp)?;
    let ConstrainedOutcome::Optimal { value, associated_solutions, solutions } = report.outcome
    else {
        return Err(Error::Internal("constrained showcase failed to solve".into()));
    };
    let segment = Polyhedron::new(
        2,
        vec![eqr(&[2, 0], 1), le(&[0, -1], 0), le(&[0, 1], 1)],
    )?;
    checks.push(("value", "-1/4".into(), rat_display(&value)));
    checks.push((
        "associated_solutions_are_segment",
        "true".into(),
        associated_solutions.equivalent(&segment)?.to_string(),
    ));
    checks.push((
        "bottom_end_in_solutions",
        "false".into(),
        solutions.member(&ppt(&["1/2", "0"]))?.to_string(),
    ));
    checks.push((
        "near_bottom_in_solutions",
        "true".into(),
        solutions.member(&ppt(&["1/2", "1/100"]))?.to_string(),
    ));
    checks.push((
        "top_end_in_solutions",
        "true".into(),
        solutions.member(&ppt(&["1/2", "1"]))?.to_string(),
    ));
    Ok(row("quadratic_kkt_showcase", checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_runs_clean() {
        let report = run_corpus().unwrap();
        assert_eq!(report.rows.len(), 14);
        for row in &report.rows {
            assert!(row.matched, "{}: expected [{}] got [{}]", row.name, row.expected, row.computed);
        }
        assert!(report.all_match());
    }

    #[test]
    fn corpus_order_is_stable() {
        let names: Vec<&str> = run_corpus().unwrap().rows.iter().map(|r| r.name).collect();
        assert_eq!(
            names,
            vec![
                "halfplane_slit",
                "box_edge_slot",
                "rational_strip",
                "disk_hole",
                "disk_punched_open",
                "slit_box_linear",
                "halfplane_parabola",
                "vee_on_notched_box",
                "spiked_corner",
                "spiked_corner_fermat",
                "spiked_corner_solutions",
                "notched_box_local_minima",
                "capped_vee_locals",
                "quadratic_kkt_showcase"
            ]
        );
    }
}
