//! Shared fixtures and randomized instance generators for the integration
//! suites. Every generator draws from a caller-seeded ChaCha stream so each
//! suite replays the exact same instances on every run.

#![allow(dead_code)]

use carvex::kkt::{check_slater, ConstrainedProblem};
use carvex::lp::{lp_solve, lp_strict_feasible, LpOutcome, Sense, StrictOutcome};
use carvex::opt::{associate, solve_associated, AssociatedOutcome, Problem};
use carvex::oracle::{GridSpec, OracleSet};
use carvex::rat::{dot, lerp, rat, rat_int, vadd, vsub, zeros, ExtVal, Rat, RatVec};
use carvex::{
    fg_cone, fg_equal, fg_sum, fn_max, fn_sum, intersect_carved, AffineForm, CarvedPolyhedron,
    Cell, ConvexBase, Domain, FGSet, LinearConstraint, NCFunction, Polyhedron,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn le(coeffs: &[i64], rhs: i64) -> LinearConstraint {
    LinearConstraint::le(coeffs.iter().map(|&c| rat_int(c)).collect(), rat_int(rhs))
}

pub fn ler(coeffs: &[i64], rhs: Rat) -> LinearConstraint {
    LinearConstraint::le(coeffs.iter().map(|&c| rat_int(c)).collect(), rhs)
}

pub fn ltr(coeffs: &[i64], rhs: Rat) -> LinearConstraint {
    LinearConstraint::lt(coeffs.iter().map(|&c| rat_int(c)).collect(), rhs)
}

pub fn eqr(coeffs: &[i64], rhs: i64) -> LinearConstraint {
    LinearConstraint::eq(coeffs.iter().map(|&c| rat_int(c)).collect(), rat_int(rhs))
}

pub fn pt(coords: &[i64]) -> RatVec {
    coords.iter().map(|&c| rat_int(c)).collect()
}

pub fn ppt(coords: &[&str]) -> RatVec {
    coords.iter().map(|s| carvex::rat::rat_parse(s).unwrap()).collect()
}

pub fn unit_box() -> Polyhedron {
    Polyhedron::new(
        2,
        vec![le(&[-1, 0], 0), le(&[1, 0], 1), le(&[0, -1], 0), le(&[0, 1], 1)],
    )
    .unwrap()
}

pub fn vee_pieces() -> ConvexBase {
    ConvexBase::max_affine(vec![
        AffineForm::new(vec![rat_int(0), rat_int(1)], rat(-1, 2)),
        AffineForm::new(vec![rat_int(0), rat_int(-1)], rat(1, 2)),
    ])
}

/// Minimize x1 over the unit box with the closed slit {0}×[1/4, 3/4]
/// removed from its left edge.
pub fn slit_box_problem() -> Problem {
    let slit = Cell::new(
        2,
        vec![eqr(&[1, 0], 0), ler(&[0, -1], rat(-1, 4)), ler(&[0, 1], rat(3, 4))],
    )
    .unwrap();
    let d = CarvedPolyhedron::new(unit_box(), vec![slit]).unwrap();
    let f = NCFunction::unrestricted(ConvexBase::affine(pt(&[1, 0]), rat_int(0))).unwrap();
    Problem::new(f, d).unwrap()
}

/// Minimize x1² + x1 over the closed right halfplane with the open slot
/// {0}×(−1, 1) removed from its edge.
pub fn halfplane_parabola_problem() -> Problem {
    let hull = Polyhedron::new(2, vec![le(&[-1, 0], 0)]).unwrap();
    let slot = Cell::new(
        2,
        vec![eqr(&[1, 0], 0), ltr(&[0, -1], rat_int(1)), ltr(&[0, 1], rat_int(1))],
    )
    .unwrap();
    let d = CarvedPolyhedron::new(hull, vec![slot]).unwrap();
    let f = NCFunction::unrestricted(ConvexBase::quadratic(
        vec![pt(&[1, 0]), pt(&[0, 0])],
        pt(&[1, 0]),
        rat_int(0),
    ))
    .unwrap();
    Problem::new(f, d).unwrap()
}

/// The vee |x2 − 1/2| restricted to x1 ≤ 0, over the unit box with the
/// open notch {0}×(1/4, 2/3) removed from its left edge.
pub fn vee_on_notched_box() -> (NCFunction, CarvedPolyhedron) {
    let notch = Cell::new(
        2,
        vec![eqr(&[1, 0], 0), ltr(&[0, -1], rat(-1, 4)), ltr(&[0, 1], rat(2, 3))],
    )
    .unwrap();
    let d = CarvedPolyhedron::new(unit_box(), vec![notch]).unwrap();
    let dom = CarvedPolyhedron::from_polyhedron(Polyhedron::new(2, vec![le(&[1, 0], 0)]).unwrap());
    let f = NCFunction::new(vee_pieces(), Domain::Carved(dom), vec![]).unwrap();
    (f, d)
}

/// The zero function spiked to 1 at the box corner (0, 0), minimized over
/// the full unit box.
pub fn spiked_corner_problem() -> Problem {
    let spike = Cell::new(2, vec![eqr(&[1, 0], 0), eqr(&[0, 1], 0)]).unwrap();
    let f = NCFunction::new(
        ConvexBase::max_affine(vec![AffineForm::new(pt(&[0, 0]), rat_int(0))]),
        Domain::Carved(CarvedPolyhedron::from_polyhedron(unit_box())),
        vec![carvex::Override { cell: spike, value: ExtVal::Finite(rat_int(1)) }],
    )
    .unwrap();
    Problem::new(f, CarvedPolyhedron::from_polyhedron(unit_box())).unwrap()
}

/// Quadratic objective x1² − x1 over the double-notched unit box under the
/// quadratic constraint x1² − 3x1 + x2 ≤ 0, with a strictly feasible hint.
pub fn quadratic_showcase_problem() -> ConstrainedProblem {
    let f = NCFunction::unrestricted(ConvexBase::quadratic(
        vec![pt(&[1, 0]), pt(&[0, 0])],
        pt(&[-1, 0]),
        rat_int(0),
    ))
    .unwrap();
    let g = NCFunction::unrestricted(ConvexBase::quadratic(
        vec![pt(&[1, 0]), pt(&[0, 0])],
        pt(&[-3, 1]),
        rat_int(0),
    ))
    .unwrap();
    let vertical = Cell::new(
        2,
        vec![eqr(&[1, 0], 0), ltr(&[0, -1], rat(-1, 4)), ltr(&[0, 1], rat(2, 3))],
    )
    .unwrap();
    let horizontal = Cell::new(
        2,
        vec![eqr(&[0, 1], 0), ltr(&[-1, 0], rat(-1, 4)), ltr(&[1, 0], rat(2, 3))],
    )
    .unwrap();
    let omega0 = CarvedPolyhedron::new(unit_box(), vec![vertical, horizontal]).unwrap();
    ConstrainedProblem::new(f, omega0, vec![g], Some(ppt(&["1/2", "1/2"]))).unwrap()
}

/// The closed right halfplane with the open edge slot {0}×(−1, 1) removed.
pub fn halfplane_slit_set() -> OracleSet {
    let hull = Polyhedron::new(2, vec![le(&[-1, 0], 0)]).unwrap();
    let slot = Cell::new(
        2,
        vec![eqr(&[1, 0], 0), ltr(&[0, -1], rat_int(1)), ltr(&[0, 1], rat_int(1))],
    )
    .unwrap();
    OracleSet::Carved(CarvedPolyhedron::new(hull, vec![slot]).unwrap())
}

/// The unit box with the open slot {1}×(1/2, 3/4) removed from its right
/// edge.
pub fn box_edge_slot_set() -> OracleSet {
    let slot = Cell::new(
        2,
        vec![eqr(&[1, 0], 1), ltr(&[0, -1], rat(-1, 2)), ltr(&[0, 1], rat(3, 4))],
    )
    .unwrap();
    OracleSet::Carved(CarvedPolyhedron::new(unit_box(), vec![slot]).unwrap())
}

/// The rational line times the closed unit interval.
pub fn rational_strip_set() -> OracleSet {
    OracleSet::Product(
        Box::new(OracleSet::Rationals { dim: 1 }),
        Box::new(OracleSet::Intervals { bounds: vec![(rat_int(0), rat_int(1))] }),
    )
}

/// The radius-5 disk minus the closed unit disk at (2, 0).
pub fn disk_hole_set() -> OracleSet {
    OracleSet::Intersection(vec![
        OracleSet::Ball { center: pt(&[0, 0]), radius_sq: rat_int(25), closed: true },
        OracleSet::Complement(Box::new(OracleSet::Ball {
            center: pt(&[2, 0]),
            radius_sq: rat_int(1),
            closed: true,
        })),
    ])
}

/// The radius-4 disk minus the same closed unit disk, probed from its
/// center.
pub fn disk_punched_open_set() -> OracleSet {
    OracleSet::Intersection(vec![
        OracleSet::Ball { center: pt(&[0, 0]), radius_sq: rat_int(16), closed: true },
        OracleSet::Complement(Box::new(OracleSet::Ball {
            center: pt(&[2, 0]),
            radius_sq: rat_int(1),
            closed: true,
        })),
    ])
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational with numerator in `-span..=span` over one of the given
/// denominators.
pub fn rand_rat(rng: &mut ChaCha8Rng, span: i64, dens: &[i64]) -> Rat {
    let den = dens[rng.gen_range(0..dens.len())];
    rat(rng.gen_range(-span..=span), den)
}

pub fn rand_point(rng: &mut ChaCha8Rng, dim: usize, span: i64, dens: &[i64]) -> RatVec {
    (0..dim).map(|_| rand_rat(rng, span, dens)).collect()
}

/// A nonzero integer vector with entries in `-span..=span`.
pub fn rand_direction(rng: &mut ChaCha8Rng, dim: usize, span: i64) -> RatVec {
    loop {
        let a: Vec<i64> = (0..dim).map(|_| rng.gen_range(-span..=span)).collect();
        if a.iter().any(|&c| c != 0) {
            return a.iter().map(|&c| rat_int(c)).collect();
        }
    }
}

fn halfspace_through_margin(rng: &mut ChaCha8Rng, w: &[Rat], margin: Rat) -> LinearConstraint {
    let a = rand_direction(rng, w.len(), 2);
    let rhs = dot(&a, w) + margin;
    LinearConstraint::le(a, rhs)
}

/// A bounded polyhedron holding `w` strictly inside: a box of integer
/// half-widths around `w` plus `extra` random halfspaces with slack at `w`.
pub fn rand_polyhedron_around(
    rng: &mut ChaCha8Rng,
    w: &[Rat],
    extra: usize,
) -> Polyhedron {
    let dim = w.len();
    let mut rows = Vec::new();
    for i in 0..dim {
        let mut e = vec![0i64; dim];
        e[i] = 1;
        let hi = rat_int(rng.gen_range(1..=2));
        let lo = rat_int(rng.gen_range(1..=2));
        rows.push(LinearConstraint::le(
            e.iter().map(|&c| rat_int(c)).collect(),
            w[i].clone() + hi,
        ));
        rows.push(LinearConstraint::le(
            e.iter().map(|&c| rat_int(-c)).collect(),
            -(w[i].clone() - lo),
        ));
    }
    for _ in 0..extra {
        let margin = rat(rng.gen_range(1..=4), 2);
        rows.push(halfspace_through_margin(rng, w, margin));
    }
    Polyhedron::new(dim, rows).unwrap()
}

/// Tries to carve a thin open cell out of the face `x1 = hi` of `hull`,
/// centered on `w` in the remaining coordinates. Falls back to the plain
/// hull when the candidate fails the carving invariants, which happens
/// whenever an extra halfspace cuts through the candidate face.
pub fn carve_face_cell(hull: Polyhedron, w: &[Rat]) -> CarvedPolyhedron {
    let dim = w.len();
    let hi = hull
        .rows()
        .iter()
        .find(|r| {
            r.form.coeffs[0] == rat_int(1)
                && r.form.coeffs[1..].iter().all(|c| c == &rat_int(0))
        })
        .map(|r| -r.form.constant.clone());
    let Some(hi) = hi else {
        return CarvedPolyhedron::from_polyhedron(hull);
    };
    let mut rows = vec![LinearConstraint::eq(
        std::iter::once(rat_int(1)).chain((1..dim).map(|_| rat_int(0))).collect(),
        hi,
    )];
    for j in 1..dim {
        let mut e = vec![rat_int(0); dim];
        e[j] = rat_int(1);
        rows.push(LinearConstraint::lt(e.clone(), w[j].clone() + rat(1, 8)));
        e[j] = rat_int(-1);
        rows.push(LinearConstraint::lt(e, -(w[j].clone() - rat(1, 8))));
    }
    match Cell::new(dim, rows)
        .and_then(|cell| CarvedPolyhedron::new(hull.clone(), vec![cell]))
    {
        Ok(carved) => carved,
        Err(_) => CarvedPolyhedron::from_polyhedron(hull),
    }
}

/// A vertex of `rows` found by minimizing a random linear objective.
pub fn rand_vertex(rng: &mut ChaCha8Rng, dim: usize, rows: &[LinearConstraint]) -> RatVec {
    let c = rand_direction(rng, dim, 3);
    match lp_solve(Sense::Minimize, &AffineForm::new(c, rat_int(0)), rows).unwrap() {
        LpOutcome::Optimal { point, .. } => point,
        other => panic!("bounded feasible system failed to solve: {other:?}"),
    }
}

/// A random convex piecewise-linear function given by `k` affine pieces
/// with integer gradients and small rational constants.
pub fn rand_max_affine(rng: &mut ChaCha8Rng, dim: usize, k: usize) -> Vec<AffineForm> {
    (0..k)
        .map(|_| AffineForm::new(rand_direction(rng, dim, 3), rand_rat(rng, 2, &[1, 2, 4])))
        .collect()
}

/// Minimize a separable convex piecewise-linear function over an axis box
/// `[0, bx]×[0, by]` carved by up to two open cells placed strictly inside
/// single grid intervals on the box faces. The cells contain no point of
/// the returned grid, so the grid restricted to the carved set is the full
/// box grid; the objective is everywhere finite, so the regularity
/// condition holds by construction.
pub fn separable_box_instance(rng: &mut ChaCha8Rng) -> (Problem, GridSpec) {
    let step = rat(1, 8);
    let bx = rng.gen_range(1..=2i64);
    let by = rng.gen_range(1..=2i64);
    let hull = Polyhedron::new(
        2,
        vec![le(&[-1, 0], 0), le(&[1, 0], bx), le(&[0, -1], 0), le(&[0, 1], by)],
    )
    .unwrap();

    let k1 = rng.gen_range(1..=3);
    let k2 = rng.gen_range(1..=3);
    let g1 = rand_max_affine(rng, 1, k1);
    let g2 = rand_max_affine(rng, 1, k2);
    let mut pieces = Vec::new();
    for p in &g1 {
        for q in &g2 {
            pieces.push(AffineForm::new(
                vec![p.coeffs[0].clone(), q.coeffs[0].clone()],
                p.constant.clone() + q.constant.clone(),
            ));
        }
    }
    let f = NCFunction::unrestricted(ConvexBase::max_affine(pieces)).unwrap();

    let mut cells = Vec::new();
    let mut taken = Vec::new();
    for _ in 0..rng.gen_range(0..=2usize) {
        let face = rng.gen_range(0..4usize);
        let extent = if face < 2 { by } else { bx };
        let slot = rng.gen_range(0..extent * 8);
        if taken.contains(&(face, slot)) {
            continue;
        }
        taken.push((face, slot));
        let lo = rat(slot, 1) * step.clone() + step.clone() / rat_int(3);
        let hi = rat(slot, 1) * step.clone() + step.clone() * rat(2, 3);
        let (eq_row, free) = match face {
            0 => (eqr(&[1, 0], 0), 1),
            1 => (eqr(&[1, 0], bx), 1),
            2 => (eqr(&[0, 1], 0), 0),
            _ => (eqr(&[0, 1], by), 0),
        };
        let mut e = vec![0i64; 2];
        e[free] = 1;
        let upper = ltr(&e, hi);
        e[free] = -1;
        let lower = ltr(&e, -lo);
        cells.push(Cell::new(2, vec![eq_row, lower, upper]).unwrap());
    }

    let d = CarvedPolyhedron::new(hull, cells).unwrap();
    let spec = GridSpec::new(
        vec![(rat_int(0), rat_int(bx)), (rat_int(0), rat_int(by))],
        step,
        30,
    )
    .unwrap();
    (Problem::new(f, d).unwrap(), spec)
}

fn assert_fg_equal(got: &FGSet, want: &FGSet, context: &str) {
    assert!(
        fg_equal(got, want).unwrap(),
        "{context}: sets differ\n  got:  {got:?}\n  want: {want:?}"
    );
}

/// Normal cones of an intersection add generator-wise when the relative
/// interiors overlap, on and off the carved sets alike.
pub fn suite_intersection_normal_cones(seed: u64, instances: usize) {
    let mut rng = seeded(seed);
    for i in 0..instances {
        let dim = if i % 3 == 0 { 3 } else { 2 };
        let w = rand_point(&mut rng, dim, 2, &[1, 2]);
        let extra = rng.gen_range(0..=2);
        let p1 = rand_polyhedron_around(&mut rng, &w, extra);
        let sides = rng.gen_range(1..=3);
        let p2 = Polyhedron::new(
            dim,
            (0..sides)
                .map(|_| {
                    let margin = rat(rng.gen_range(1..=4), 2);
                    halfspace_through_margin(&mut rng, &w, margin)
                })
                .collect(),
        )
        .unwrap();
        let c1 = carve_face_cell(p1.clone(), &w);
        let c2 = CarvedPolyhedron::from_polyhedron(p2.clone());

        let mut combined_rows = p1.rows().to_vec();
        combined_rows.extend_from_slice(p2.rows());
        let x = rand_vertex(&mut rng, dim, &combined_rows);

        let n1 = c1.normal_cone(&x).unwrap();
        let n2 = c2.normal_cone(&x).unwrap();
        let expected = fg_sum(&n1, &n2).unwrap();
        let combined = intersect_carved(&c1, &c2).unwrap();
        let got = combined.normal_cone(&x).unwrap();
        assert_fg_equal(&got, &expected, &format!("instance {i}: carved intersection at {x:?}"));

        if c1.member(&x).unwrap() && c2.member(&x).unwrap() {
            let joint = Polyhedron::new(dim, combined_rows).unwrap();
            assert_fg_equal(
                &joint.normal_cone(&x).unwrap(),
                &expected,
                &format!("instance {i}: row-union polyhedron at {x:?}"),
            );
        }
    }
}

/// The open segment from a relative-interior point to any closure point
/// stays in the relative interior, cells or no cells.
pub fn suite_segment_reaches_relative_interior(seed: u64, instances: usize) {
    let mut rng = seeded(seed);
    let stops: [(i64, i64); 5] = [(1, 7), (1, 3), (1, 2), (5, 7), (63, 64)];
    for i in 0..instances {
        let dim = if i % 3 == 2 { 3 } else { 2 };
        let w = rand_point(&mut rng, dim, 2, &[1, 2]);
        let extra = rng.gen_range(0..=2);
        let hull = rand_polyhedron_around(&mut rng, &w, extra);
        let carved = carve_face_cell(hull.clone(), &w);
        let a = carved.ri_witness().unwrap();
        let b = rand_vertex(&mut rng, dim, hull.rows());
        for (n, d) in stops {
            let x = lerp(&a, &b, &rat(n, d));
            assert!(
                carved.ri_member(&x).unwrap(),
                "instance {i}: point at t={n}/{d} between {a:?} and {b:?} left the relative interior"
            );
        }
    }
}

fn rand_pl_function(rng: &mut ChaCha8Rng, w: &[Rat]) -> NCFunction {
    let dim = w.len();
    let k = rng.gen_range(1..=3);
    let pieces = rand_max_affine(rng, dim, k);
    let domain = match rng.gen_range(0..3) {
        0 => Domain::Full { dim },
        _ => {
            let margin = rat(rng.gen_range(1..=4), 2);
            let row = halfspace_through_margin(rng, w, margin);
            Domain::Carved(CarvedPolyhedron::from_polyhedron(
                Polyhedron::new(dim, vec![row]).unwrap(),
            ))
        }
    };
    NCFunction::new(ConvexBase::max_affine(pieces), domain, vec![]).unwrap()
}

fn full_space_copy(f: &NCFunction) -> NCFunction {
    NCFunction::unrestricted(f.base().clone()).unwrap()
}

/// The perpendicular foot of `w` on the hyperplane bounding `row`, which
/// sits on the domain boundary whenever `w` satisfies the row.
fn boundary_foot(row: &LinearConstraint, w: &[Rat]) -> RatVec {
    let a = &row.form.coeffs;
    let t = (-row.form.constant.clone() - dot(a, w)) / dot(a, a);
    vadd(w, &carvex::rat::vscale(&t, a))
}

fn finite(v: ExtVal) -> Rat {
    match v {
        ExtVal::Finite(r) => r,
        ExtVal::PlusInf => panic!("expected a finite value"),
    }
}

/// Pointwise subdifferential rules at common relative-interior points: the
/// sum rule adds generator sets; the max rule keeps the active side, or
/// merges generators on ties.
pub fn suite_sum_and_max_rules(seed: u64, instances: usize) {
    let mut rng = seeded(seed);
    for i in 0..instances {
        let dim = 2;
        let w = rand_point(&mut rng, dim, 2, &[1, 2]);
        let f1 = rand_pl_function(&mut rng, &w);
        let mut f2 = rand_pl_function(&mut rng, &w);

        let v1 = finite(f1.evaluate(&w).unwrap());
        let mut v2 = finite(f2.evaluate(&w).unwrap());
        if i % 2 == 0 {
            let shift = v1.clone() - v2.clone();
            let pieces = match f2.base() {
                ConvexBase::MaxAffine { pieces } => pieces
                    .iter()
                    .map(|p| AffineForm::new(p.coeffs.clone(), p.constant.clone() + shift.clone()))
                    .collect(),
                other => panic!("generator produced a non piecewise-linear base: {other:?}"),
            };
            f2 = NCFunction::new(
                ConvexBase::max_affine(pieces),
                f2.domain().clone(),
                vec![],
            )
            .unwrap();
            v2 = finite(f2.evaluate(&w).unwrap());
            assert_eq!(v1, v2);
        }

        let sum = fn_sum(&f1, &f2).unwrap();
        let s1 = f1.subdiff(&w).unwrap();
        let s2 = f2.subdiff(&w).unwrap();
        assert_fg_equal(
            &sum.subdiff(&w).unwrap(),
            &fg_sum(&s1, &s2).unwrap(),
            &format!("instance {i}: sum rule at {w:?}"),
        );

        let m1 = full_space_copy(&f1);
        let m2 = full_space_copy(&f2);
        let mx = fn_max(&[m1.clone(), m2.clone()]).unwrap();
        let t1 = m1.subdiff(&w).unwrap();
        let t2 = m2.subdiff(&w).unwrap();
        let expected = if v1 > v2 {
            t1
        } else if v2 > v1 {
            t2
        } else {
            let mut points = t1.points().to_vec();
            points.extend_from_slice(t2.points());
            let mut rays = t1.rays().to_vec();
            rays.extend_from_slice(t2.rays());
            FGSet::new(dim, points, rays).unwrap()
        };
        assert_fg_equal(
            &mx.subdiff(&w).unwrap(),
            &expected,
            &format!("instance {i}: max rule at {w:?} with values {v1} and {v2}"),
        );
    }
}

/// At a boundary point of a sublevel set with a strictly feasible point,
/// the polyhedral normal cone equals the cone spanned by the
/// subdifferential, and the constrained normal-cone builder agrees.
pub fn suite_sublevel_cones(seed: u64, instances: usize) {
    let mut rng = seeded(seed);
    for i in 0..instances {
        let dim = 2;
        let x = rand_point(&mut rng, dim, 2, &[1, 2]);
        let s = loop {
            let c = rand_point(&mut rng, dim, 2, &[1, 2]);
            if c != x {
                break c;
            }
        };
        let inward = vsub(&s, &x);

        let active = rng.gen_range(1..=3usize);
        let slack = rng.gen_range(0..=2usize);
        let mut pieces = Vec::new();
        for j in 0..active + slack {
            let a = loop {
                let a = rand_direction(&mut rng, dim, 3);
                let d = dot(&a, &inward);
                if d < rat_int(0) {
                    break a;
                }
                if d > rat_int(0) {
                    break a.iter().map(|c| -c.clone()).collect();
                }
            };
            let mut b = -dot(&a, &x);
            if j >= active {
                b = b - rat(rng.gen_range(1..=4), 2);
            }
            pieces.push(AffineForm::new(a, b));
        }
        let g = NCFunction::unrestricted(ConvexBase::max_affine(pieces.clone())).unwrap();
        assert_eq!(finite(g.evaluate(&x).unwrap()), rat_int(0));

        let rows: Vec<LinearConstraint> = pieces
            .iter()
            .map(|p| LinearConstraint::le(p.coeffs.clone(), -p.constant.clone()))
            .collect();
        match lp_strict_feasible(dim, &rows).unwrap() {
            StrictOutcome::Feasible { .. } => {}
            other => panic!("instance {i}: built sublevel set lost its strict point: {other:?}"),
        }
        let sublevel = Polyhedron::new(dim, rows).unwrap();

        let cone = fg_cone(&g.subdiff(&x).unwrap()).unwrap();
        assert_fg_equal(
            &sublevel.normal_cone(&x).unwrap(),
            &cone,
            &format!("instance {i}: sublevel normal cone at {x:?}"),
        );

        let free = CarvedPolyhedron::from_polyhedron(Polyhedron::new(dim, vec![]).unwrap());
        let zero = NCFunction::unrestricted(ConvexBase::affine(zeros(dim), rat_int(0))).unwrap();
        let cp = ConstrainedProblem::new(zero, free, vec![g], None).unwrap();
        assert!(check_slater(&cp).unwrap().holds(), "instance {i}: slater check refused");
        assert_fg_equal(
            &carvex::kkt::normal_cone_sublevel(&cp, &x).unwrap(),
            &cone,
            &format!("instance {i}: constrained builder at {x:?}"),
        );
        assert_fg_equal(
            &carvex::kkt::normal_cone_sublevel(&cp, &s).unwrap(),
            &FGSet::point(zeros(dim)),
            &format!("instance {i}: constrained builder at the strict point {s:?}"),
        );
    }
}

/// On regular instances the original and associated problems share their
/// value; a grid scan brackets it and feasible samples never beat it.
pub fn suite_value_transfer(seed: u64, instances: usize) {
    let mut rng = seeded(seed);
    for i in 0..instances {
        let (p, spec) = separable_box_instance(&mut rng);
        let report = carvex::opt::solve_original(&p).unwrap();
        assert!(report.regularity.holds(), "instance {i}: built instance lost regularity");
        let carvex::opt::SolveStatus::Optimal { value, associated_solutions, .. } = report.status
        else {
            panic!("instance {i}: compact instance failed to solve");
        };

        let AssociatedOutcome::Optimal { value: assoc_value, .. } =
            solve_associated(&associate(&p)).unwrap()
        else {
            panic!("instance {i}: associated problem failed to solve");
        };
        assert_eq!(value, assoc_value, "instance {i}: values split under regularity");

        let witness = associated_solutions.ri_witness().unwrap();
        assert_eq!(
            p.objective().evaluate(&witness).unwrap(),
            ExtVal::Finite(value.clone()),
            "instance {i}: minimizer witness misses the optimal value"
        );

        let grid = carvex::oracle::grid_min(p.objective(), p.feasible_set(), &spec).unwrap();
        let bracket = grid.bracket();
        assert!(
            bracket.contains(&ExtVal::Finite(value.clone())),
            "instance {i}: value {value} escapes the grid bracket {bracket}"
        );

        for _ in 0..10 {
            let y = rand_point(&mut rng, 2, 2, &[1, 3, 8, 16]);
            if !p.feasible_set().member(&y).unwrap() {
                continue;
            }
            let fy = finite(p.objective().evaluate(&y).unwrap());
            assert!(fy >= value, "instance {i}: feasible sample {y:?} beats the optimum");
        }
    }
}

/// Every generator of a reported subdifferential satisfies the defining
/// inequality against sampled domain points, rays included.
pub fn suite_subdifferential_inequality(seed: u64, instances: usize) {
    let mut rng = seeded(seed);
    for i in 0..instances {
        let dim = 2;
        let w = rand_point(&mut rng, dim, 2, &[1, 2]);
        let quadratic = i % 4 == 3;
        let f = if quadratic {
            let q = vec![
                vec![rat_int(rng.gen_range(0..=3)), rat_int(0)],
                vec![rat_int(0), rat_int(rng.gen_range(0..=3))],
            ];
            let b = rand_direction(&mut rng, dim, 2);
            let base = ConvexBase::quadratic(q, b, rat_int(0));
            match rng.gen_range(0..2) {
                0 => NCFunction::unrestricted(base).unwrap(),
                _ => {
                    let row = halfspace_through_margin(&mut rng, &w, rat_int(1));
                    NCFunction::new(
                        base,
                        Domain::Carved(CarvedPolyhedron::from_polyhedron(
                            Polyhedron::new(dim, vec![row]).unwrap(),
                        )),
                        vec![],
                    )
                    .unwrap()
                }
            }
        } else {
            rand_pl_function(&mut rng, &w)
        };

        let x = match f.domain().carved() {
            Some(c) if i % 2 == 0 => boundary_foot(&c.hull().rows()[0], &w),
            _ => w.clone(),
        };

        let sub = f.subdiff(&x).unwrap();
        let fx = finite(f.evaluate(&x).unwrap());
        let mut checked = 0usize;
        for _ in 0..15 {
            let y = vadd(&x, &rand_point(&mut rng, dim, 3, &[1, 2, 3]));
            let ExtVal::Finite(fy) = f.evaluate(&y).unwrap() else {
                continue;
            };
            let gap = fy - fx.clone();
            let d = vsub(&y, &x);
            for p in sub.points() {
                assert!(
                    dot(p, &d) <= gap,
                    "instance {i}: generator {p:?} breaks the inequality toward {y:?}"
                );
                for r in sub.rays() {
                    for t in [rat_int(1), rat_int(5)] {
                        let v = vadd(p, &carvex::rat::vscale(&t, r));
                        assert!(
                            dot(&v, &d) <= gap,
                            "instance {i}: ray point {v:?} breaks the inequality toward {y:?}"
                        );
                    }
                }
            }
            checked += 1;
        }
        assert!(checked > 0, "instance {i}: no finite sample found");
    }
}
