//! Fourier–Motzkin projection of linear constraint systems.
//!
//! Eliminates one variable at a time: an equality row containing the
//! variable is preferred (solve and substitute), otherwise all positive and
//! negative inequality rows are paired. Because the input is a closed
//! polyhedron, the result describes the exact coordinate projection. After
//! elimination, rows the remaining system already implies are removed by a
//! per-row LP test.

use num::Zero;

use crate::affine::{check_dims, AffineForm, LinearConstraint, Relation};
use crate::error::Error;
use crate::lp::{lp_solve, LpOutcome, Sense};
use crate::rat::Rat;

/// Projects `rows` (relations `le`/`eq` over `dim` variables) onto the
/// coordinates in `keep`, in the order given. The result lives in
/// dimension `keep.len()`.
pub fn fm_project(
    dim: usize,
    rows: &[LinearConstraint],
    keep: &[usize],
) -> Result<Vec<LinearConstraint>, Error> {
    check_dims(rows, dim)?;
    for r in rows {
        r.require_rel(&[Relation::Le, Relation::Eq])?;
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad + 1 });
    }
    let mut seen = vec![false; dim];
    for &k in keep {
        if seen[k] {
            return Err(Error::Internal("duplicate index in keep".into()));
        }
        seen[k] = true;
    }

    let mut system: Vec<LinearConstraint> = rows.to_vec();
    for var in (0..dim).rev() {
        if seen[var] {
            continue;
        }
        system = eliminate(system, var);
    }
    system = prune_implied(system)?;

    // Reindex onto the kept coordinates.
    let projected = system
        .into_iter()
        .map(|r| {
            let coeffs = keep.iter().map(|&k| r.form.coeffs[k].clone()).collect();
            LinearConstraint::new(AffineForm::new(coeffs, r.form.constant.clone()), r.rel)
        })
        .collect();
    Ok(projected)
}

fn eliminate(system: Vec<LinearConstraint>, var: usize) -> Vec<LinearConstraint> {
    if let Some(pos) = system
        .iter()
        .position(|r| r.rel == Relation::Eq && !r.form.coeffs[var].is_zero())
    {
        // Substitute the equality row into everything else.
        let pivot = system[pos].clone();
        let p = pivot.form.coeffs[var].clone();
        let mut out = Vec::with_capacity(system.len() - 1);
        for (i, row) in system.into_iter().enumerate() {
            if i == pos {
                continue;
            }
            let c = row.form.coeffs[var].clone();
            if c.is_zero() {
                out.push(row);
                continue;
            }
            let factor = &c / &p;
            let coeffs = row
                .form
                .coeffs
                .iter()
                .zip(&pivot.form.coeffs)
                .map(|(a, b)| a - &factor * b)
                .collect();
            let constant = &row.form.constant - &factor * &pivot.form.constant;
            out.push(LinearConstraint::new(AffineForm::new(coeffs, constant), row.rel));
        }
        return cleanup(out, var);
    }

    let mut zero_rows = Vec::new();
    let mut pos_rows = Vec::new();
    let mut neg_rows = Vec::new();
    for row in system {
        let c = &row.form.coeffs[var];
        if c.is_zero() {
            zero_rows.push(row);
        } else if *c > Rat::zero() {
            pos_rows.push(row);
        } else {
            neg_rows.push(row);
        }
    }
    let mut out = zero_rows;
    for p_row in &pos_rows {
        let cp = p_row.form.coeffs[var].clone();
        for n_row in &neg_rows {
            let cn = n_row.form.coeffs[var].clone();
            // (-cn) * p_row + cp * n_row cancels the variable; both
            // multipliers are positive so the combined row stays valid.
            let coeffs = p_row
                .form
                .coeffs
                .iter()
                .zip(&n_row.form.coeffs)
                .map(|(a, b)| -&cn * a + &cp * b)
                .collect();
            let constant = -&cn * &p_row.form.constant + &cp * &n_row.form.constant;
            out.push(LinearConstraint::new(AffineForm::new(coeffs, constant), Relation::Le));
        }
    }
    cleanup(out, var)
}

/// Drops vacuous rows, normalizes, and deduplicates. Rows that reduce to an
/// unsatisfiable constant are kept so infeasibility survives projection.
fn cleanup(system: Vec<LinearConstraint>, eliminated: usize) -> Vec<LinearConstraint> {
    let mut out: Vec<LinearConstraint> = Vec::with_capacity(system.len());
    for row in system {
        debug_assert!(row.form.coeffs[eliminated].is_zero());
        let form = row.form.normalized();
        if form.is_constant() {
            let c = &form.constant;
            let vacuous = match row.rel {
                Relation::Le => *c <= Rat::zero(),
                Relation::Eq => c.is_zero(),
                Relation::Lt => *c < Rat::zero(),
            };
            if vacuous {
                continue;
            }
        }
        let candidate = LinearConstraint::new(form, row.rel);
        if !out.contains(&candidate) {
            out.push(candidate);
        }
    }
    out
}

/// Removes inequality rows the rest of the system already implies, testing
/// one row at a time against the others.
fn prune_implied(system: Vec<LinearConstraint>) -> Result<Vec<LinearConstraint>, Error> {
    let mut kept = system;
    let mut i = 0;
    while i < kept.len() {
        if kept[i].rel != Relation::Le || kept.len() == 1 {
            i += 1;
            continue;
        }
        let mut others: Vec<LinearConstraint> = kept.clone();
        let row = others.remove(i);
        let objective = AffineForm::new(row.form.coeffs.clone(), row.form.constant.clone());
        let implied = match lp_solve(Sense::Maximize, &objective, &others)? {
            LpOutcome::Optimal { value, .. } => value <= Rat::zero(),
            _ => false,
        };
        if implied {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int, RatVec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn le(coeffs: &[i64], rhs: i64) -> LinearConstraint {
        LinearConstraint::le(coeffs.iter().map(|&c| rat_int(c)).collect(), rat_int(rhs))
    }

    fn eq(coeffs: &[i64], rhs: i64) -> LinearConstraint {
        LinearConstraint::eq(coeffs.iter().map(|&c| rat_int(c)).collect(), rat_int(rhs))
    }

    #[test]
    fn projects_absolute_value_epigraph_onto_base() {
        // {(x,t): t >= x, t >= -x, t <= 1} projected onto x is [-1, 1].
        let rows = vec![le(&[1, -1], 0), le(&[-1, -1], 0), le(&[0, 1], 1)];
        let proj = fm_project(2, &rows, &[0]).unwrap();
        let member = |num: i64, den: i64| proj.iter().all(|r| r.holds_at(&[rat(num, den)]));
        assert!(member(0, 1));
        assert!(member(1, 1));
        assert!(member(-1, 1));
        assert!(member(1, 2));
        assert!(!member(3, 2));
        assert!(!member(-3, 2));
    }

    #[test]
    fn projects_box_onto_first_coordinate() {
        let rows = vec![le(&[1, 0], 1), le(&[-1, 0], 0), le(&[0, 1], 2), le(&[0, -1], 0)];
        let proj = fm_project(2, &rows, &[0]).unwrap();
        assert_eq!(proj.len(), 2);
        assert!(proj.iter().all(|r| r.holds_at(&[rat(1, 2)])));
        assert!(!proj.iter().all(|r| r.holds_at(&[rat(3, 2)])));
    }

    #[test]
    fn equality_rows_substitute_before_pairing() {
        // {x1 + x2 = 1, x2 >= 0} onto x1 gives x1 <= 1.
        let rows = vec![eq(&[1, 1], 1), le(&[0, -1], 0)];
        let proj = fm_project(2, &rows, &[0]).unwrap();
        assert_eq!(proj.len(), 1);
        assert!(proj[0].holds_at(&[rat_int(1)]));
        assert!(proj[0].holds_at(&[rat_int(-5)]));
        assert!(!proj[0].holds_at(&[rat(11, 10)]));
    }

    #[test]
    fn infeasible_system_projects_to_infeasible() {
        let rows = vec![le(&[1, 0], 0), le(&[-1, 0], -1)];
        let proj = fm_project(2, &rows, &[1]).unwrap();
        assert!(!proj.is_empty());
        assert!(!proj.iter().all(|r| r.holds_at(&[rat_int(0)])));
    }

    #[test]
    fn redundant_rows_are_pruned() {
        let rows = vec![le(&[1, 0], 1), le(&[1, 0], 2), le(&[-1, 0], 0), le(&[0, 1], 1), le(&[0, -1], 0)];
        let proj = fm_project(2, &rows, &[0, 1]).unwrap();
        assert_eq!(proj.len(), 4);
    }

    #[test]
    fn strict_rows_are_rejected() {
        let rows = vec![LinearConstraint::lt(vec![rat_int(1), rat_int(0)], rat_int(0))];
        assert_eq!(fm_project(2, &rows, &[0]), Err(Error::StrictRelationNotAllowed));
    }

    #[test]
    fn membership_matches_existence_of_lift() {
        // A point lies in the projection exactly when some lift satisfies
        // the original system; checked on 200 random rational points.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rows = vec![
            le(&[1, 1, 1], 2),
            le(&[-1, 0, 0], 0),
            le(&[0, -1, 0], 0),
            le(&[0, 0, -1], 0),
            le(&[1, -1, 0], 1),
        ];
        let proj = fm_project(3, &rows, &[0, 1]).unwrap();
        for _ in 0..200 {
            let num_x = rng.gen_range(-8i64..=8);
            let num_y = rng.gen_range(-8i64..=8);
            let den = rng.gen_range(1i64..=4);
            let point = vec![rat(num_x, den * 2), rat(num_y, den * 2)];
            let in_projection = proj.iter().all(|r| r.holds_at(&point));
            let mut lifted: Vec<LinearConstraint> = rows.clone();
            for (coord, value) in point.iter().enumerate() {
                let mut coeffs: RatVec = vec![Rat::zero(); 3];
                coeffs[coord] = rat_int(1);
                lifted.push(LinearConstraint::eq(coeffs, value.clone()));
            }
            let lift_exists = crate::lp::lp_strict_feasible(3, &lifted).unwrap().is_feasible();
            assert_eq!(in_projection, lift_exists, "disagreement at {point:?}");
        }
    }
}
