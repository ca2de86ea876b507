//! Exact convex quadratic minimization over a polyhedron.
//!
//! Minimizes xᵀQx + b·x + c (Q symmetric PSD) subject to linear rows by
//! enumerating candidate active sets: for each subset of the inequality
//! rows, a single LP looks for a primal-feasible point satisfying the
//! stationarity equation with nonnegative multipliers on the chosen rows.
//! Any hit is a global minimizer, and when a finite minimum exists some
//! subset produces one, so the scan is complete. Infeasibility and
//! unboundedness are settled first by dedicated LPs so the enumeration only
//! runs when a minimizer exists.

use num::Zero;

use crate::affine::{check_dims, AffineForm, LinearConstraint, Relation};
use crate::error::Error;
use crate::linalg::{mat_vec, quad_form};
use crate::lp::{lp_solve, lp_strict_feasible, LpOutcome, Sense};
use crate::par::first_success;
use crate::rat::{dot, rat_int, zeros, Rat, RatVec};

/// Default cap on enumerated active sets.
pub const MAX_ACTIVE_SETS: u64 = 1 << 20;

/// Outcome of a quadratic minimization.
#[derive(Clone, Debug, PartialEq)]
pub enum QpOutcome {
    Optimal { value: Rat, point: RatVec },
    Infeasible,
    Unbounded { ray: RatVec },
}

/// Minimizes xᵀQx + b·x + c over the rows. `max_active_sets` bounds the
/// enumeration (defaults to `MAX_ACTIVE_SETS`).
pub fn qp_solve(
    q: &[RatVec],
    b: &[Rat],
    c: &Rat,
    rows: &[LinearConstraint],
    max_active_sets: Option<u64>,
) -> Result<QpOutcome, Error> {
    let dim = q.len();
    if b.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: b.len() });
    }
    check_dims(rows, dim)?;
    for r in rows {
        r.require_rel(&[Relation::Le, Relation::Eq])?;
    }
    if !lp_strict_feasible(dim, rows)?.is_feasible() {
        return Ok(QpOutcome::Infeasible);
    }
    if let Some(ray) = unbounded_ray(q, b, rows)? {
        return Ok(QpOutcome::Unbounded { ray });
    }

    let le_rows: Vec<usize> =
        (0..rows.len()).filter(|&i| rows[i].rel == Relation::Le).collect();
    let m = le_rows.len();
    let cap = max_active_sets.unwrap_or(MAX_ACTIVE_SETS);
    let subsets = if m >= 63 { u64::MAX } else { 1u64 << m };
    if subsets > cap {
        return Err(Error::ActiveSetCapExceeded { subsets });
    }
    let hit = first_success(subsets as usize, |mask| {
        stationary_point_for_active_set(q, b, rows, &le_rows, mask as u64)
    })?;
    match hit {
        Some((_, point)) => {
            let value = quad_form(q, &point) + dot(b, &point) + c;
            Ok(QpOutcome::Optimal { value, point })
        }
        None => Err(Error::Internal(
            "bounded feasible quadratic program produced no stationary point".into(),
        )),
    }
}

/// A descent direction of recession, if one exists: Ad ≤ 0 on inequality
/// rows, Ad = 0 on equality rows, Qd = 0, and b·d < 0. Exists exactly when
/// the program is unbounded below over a nonempty feasible set.
fn unbounded_ray(
    q: &[RatVec],
    b: &[Rat],
    rows: &[LinearConstraint],
) -> Result<Option<RatVec>, Error> {
    let dim = q.len();
    let mut sys: Vec<LinearConstraint> = Vec::new();
    for row in rows {
        sys.push(LinearConstraint::new(
            AffineForm::new(row.form.coeffs.clone(), Rat::zero()),
            row.rel,
        ));
    }
    for qrow in q {
        sys.push(LinearConstraint::new(
            AffineForm::new(qrow.clone(), Rat::zero()),
            Relation::Eq,
        ));
    }
    for i in 0..dim {
        let mut up = zeros(dim);
        up[i] = rat_int(1);
        sys.push(LinearConstraint::le(up, rat_int(1)));
        let mut down = zeros(dim);
        down[i] = rat_int(-1);
        sys.push(LinearConstraint::le(down, rat_int(1)));
    }
    let objective = AffineForm::new(b.to_vec(), Rat::zero());
    match lp_solve(Sense::Minimize, &objective, &sys)? {
        LpOutcome::Optimal { value, point } => {
            if value < Rat::zero() {
                Ok(Some(point))
            } else {
                Ok(None)
            }
        }
        outcome => Err(Error::Internal(format!(
            "recession program must have an optimum, got {outcome:?}"
        ))),
    }
}

/// Tries one active set: the inequality rows of `le_rows` selected by
/// `mask` are forced to equality and receive nonnegative multipliers; a
/// feasibility LP then looks for x with 2Qx + b + Σμ_i a_i + Σν_j c_j = 0
/// over the feasible region. A returned point is a global minimizer.
pub fn stationary_point_for_active_set(
    q: &[RatVec],
    b: &[Rat],
    rows: &[LinearConstraint],
    le_rows: &[usize],
    mask: u64,
) -> Result<Option<RatVec>, Error> {
    let dim = q.len();
    let active: Vec<usize> =
        (0..le_rows.len()).filter(|i| mask & (1 << i) != 0).map(|i| le_rows[i]).collect();
    let eq_rows: Vec<usize> =
        (0..rows.len()).filter(|&i| rows[i].rel == Relation::Eq).collect();
    let na = active.len();
    let ne = eq_rows.len();
    let nvars = dim + na + ne;

    let mut sys: Vec<LinearConstraint> = Vec::new();
    let lift_x = |row: &LinearConstraint, rel: Relation| {
        let mut coeffs = zeros(nvars);
        coeffs[..dim].clone_from_slice(&row.form.coeffs);
        LinearConstraint::new(AffineForm::new(coeffs, row.form.constant.clone()), rel)
    };
    for row in rows {
        sys.push(lift_x(row, row.rel));
    }
    for &i in &active {
        sys.push(lift_x(&rows[i], Relation::Eq));
    }
    for k in 0..na {
        let mut coeffs = zeros(nvars);
        coeffs[dim + k] = rat_int(-1);
        sys.push(LinearConstraint::new(AffineForm::new(coeffs, Rat::zero()), Relation::Le));
    }
    let two = rat_int(2);
    for k in 0..dim {
        let mut coeffs = zeros(nvars);
        for (j, qkj) in q[k].iter().enumerate() {
            coeffs[j] = &two * qkj;
        }
        for (slot, &i) in active.iter().enumerate() {
            coeffs[dim + slot] = rows[i].form.coeffs[k].clone();
        }
        for (slot, &j) in eq_rows.iter().enumerate() {
            coeffs[dim + na + slot] = rows[j].form.coeffs[k].clone();
        }
        sys.push(LinearConstraint::new(AffineForm::new(coeffs, b[k].clone()), Relation::Eq));
    }
    match lp_solve(Sense::Minimize, &AffineForm::zero(nvars), &sys)? {
        LpOutcome::Optimal { point, .. } => Ok(Some(point[..dim].to_vec())),
        LpOutcome::Infeasible { .. } => Ok(None),
        LpOutcome::Unbounded { point, .. } => Ok(Some(point[..dim].to_vec())),
    }
}

/// Rows pinning the full solution set of a solved program: feasibility plus
/// Qx = Qx* and b·x = b·x*, which hold exactly at the minimizers.
pub fn solution_set_rows(
    q: &[RatVec],
    b: &[Rat],
    rows: &[LinearConstraint],
    minimizer: &[Rat],
) -> Vec<LinearConstraint> {
    let qxstar = mat_vec(q, minimizer);
    let mut out = rows.to_vec();
    for (k, qrow) in q.iter().enumerate() {
        if crate::rat::is_zero_vec(qrow) {
            continue;
        }
        out.push(LinearConstraint::new(
            AffineForm::new(qrow.clone(), -&qxstar[k]),
            Relation::Eq,
        ));
    }
    out.push(LinearConstraint::new(
        AffineForm::new(b.to_vec(), -dot(b, minimizer)),
        Relation::Eq,
    ));
    out
}
