//! Exact linear programming.
//!
//! A dense two-phase tableau simplex over arbitrary-precision rationals.
//! Entering and leaving variables follow Bland's anti-cycling rule, so every
//! solve terminates and, for a fixed input, returns the same witness. Free
//! variables are split into positive parts, inequality rows get slacks, and
//! every row gets a phase-one artificial.
//!
//! Outcomes carry exact evidence: optima return the witness point, infeasible
//! systems return Farkas multipliers (re-verified before being handed out),
//! unbounded problems return a feasible point plus an improving ray, and
//! strict-feasibility refutations return multipliers proving the slack
//! variable cannot be positive.

use num::{One, Zero};

use crate::affine::{check_dims, AffineForm, LinearConstraint, Relation};
use crate::error::Error;
use crate::rat::{dot, Rat, RatVec};

/// Optimization direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Result of an exact LP solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: Rat,
        point: RatVec,
    },
    /// `multipliers[i]` pairs with `rows[i]`; nonnegative on `le` rows, free
    /// on `eq` rows, with `sum_i y_i a_i = 0` and `sum_i y_i c_i > 0` where
    /// row `i` is `a_i . x + c_i REL 0`.
    Infeasible {
        multipliers: RatVec,
    },
    Unbounded {
        point: RatVec,
        ray: RatVec,
    },
}

/// Outcome of a strict-feasibility probe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrictOutcome {
    /// A point satisfying every `lt` row strictly; `margin` is the maximal
    /// common slack (capped at 1) the strict rows admit.
    Feasible { point: RatVec, margin: Rat },
    /// No strictly feasible point. When the weak system itself is infeasible,
    /// `farkas` holds its certificate; otherwise `slack_bound` holds
    /// multipliers over the lifted rows proving the slack is at most zero.
    Infeasible {
        farkas: Option<RatVec>,
        slack_bound: Option<RatVec>,
    },
}

impl StrictOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, StrictOutcome::Feasible { .. })
    }
}

/// Verifies a Farkas certificate against the rows it claims to refute.
pub fn verify_farkas(rows: &[LinearConstraint], multipliers: &[Rat]) -> bool {
    if rows.len() != multipliers.len() || rows.is_empty() {
        return false;
    }
    let dim = rows[0].dim();
    let mut combo = vec![Rat::zero(); dim];
    let mut constant = Rat::zero();
    for (row, y) in rows.iter().zip(multipliers) {
        if row.rel != Relation::Eq && *y < Rat::zero() {
            return false;
        }
        for (c, a) in combo.iter_mut().zip(&row.form.coeffs) {
            *c += y * a;
        }
        constant += y * &row.form.constant;
    }
    combo.iter().all(Rat::is_zero) && constant > Rat::zero()
}

/// Solves `sense objective.eval(x)` subject to `rows` (relations `le`/`eq`
/// only) over free variables.
pub fn lp_solve(
    sense: Sense,
    objective: &AffineForm,
    rows: &[LinearConstraint],
) -> Result<LpOutcome, Error> {
    let dim = objective.dim();
    check_dims(rows, dim)?;
    for r in rows {
        r.require_rel(&[Relation::Le, Relation::Eq])?;
    }
    let min_obj = match sense {
        Sense::Minimize => objective.coeffs.clone(),
        Sense::Maximize => objective.coeffs.iter().map(|c| -c).collect(),
    };
    let outcome = simplex(dim, rows, &min_obj)?;
    Ok(match outcome {
        RawOutcome::Optimal { point } => {
            let value = objective.eval(&point);
            LpOutcome::Optimal { value, point }
        }
        RawOutcome::Infeasible { multipliers } => {
            if !verify_farkas(rows, &multipliers) {
                return Err(Error::Internal("farkas certificate failed verification".into()));
            }
            LpOutcome::Infeasible { multipliers }
        }
        RawOutcome::Unbounded { point, mut ray } => {
            if sense == Sense::Maximize {
                // The internal ray improves the minimized (negated) objective;
                // it already improves the original maximization as given.
            }
            debug_assert!(ray_is_valid(rows, &min_obj, &point, &ray));
            if sense == Sense::Maximize {
                // Keep the ray as an improving direction for the caller's
                // stated sense: objective increases along it.
                let improves = dot(&objective.coeffs, &ray) > Rat::zero();
                if !improves {
                    ray = ray.iter().map(|r| -r).collect();
                }
            }
            LpOutcome::Unbounded { point, ray }
        }
    })
}

/// Decides whether `rows` admits a point satisfying every `lt` row strictly
/// (and the rest exactly/weakly). Implemented by maximizing a shared slack
/// `s` added to each strict row, bounded by 1; strict feasibility holds
/// exactly when the maximum is positive.
pub fn lp_strict_feasible(dim: usize, rows: &[LinearConstraint]) -> Result<StrictOutcome, Error> {
    check_dims(rows, dim)?;
    let lifted = lift_strict(dim, rows);
    let mut obj_coeffs = vec![Rat::zero(); dim + 1];
    obj_coeffs[dim] = Rat::one();
    let objective = AffineForm::new(obj_coeffs, Rat::zero());
    match lp_solve(Sense::Maximize, &objective, &lifted)? {
        LpOutcome::Optimal { value, point } => {
            if value > Rat::zero() {
                let margin = value;
                let mut point = point;
                point.truncate(dim);
                debug_assert!(rows.iter().all(|r| r.holds_at(&point)));
                Ok(StrictOutcome::Feasible { point, margin })
            } else {
                let slack_bound = extract_slack_bound(dim, &lifted)?;
                Ok(StrictOutcome::Infeasible {
                    farkas: None,
                    slack_bound,
                })
            }
        }
        LpOutcome::Infeasible { multipliers } => Ok(StrictOutcome::Infeasible {
            farkas: Some(multipliers),
            slack_bound: None,
        }),
        LpOutcome::Unbounded { .. } => {
            Err(Error::Internal("bounded slack lp reported unbounded".into()))
        }
    }
}

/// The lifted weak system used by the strict probe: each `lt` row gains the
/// slack variable, and `0 <= s <= 1` is appended.
fn lift_strict(dim: usize, rows: &[LinearConstraint]) -> Vec<LinearConstraint> {
    let mut lifted: Vec<LinearConstraint> = Vec::with_capacity(rows.len() + 2);
    for r in rows {
        let mut coeffs = r.form.coeffs.clone();
        coeffs.push(if r.rel == Relation::Lt { Rat::one() } else { Rat::zero() });
        let rel = if r.rel == Relation::Lt { Relation::Le } else { r.rel };
        lifted.push(LinearConstraint::new(
            AffineForm::new(coeffs, r.form.constant.clone()),
            rel,
        ));
    }
    let mut s_low = vec![Rat::zero(); dim + 1];
    s_low[dim] = -Rat::one();
    lifted.push(LinearConstraint::new(AffineForm::new(s_low, Rat::zero()), Relation::Le));
    let mut s_high = vec![Rat::zero(); dim + 1];
    s_high[dim] = Rat::one();
    lifted.push(LinearConstraint::new(AffineForm::new(s_high, -Rat::one()), Relation::Le));
    lifted
}

/// When the slack maximum is zero, finds multipliers over the lifted rows
/// certifying `s <= 0`: eta >= 0 on inequality rows, combination coefficients
/// zero on x, one on s, zero constant. Searched for by a small auxiliary LP
/// over the multiplier space, which keeps the certificate independent of
/// simplex internals.
fn extract_slack_bound(dim: usize, lifted: &[LinearConstraint]) -> Result<Option<RatVec>, Error> {
    let m = lifted.len();
    // Unknowns: eta_0..eta_{m-1}. Equalities: sum eta_i a_i = 0 (x part),
    // sum eta_i s_i = 1, sum eta_i c_i = 0. Inequalities: eta_i >= 0 on le rows.
    let mut rows: Vec<LinearConstraint> = Vec::new();
    for coord in 0..=dim {
        let coeffs: RatVec = lifted.iter().map(|r| r.form.coeffs[coord].clone()).collect();
        let rhs = if coord == dim { Rat::one() } else { Rat::zero() };
        rows.push(LinearConstraint::eq(coeffs, rhs));
    }
    {
        let coeffs: RatVec = lifted.iter().map(|r| r.form.constant.clone()).collect();
        rows.push(LinearConstraint::eq(coeffs, Rat::zero()));
    }
    for (i, r) in lifted.iter().enumerate() {
        if r.rel != Relation::Eq {
            let mut coeffs = vec![Rat::zero(); m];
            coeffs[i] = -Rat::one();
            rows.push(LinearConstraint::le(coeffs, Rat::zero()));
        }
    }
    let objective = AffineForm::zero(m);
    match lp_solve(Sense::Minimize, &objective, &rows)? {
        LpOutcome::Optimal { point, .. } => Ok(Some(point)),
        _ => Ok(None),
    }
}

enum RawOutcome {
    Optimal { point: RatVec },
    Infeasible { multipliers: RatVec },
    Unbounded { point: RatVec, ray: RatVec },
}

fn ray_is_valid(rows: &[LinearConstraint], min_obj: &[Rat], point: &[Rat], ray: &[Rat]) -> bool {
    if dot(min_obj, ray) >= Rat::zero() {
        return false;
    }
    rows.iter().all(|r| {
        let along = dot(&r.form.coeffs, ray);
        match r.rel {
            Relation::Le => along <= Rat::zero(),
            Relation::Eq => along.is_zero(),
            Relation::Lt => false,
        }
    }) && rows.iter().all(|r| r.holds_at(point))
}

/// Dense simplex tableau. Columns: `u_0..u_{n-1}`, `v_0..v_{n-1}` (free
/// variable split `x = u - v`), one slack per `le` row, one artificial per
/// row. The last column of each row is the right-hand side.
struct Tableau {
    dim: usize,
    ncols: usize,
    rows: Vec<RatVec>,
    basis: Vec<usize>,
    /// Original row index and orientation flip for each tableau row.
    row_sigma: Vec<(usize, bool)>,
    cost: RatVec,
    cost_rhs: Rat,
}

fn simplex(dim: usize, rows: &[LinearConstraint], min_obj: &[Rat]) -> Result<RawOutcome, Error> {
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.rel == Relation::Le).count();
    let struct_cols = 2 * dim;
    let art_start = struct_cols + n_slack;
    let ncols = art_start + m;

    let mut t = Tableau {
        dim,
        ncols,
        rows: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        row_sigma: Vec::with_capacity(m),
        cost: vec![Rat::zero(); ncols],
        cost_rhs: Rat::zero(),
    };

    let mut slack_idx = struct_cols;
    for (i, row) in rows.iter().enumerate() {
        let mut tr = vec![Rat::zero(); ncols + 1];
        for (j, a) in row.form.coeffs.iter().enumerate() {
            tr[j] = a.clone();
            tr[dim + j] = -a.clone();
        }
        if row.rel == Relation::Le {
            tr[slack_idx] = Rat::one();
            slack_idx += 1;
        }
        let rhs = -row.form.constant.clone();
        tr[ncols] = rhs;
        let flip = tr[ncols] < Rat::zero();
        if flip {
            for e in tr.iter_mut() {
                *e = -e.clone();
            }
        }
        tr[art_start + i] = Rat::one();
        t.rows.push(tr);
        t.basis.push(art_start + i);
        t.row_sigma.push((i, flip));
    }

    // Phase one: minimize the sum of artificials.
    let mut phase1_cost = vec![Rat::zero(); ncols];
    for c in art_start..ncols {
        phase1_cost[c] = Rat::one();
    }
    t.install_cost(&phase1_cost);
    let phase1 = t.pivot_to_optimum(ncols)?;
    if let Pivoted::Unbounded { .. } = phase1 {
        return Err(Error::Internal("phase one cannot be unbounded".into()));
    }
    let phase1_value = -t.cost_rhs.clone();
    if phase1_value > Rat::zero() {
        // y_i = 1 - reduced cost on artificial i; multiplier in original row
        // orientation is -sigma_i * y_i.
        let mut multipliers = vec![Rat::zero(); m];
        for (tableau_row, &(orig, flip)) in t.row_sigma.iter().enumerate() {
            let y = Rat::one() - t.cost[art_start + tableau_row].clone();
            multipliers[orig] = if flip { y } else { -y };
        }
        return Ok(RawOutcome::Infeasible { multipliers });
    }

    // Drive basic artificials out or drop redundant rows.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= art_start {
            let pivot_col = (0..art_start).find(|&c| !t.rows[r][c].is_zero());
            match pivot_col {
                Some(c) => t.pivot(r, c),
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                    t.row_sigma.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // Phase two: the real objective on the split variables.
    let mut phase2_cost = vec![Rat::zero(); ncols];
    for (j, c) in min_obj.iter().enumerate() {
        phase2_cost[j] = c.clone();
        phase2_cost[dim + j] = -c.clone();
    }
    t.install_cost(&phase2_cost);
    match t.pivot_to_optimum(art_start)? {
        Pivoted::Optimal => Ok(RawOutcome::Optimal { point: t.extract_point() }),
        Pivoted::Unbounded { entering } => {
            let point = t.extract_point();
            let mut dtilde = vec![Rat::zero(); t.ncols];
            dtilde[entering] = Rat::one();
            for (row, &b) in t.rows.iter().zip(&t.basis) {
                dtilde[b] = -row[entering].clone();
            }
            let ray: RatVec = (0..t.dim)
                .map(|k| &dtilde[k] - &dtilde[t.dim + k])
                .collect();
            Ok(RawOutcome::Unbounded { point, ray })
        }
    }
}

enum Pivoted {
    Optimal,
    Unbounded { entering: usize },
}

impl Tableau {
    /// Sets the cost row to `c` reduced against the current basis.
    fn install_cost(&mut self, c: &[Rat]) {
        self.cost = c.to_vec();
        self.cost_rhs = Rat::zero();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = c[b].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.ncols {
                let delta = &cb * &row[j];
                self.cost[j] = &self.cost[j] - delta;
            }
            let delta = &cb * &row[self.ncols];
            self.cost_rhs = &self.cost_rhs - delta;
        }
    }

    /// Bland pivoting until optimal or unbounded. Columns at or beyond
    /// `col_limit` never enter (phase two bans artificials this way).
    fn pivot_to_optimum(&mut self, col_limit: usize) -> Result<Pivoted, Error> {
        loop {
            let entering = (0..col_limit).find(|&j| self.cost[j] < Rat::zero());
            let Some(e) = entering else {
                return Ok(Pivoted::Optimal);
            };
            let mut leave: Option<usize> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[e] > Rat::zero() {
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            let cur = &self.rows[l][self.ncols] * &row[e];
                            let new = &row[self.ncols] * &self.rows[l][e];
                            match new.cmp(&cur) {
                                std::cmp::Ordering::Less => true,
                                std::cmp::Ordering::Greater => false,
                                std::cmp::Ordering::Equal => self.basis[i] < self.basis[l],
                            }
                        }
                    };
                    if better {
                        leave = Some(i);
                    }
                }
            }
            match leave {
                None => return Ok(Pivoted::Unbounded { entering: e }),
                Some(l) => self.pivot(l, e),
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        debug_assert!(!p.is_zero());
        for e in self.rows[row].iter_mut() {
            *e = &*e / &p;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i != row && !r[col].is_zero() {
                let f = r[col].clone();
                for (e, pe) in r.iter_mut().zip(&pivot_row) {
                    let delta = &f * pe;
                    *e = &*e - delta;
                }
            }
        }
        if !self.cost[col].is_zero() {
            let f = self.cost[col].clone();
            for (j, pe) in pivot_row.iter().enumerate().take(self.ncols) {
                let delta = &f * pe;
                self.cost[j] = &self.cost[j] - delta;
            }
            let delta = &f * &pivot_row[self.ncols];
            self.cost_rhs = &self.cost_rhs - delta;
        }
        self.basis[row] = col;
    }

    fn extract_point(&self) -> RatVec {
        let mut xtilde = vec![Rat::zero(); self.ncols];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            xtilde[b] = row[self.ncols].clone();
        }
        (0..self.dim)
            .map(|k| &xtilde[k] - &xtilde[self.dim + k])
            .collect()
    }
}
