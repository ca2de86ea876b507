//! Exact dense linear algebra: linear systems and semidefiniteness checks.

use num::Zero;

use crate::error::Error;
use crate::rat::{dot, rat_display, Rat, RatVec};

/// Outcome of solving `A x = b` exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    /// Exactly one solution.
    Unique(RatVec),
    /// Affine family `base + span(basis)`; the basis vectors are linearly
    /// independent null-space generators.
    Parametric { base: RatVec, basis: Vec<RatVec> },
    /// No solution.
    Inconsistent,
}

/// Solves the system `rows[i].0 . x = rows[i].1` by Gauss-Jordan elimination.
///
/// `dim` is the number of unknowns; rows may be redundant or contradictory.
pub fn solve_linear_system(dim: usize, rows: &[(RatVec, Rat)]) -> Result<LinearSolution, Error> {
    for (a, _) in rows {
        if a.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: a.len(),
            });
        }
    }
    // Augmented matrix [A | b].
    let mut m: Vec<RatVec> = rows
        .iter()
        .map(|(a, b)| {
            let mut row = a.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let nrows = m.len();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..dim {
        let Some(pivot_row) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot_row);
        let p = m[rank][col].clone();
        for entry in &mut m[rank] {
            *entry = &*entry / &p;
        }
        for r in 0..nrows {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=dim {
                    let delta = &f * &m[rank][c];
                    m[r][c] = &m[r][c] - delta;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    for r in rank..nrows {
        if !m[r][dim].is_zero() {
            return Ok(LinearSolution::Inconsistent);
        }
    }
    let mut base = vec![Rat::zero(); dim];
    for (r, &col) in pivot_cols.iter().enumerate() {
        base[col] = m[r][dim].clone();
    }
    let free_cols: Vec<usize> = (0..dim).filter(|c| !pivot_cols.contains(c)).collect();
    if free_cols.is_empty() {
        return Ok(LinearSolution::Unique(base));
    }
    let mut basis = Vec::with_capacity(free_cols.len());
    for &fc in &free_cols {
        let mut v = vec![Rat::zero(); dim];
        v[fc] = Rat::from_integer(1.into());
        for (r, &col) in pivot_cols.iter().enumerate() {
            v[col] = -m[r][fc].clone();
        }
        basis.push(v);
    }
    Ok(LinearSolution::Parametric { base, basis })
}

/// Evaluates the quadratic form `x^T Q x`.
pub fn quad_form(q: &[RatVec], x: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (i, row) in q.iter().enumerate() {
        acc += &x[i] * dot(row, x);
    }
    acc
}

/// Matrix-vector product `Q x`.
pub fn mat_vec(q: &[RatVec], x: &[Rat]) -> RatVec {
    q.iter().map(|row| dot(row, x)).collect()
}

/// Verifies that `q` is square, symmetric and positive semidefinite.
///
/// The check is exact congruence diagonalization: complete the square on a
/// positive diagonal pivot and recurse on the Schur complement. Any failure
/// is turned into an explicit direction `v` with `v^T Q v < 0`, re-verified
/// against the original matrix before being reported.
pub fn check_psd(q: &[RatVec]) -> Result<(), Error> {
    let n = q.len();
    for (i, row) in q.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        for j in 0..n {
            if q[i][j] != q[j][i] {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    let mut a: Vec<RatVec> = q.to_vec();
    let mut remaining: Vec<usize> = (0..n).collect();
    // Records (pivot index, pivot value, pivot row at the time of elimination)
    // so a violating direction found later can be lifted back.
    let mut steps: Vec<(usize, Rat, RatVec)> = Vec::new();

    let witness = loop {
        if remaining.is_empty() {
            return Ok(());
        }
        if let Some(&bad) = remaining.iter().find(|&&i| a[i][i] < Rat::zero()) {
            let mut w = vec![Rat::zero(); n];
            w[bad] = Rat::from_integer(1.into());
            break w;
        }
        if let Some(&piv) = remaining.iter().find(|&&i| a[i][i] > Rat::zero()) {
            let p = a[piv][piv].clone();
            let row: RatVec = a[piv].clone();
            remaining.retain(|&i| i != piv);
            for &j in &remaining {
                for &k in &remaining {
                    let delta = &row[j] * &row[k] / &p;
                    a[j][k] = &a[j][k] - delta;
                }
            }
            steps.push((piv, p, row));
            continue;
        }
        // Every remaining diagonal entry is zero. A nonzero off-diagonal
        // entry then witnesses indefiniteness; otherwise the block vanishes.
        let mut off = None;
        'search: for (ii, &i) in remaining.iter().enumerate() {
            for &j in &remaining[ii + 1..] {
                if !a[i][j].is_zero() {
                    off = Some((i, j));
                    break 'search;
                }
            }
        }
        match off {
            None => return Ok(()),
            Some((i, j)) => {
                let mut w = vec![Rat::zero(); n];
                w[i] = -a[i][j].clone();
                w[j] = Rat::from_integer(1.into());
                break w;
            }
        }
    };

    // Lift the witness through the eliminations: completing the square on
    // pivot i maps a bad direction w of the Schur complement to the same w
    // extended with w_i = -(1/p) * sum_j row[j] w_j, keeping the form value.
    let mut v = witness;
    for (piv, p, row) in steps.iter().rev() {
        let mut s = Rat::zero();
        for (j, wj) in v.iter().enumerate() {
            if j != *piv && !wj.is_zero() {
                s += &row[j] * wj;
            }
        }
        v[*piv] = -s / p;
    }
    let val = quad_form(q, &v);
    if val >= Rat::zero() {
        return Err(Error::Internal(
            "psd witness lifting produced a nonnegative value".into(),
        ));
    }
    Err(Error::NotPsd {
        direction: v.iter().map(rat_display).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int, rat_parse};

    fn m(rows: &[&[i64]]) -> Vec<RatVec> {
        rows.iter()
            .map(|r| r.iter().map(|&v| rat_int(v)).collect())
            .collect()
    }

    #[test]
    fn unique_solution_two_by_two() {
        // x + y = 1, x - y = 0 has the single solution (1/2, 1/2).
        let rows = vec![
            (vec![rat_int(1), rat_int(1)], rat_int(1)),
            (vec![rat_int(1), rat_int(-1)], rat_int(0)),
        ];
        let sol = solve_linear_system(2, &rows).unwrap();
        assert_eq!(sol, LinearSolution::Unique(vec![rat(1, 2), rat(1, 2)]));
    }

    #[test]
    fn parametric_solution_exposes_null_space() {
        // x + y + z = 1 in three unknowns: base plus a two-dimensional family.
        let rows = vec![(vec![rat_int(1), rat_int(1), rat_int(1)], rat_int(1))];
        match solve_linear_system(3, &rows).unwrap() {
            LinearSolution::Parametric { base, basis } => {
                assert_eq!(basis.len(), 2);
                let lhs: Rat = base.iter().sum();
                assert_eq!(lhs, rat_int(1));
                for v in &basis {
                    let s: Rat = v.iter().sum();
                    assert!(s.is_zero());
                }
            }
            other => panic!("expected parametric, got {other:?}"),
        }
    }

    #[test]
    fn inconsistent_system_detected() {
        let rows = vec![
            (vec![rat_int(1), rat_int(1)], rat_int(1)),
            (vec![rat_int(2), rat_int(2)], rat_int(3)),
        ];
        assert_eq!(
            solve_linear_system(2, &rows).unwrap(),
            LinearSolution::Inconsistent
        );
    }

    #[test]
    fn redundant_rows_still_unique() {
        let rows = vec![
            (vec![rat_int(1), rat_int(0)], rat_int(2)),
            (vec![rat_int(0), rat_int(1)], rat_int(3)),
            (vec![rat_int(1), rat_int(1)], rat_int(5)),
        ];
        let sol = solve_linear_system(2, &rows).unwrap();
        assert_eq!(sol, LinearSolution::Unique(vec![rat_int(2), rat_int(3)]));
    }

    #[test]
    fn psd_accepts_diagonal_and_rank_deficient() {
        assert!(check_psd(&m(&[&[1, 0], &[0, 0]])).is_ok());
        assert!(check_psd(&m(&[&[2, 1], &[1, 1]])).is_ok());
        assert!(check_psd(&m(&[&[0, 0], &[0, 0]])).is_ok());
        // Gram matrix of dependent vectors: psd with nontrivial kernel.
        assert!(check_psd(&m(&[&[1, 1], &[1, 1]])).is_ok());
    }

    #[test]
    fn psd_rejects_with_verified_direction() {
        for q in [
            m(&[&[-1, 0], &[0, 1]]),
            m(&[&[0, 1], &[1, 0]]),
            m(&[&[1, 2], &[2, 1]]),
            m(&[&[1, 0, 0], &[0, 0, 3], &[0, 3, 0]]),
        ] {
            match check_psd(&q) {
                Err(Error::NotPsd { direction }) => {
                    let v: RatVec = direction.iter().map(|s| rat_parse(s).unwrap()).collect();
                    assert!(quad_form(&q, &v) < Rat::zero());
                }
                other => panic!("expected NotPsd, got {other:?}"),
            }
        }
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let q = m(&[&[1, 2], &[0, 1]]);
        assert!(matches!(check_psd(&q), Err(Error::NotSymmetric { .. })));
    }
}
