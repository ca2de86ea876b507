//! Index-space scanning helpers, data-parallel by default with a
//! sequential fallback.
//!
//! With the `parallel` feature (on by default) the public functions fan out
//! over rayon while keeping sequential semantics: `first_success` returns
//! the match with the lowest index, `scan_min` returns the exact minimum
//! with every attaining index in ascending order, and the first error by
//! index wins when an error precedes every match. The `_seq` variants are
//! always compiled so the two implementations can be compared directly.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Error;

/// Sequential scan for the first index whose test produces a value.
pub fn first_success_seq<R>(
    n: usize,
    test: impl Fn(usize) -> Result<Option<R>, Error>,
) -> Result<Option<(usize, R)>, Error> {
    for i in 0..n {
        if let Some(r) = test(i)? {
            return Ok(Some((i, r)));
        }
    }
    Ok(None)
}

/// First index in 0..n whose test produces a value, lowest index first.
#[cfg(feature = "parallel")]
pub fn first_success<R: Send>(
    n: usize,
    test: impl Fn(usize) -> Result<Option<R>, Error> + Sync,
) -> Result<Option<(usize, R)>, Error> {
    (0..n)
        .into_par_iter()
        .find_map_first(|i| match test(i) {
            Err(e) => Some(Err(e)),
            Ok(Some(r)) => Some(Ok((i, r))),
            Ok(None) => None,
        })
        .transpose()
}

#[cfg(not(feature = "parallel"))]
pub fn first_success<R: Send>(
    n: usize,
    test: impl Fn(usize) -> Result<Option<R>, Error> + Sync,
) -> Result<Option<(usize, R)>, Error> {
    first_success_seq(n, test)
}

/// Sequential exact minimum over 0..n with all attaining indices.
pub fn scan_min_seq<V: Ord>(
    n: usize,
    eval: impl Fn(usize) -> Result<V, Error>,
) -> Result<Option<(V, Vec<usize>)>, Error> {
    let mut best: Option<(V, Vec<usize>)> = None;
    for i in 0..n {
        let v = eval(i)?;
        match &mut best {
            None => best = Some((v, vec![i])),
            Some((bv, idxs)) => {
                if v < *bv {
                    *bv = v;
                    idxs.clear();
                    idxs.push(i);
                } else if v == *bv {
                    idxs.push(i);
                }
            }
        }
    }
    Ok(best)
}

/// Exact minimum of eval over 0..n, with every attaining index in
/// ascending order.
#[cfg(feature = "parallel")]
pub fn scan_min<V: Ord + Send>(
    n: usize,
    eval: impl Fn(usize) -> Result<V, Error> + Sync,
) -> Result<Option<(V, Vec<usize>)>, Error> {
    let reduced = (0..n)
        .into_par_iter()
        .map(|i| eval(i).map(|v| (v, vec![i])))
        .try_reduce_with(|(va, mut ia), (vb, mut ib)| {
            Ok(match va.cmp(&vb) {
                std::cmp::Ordering::Less => (va, ia),
                std::cmp::Ordering::Greater => (vb, ib),
                std::cmp::Ordering::Equal => {
                    ia.append(&mut ib);
                    (va, ia)
                }
            })
        })
        .transpose()?;
    Ok(reduced.map(|(v, mut idxs)| {
        idxs.sort_unstable();
        (v, idxs)
    }))
}

#[cfg(not(feature = "parallel"))]
pub fn scan_min<V: Ord + Send>(
    n: usize,
    eval: impl Fn(usize) -> Result<V, Error> + Sync,
) -> Result<Option<(V, Vec<usize>)>, Error> {
    scan_min_seq(n, eval)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_success_returns_lowest_index() {
        let test = |i: usize| Ok(if i % 7 == 3 { Some(i * 10) } else { None });
        assert_eq!(first_success(100, test).unwrap(), Some((3, 30)));
        assert_eq!(first_success_seq(100, test).unwrap(), Some((3, 30)));
        assert_eq!(first_success(3, test).unwrap(), None);
    }

    #[test]
    fn first_success_prefers_early_match_over_late_error() {
        let test = |i: usize| {
            if i == 50 {
                Err(Error::Internal("late".into()))
            } else if i == 5 {
                Ok(Some(()))
            } else {
                Ok(None)
            }
        };
        assert_eq!(first_success(100, test).unwrap(), Some((5, ())));
    }

    #[test]
    fn scan_min_collects_all_argmins_in_order() {
        let vals = [5, 2, 7, 2, 9, 2, 4];
        let eval = |i: usize| Ok(vals[i]);
        let (v, idxs) = scan_min(vals.len(), eval).unwrap().unwrap();
        assert_eq!(v, 2);
        assert_eq!(idxs, vec![1, 3, 5]);
        assert_eq!(scan_min_seq(vals.len(), eval).unwrap().unwrap(), (2, vec![1, 3, 5]));
        assert_eq!(scan_min(0, eval).unwrap(), None);
    }

    #[test]
    fn parallel_and_sequential_agree_on_large_scans() {
        let eval = |i: usize| Ok((i as i64 - 3000).abs());
        let par = scan_min(10_000, eval).unwrap().unwrap();
        let seq = scan_min_seq(10_000, eval).unwrap().unwrap();
        assert_eq!(par, seq);
        assert_eq!(par.0, 0);
        assert_eq!(par.1, vec![3000]);
    }
}
