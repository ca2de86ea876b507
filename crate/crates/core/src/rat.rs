//! Exact rational scalars and vectors.
//!
//! Every quantity in this crate is a `Rat`: an arbitrary-precision rational
//! kept in lowest terms with a positive denominator. There is no floating
//! point anywhere in the solve paths; plotting is the only consumer that
//! rounds, and it does so at the last moment.
//!
//! The canonical text form is `"p/q"` with `q > 1`, or plain `"p"` when the
//! denominator is one. Parsing accepts any `p/q` with nonzero `q` and reduces.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision rational scalar.
pub type Rat = BigRational;

/// Shorthand for a dense rational vector.
pub type RatVec = Vec<Rat>;

/// Builds a rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Builds the rational `p/q`. Panics if `q == 0`; intended for literals.
pub fn rat(p: i64, q: i64) -> Rat {
    assert!(q != 0, "rational literal with zero denominator");
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parses the canonical text form `"p"` or `"p/q"`.
pub fn rat_parse(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let bad = || Error::ParseRational(s.to_string());
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let numer: BigInt = num_str.trim().parse().map_err(|_| bad())?;
    let denom: BigInt = match den_str {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(numer, denom))
}

/// Formats a rational in canonical form: `"p"` when integral, else `"p/q"`.
pub fn rat_display(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses a whole vector of canonical rationals.
pub fn vec_parse(parts: &[&str]) -> Result<RatVec, Error> {
    parts.iter().map(|p| rat_parse(p)).collect()
}

/// Zero vector of the given length.
pub fn zeros(n: usize) -> RatVec {
    vec![Rat::zero(); n]
}

/// Componentwise `a + b`. Panics on length mismatch; callers validate dims.
pub fn vadd(a: &[Rat], b: &[Rat]) -> RatVec {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Componentwise `a - b`.
pub fn vsub(a: &[Rat], b: &[Rat]) -> RatVec {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Scalar multiple `t * a`.
pub fn vscale(t: &Rat, a: &[Rat]) -> RatVec {
    a.iter().map(|x| t * x).collect()
}

/// Inner product.
pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

/// The point `a + t*(b - a)`.
pub fn lerp(a: &[Rat], b: &[Rat], t: &Rat) -> RatVec {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// True when every component is zero.
pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Sum of absolute values (the l1 norm).
pub fn l1_norm(a: &[Rat]) -> Rat {
    a.iter().fold(Rat::zero(), |acc, x| acc + x.abs())
}

/// Renders a point as comma-separated canonical rationals, e.g. `(0, 1/2)`.
pub fn point_display(p: &[Rat]) -> String {
    let parts: Vec<String> = p.iter().map(rat_display).collect();
    format!("({})", parts.join(", "))
}

/// A rational extended with plus infinity, the value of a function outside
/// its domain. Ordering places every finite value below `PlusInf`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtVal {
    Finite(Rat),
    PlusInf,
}

impl ExtVal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtVal::Finite(_))
    }

    /// The finite value, if any.
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtVal::Finite(r) => Some(r),
            ExtVal::PlusInf => None,
        }
    }
}

impl PartialOrd for ExtVal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtVal {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self, other) {
            (ExtVal::Finite(a), ExtVal::Finite(b)) => a.cmp(b),
            (ExtVal::Finite(_), ExtVal::PlusInf) => Ordering::Less,
            (ExtVal::PlusInf, ExtVal::Finite(_)) => Ordering::Greater,
            (ExtVal::PlusInf, ExtVal::PlusInf) => Ordering::Equal,
        }
    }
}

impl std::fmt::Display for ExtVal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtVal::Finite(r) => write!(f, "{}", rat_display(r)),
            ExtVal::PlusInf => write!(f, "inf"),
        }
    }
}

impl From<Rat> for ExtVal {
    fn from(r: Rat) -> Self {
        ExtVal::Finite(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_reduces_to_lowest_terms() {
        let r = rat_parse("2/4").unwrap();
        assert_eq!(r, rat(1, 2));
        assert_eq!(rat_display(&r), "1/2");
    }

    #[test]
    fn parse_normalizes_denominator_sign() {
        let r = rat_parse("1/-3").unwrap();
        assert_eq!(rat_display(&r), "-1/3");
        let r = rat_parse("-2/-6").unwrap();
        assert_eq!(rat_display(&r), "1/3");
    }

    #[test]
    fn canonical_forms_round_trip() {
        for s in ["0", "7", "-3", "1/2", "-5/7", "22/7"] {
            let r = rat_parse(s).unwrap();
            assert_eq!(rat_display(&r), s);
        }
    }

    #[test]
    fn integers_display_without_denominator() {
        assert_eq!(rat_display(&rat(6, 3)), "2");
        assert_eq!(rat_display(&rat(0, 5)), "0");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(rat_parse("1/0").is_err());
        assert!(rat_parse("x").is_err());
        assert!(rat_parse("1/").is_err());
    }

    #[test]
    fn extval_ordering_puts_infinity_last() {
        let a = ExtVal::Finite(rat(3, 1));
        let b = ExtVal::Finite(rat(1, 2));
        assert!(b < a);
        assert!(a < ExtVal::PlusInf);
        assert_eq!(ExtVal::PlusInf, ExtVal::PlusInf);
    }

    #[test]
    fn vector_helpers_are_exact() {
        let a = vec![rat(1, 3), rat(1, 6)];
        let b = vec![rat(2, 3), rat(5, 6)];
        assert_eq!(vadd(&a, &b), vec![rat_int(1), rat_int(1)]);
        assert_eq!(dot(&a, &b), rat(2, 9) + rat(5, 36));
        let mid = lerp(&a, &b, &rat(1, 2));
        assert_eq!(mid, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(l1_norm(&vec![rat(-1, 2), rat(1, 3)]), rat(5, 6));
    }
}
