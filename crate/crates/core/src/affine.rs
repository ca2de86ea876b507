//! Affine forms and linear constraints.
//!
//! A constraint is stored as `form(x) REL 0` with `form = a.x + c`. The file
//! format writes the same constraint as `a.x REL b` with `b = -c`; the json
//! module converts. Relations are `<=`, `<` and `=`; the strict one is legal
//! only inside removed/override cells and strict-feasibility queries.

use num::Zero;

use crate::error::Error;
use crate::rat::{dot, rat_display, Rat, RatVec};

/// `a.x + c` as data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm {
    pub coeffs: RatVec,
    pub constant: Rat,
}

impl AffineForm {
    pub fn new(coeffs: RatVec, constant: Rat) -> Self {
        Self { coeffs, constant }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            coeffs: vec![Rat::zero(); dim],
            constant: Rat::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        dot(&self.coeffs, x) + &self.constant
    }

    /// The form `-(a.x + c)`.
    pub fn negated(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            constant: -self.constant.clone(),
        }
    }

    /// True when every coefficient is zero (the form is a constant).
    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Divides through by the gcd of all numerators over the lcm of all
    /// denominators. The scale is always positive, so the relation the form
    /// sits in keeps its meaning; two constraints describing the same
    /// halfspace normalize to equal data, which makes syntactic
    /// deduplication meaningful.
    pub fn normalized(&self) -> Self {
        let mut entries: Vec<&Rat> = self.coeffs.iter().collect();
        entries.push(&self.constant);
        let mut scale: Option<Rat> = None;
        for e in &entries {
            if !e.is_zero() {
                let abs = if **e < Rat::zero() { -(*e).clone() } else { (*e).clone() };
                scale = Some(match scale {
                    // gcd of rationals: gcd of numerators / lcm of denominators
                    None => abs,
                    Some(s) => {
                        let n = num::integer::gcd(s.numer().clone(), abs.numer().clone());
                        let d = num::integer::lcm(s.denom().clone(), abs.denom().clone());
                        Rat::new(n, d)
                    }
                });
            }
        }
        let Some(scale) = scale else {
            return self.clone();
        };
        Self {
            coeffs: self.coeffs.iter().map(|c| c / &scale).collect(),
            constant: &self.constant / &scale,
        }
    }
}

impl std::fmt::Display for AffineForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                write!(f, "{}*x{}", rat_display(c), i + 1)?;
                first = false;
            } else if *c < Rat::zero() {
                write!(f, " - {}*x{}", rat_display(&-c.clone()), i + 1)?;
            } else {
                write!(f, " + {}*x{}", rat_display(c), i + 1)?;
            }
        }
        if first {
            write!(f, "{}", rat_display(&self.constant))?;
        } else if !self.constant.is_zero() {
            if self.constant < Rat::zero() {
                write!(f, " - {}", rat_display(&-self.constant.clone()))?;
            } else {
                write!(f, " + {}", rat_display(&self.constant))?;
            }
        }
        Ok(())
    }
}

/// Constraint relation against zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `form(x) <= 0`
    Le,
    /// `form(x) < 0`
    Lt,
    /// `form(x) = 0`
    Eq,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Le => "le",
            Relation::Lt => "lt",
            Relation::Eq => "eq",
        }
    }
}

/// `form(x) REL 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub form: AffineForm,
    pub rel: Relation,
}

impl LinearConstraint {
    pub fn new(form: AffineForm, rel: Relation) -> Self {
        Self { form, rel }
    }

    /// `a.x <= b` given as (a, b).
    pub fn le(coeffs: RatVec, rhs: Rat) -> Self {
        Self::new(AffineForm::new(coeffs, -rhs), Relation::Le)
    }

    /// `a.x < b`.
    pub fn lt(coeffs: RatVec, rhs: Rat) -> Self {
        Self::new(AffineForm::new(coeffs, -rhs), Relation::Lt)
    }

    /// `a.x = b`.
    pub fn eq(coeffs: RatVec, rhs: Rat) -> Self {
        Self::new(AffineForm::new(coeffs, -rhs), Relation::Eq)
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    /// Exact satisfaction test.
    pub fn holds_at(&self, x: &[Rat]) -> bool {
        let v = self.form.eval(x);
        match self.rel {
            Relation::Le => v <= Rat::zero(),
            Relation::Lt => v < Rat::zero(),
            Relation::Eq => v.is_zero(),
        }
    }

    /// The same constraint with strict inequality relaxed to weak. Equalities
    /// are unchanged. This is the closure of the single-constraint set.
    pub fn weakened(&self) -> Self {
        let rel = match self.rel {
            Relation::Lt => Relation::Le,
            other => other,
        };
        Self::new(self.form.clone(), rel)
    }

    /// Checks membership of every relation in `allowed`.
    pub fn require_rel(&self, allowed: &[Relation]) -> Result<(), Error> {
        if allowed.contains(&self.rel) {
            Ok(())
        } else {
            Err(Error::StrictRelationNotAllowed)
        }
    }
}

impl std::fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let op = match self.rel {
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Eq => "=",
        };
        write!(f, "{} {} 0", self.form, op)
    }
}

/// Validates that every constraint in a slice has the expected dimension.
pub fn check_dims(rows: &[LinearConstraint], dim: usize) -> Result<(), Error> {
    for r in rows {
        if r.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.dim(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    #[test]
    fn constraint_constructors_match_rhs_convention() {
        // x1 + 2*x2 <= 3 holds at (1, 1) and fails at (2, 1).
        let c = LinearConstraint::le(vec![rat_int(1), rat_int(2)], rat_int(3));
        assert!(c.holds_at(&[rat_int(1), rat_int(1)]));
        assert!(!c.holds_at(&[rat_int(2), rat_int(1)]));
        // Boundary is included for le, excluded for lt.
        let on_boundary = [rat_int(1), rat_int(1)];
        assert!(c.holds_at(&on_boundary));
        let strict = LinearConstraint::lt(vec![rat_int(1), rat_int(2)], rat_int(3));
        assert!(!strict.holds_at(&on_boundary));
    }

    #[test]
    fn equality_holds_only_on_hyperplane() {
        let c = LinearConstraint::eq(vec![rat_int(1), rat_int(-1)], rat_int(0));
        assert!(c.holds_at(&[rat(1, 2), rat(1, 2)]));
        assert!(!c.holds_at(&[rat(1, 2), rat(1, 3)]));
    }

    #[test]
    fn normalization_dedupes_scaled_rows() {
        let a = AffineForm::new(vec![rat_int(2), rat_int(-4)], rat_int(6)).normalized();
        let b = AffineForm::new(vec![rat(1, 3), rat(-2, 3)], rat_int(1)).normalized();
        assert_eq!(a, b);
        // Sign is fixed by the leading coefficient.
        let c = AffineForm::new(vec![rat_int(-2), rat_int(4)], rat_int(-6)).normalized();
        assert_ne!(a, c);
    }

    #[test]
    fn weakened_turns_lt_into_le() {
        let strict = LinearConstraint::lt(vec![rat_int(1)], rat_int(0));
        let weak = strict.weakened();
        assert_eq!(weak.rel, Relation::Le);
        assert!(weak.holds_at(&[rat_int(0)]));
        assert!(!strict.holds_at(&[rat_int(0)]));
    }
}
