//! JSON problem files with exact string rationals.
//!
//! Every rational serializes canonically as `"p"` or `"p/q"` with q > 0
//! and no spaces, so files round-trip byte-identically and stay exact in
//! any consumer. A constraint object `{"a": [...], "b": "p/q", "rel":
//! "le"|"lt"|"eq"}` encodes a·x rel b; a set is `{"hull": [constraint],
//! "removed": [[constraint]]}`; a function is `{"base", "domain",
//! "overrides"}` where the base is a tagged max-affine or quadratic
//! record and the domain is a set or the keyword `"full"`. A geometric
//! problem file carries `{"dimension", "objective", "feasible_set"}` and
//! a constrained one `{"dimension", "objective", "geometric_set",
//! "functional_constraints", "slater_hint"?}`.

use crate::affine::{AffineForm, LinearConstraint, Relation};
use crate::error::Error;
use crate::funcs::{ConvexBase, Domain, NCFunction, Override};
use crate::kkt::ConstrainedProblem;
use crate::opt::{DiffSet, Problem};
use crate::oracle::OracleSet;
use crate::rat::{rat_display, rat_parse, ExtVal, Rat, RatVec};
use crate::sets::{CarvedPolyhedron, Cell, FGSet, FgWeights, Polyhedron};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelJson {
    #[serde(rename = "le")]
    Le,
    #[serde(rename = "lt")]
    Lt,
    #[serde(rename = "eq")]
    Eq,
}

/// One linear constraint a·x rel b.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintJson {
    pub a: Vec<String>,
    pub b: String,
    pub rel: RelJson,
}

/// A carved polyhedron: hull rows plus removed boundary cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetJson {
    pub hull: Vec<ConstraintJson>,
    #[serde(default)]
    pub removed: Vec<Vec<ConstraintJson>>,
}

/// One affine piece a·x + b of a max-affine base.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceJson {
    pub a: Vec<String>,
    pub b: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BaseJson {
    #[serde(rename = "maxaffine")]
    MaxAffine { pieces: Vec<PieceJson> },
    #[serde(rename = "quadratic")]
    Quadratic {
        #[serde(rename = "Q")]
        q: Vec<Vec<String>>,
        b: Vec<String>,
        c: String,
    },
}

/// A set, or the keyword `"full"` for the whole space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainJson {
    Keyword(String),
    Set(SetJson),
}

/// One boundary override; `value` is a rational or `"inf"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverrideJson {
    pub cell: Vec<ConstraintJson>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionJson {
    pub base: BaseJson,
    pub domain: DomainJson,
    #[serde(default)]
    pub overrides: Vec<OverrideJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometricFileJson {
    pub dimension: usize,
    pub objective: FunctionJson,
    pub feasible_set: SetJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstrainedFileJson {
    pub dimension: usize,
    pub objective: FunctionJson,
    pub geometric_set: SetJson,
    pub functional_constraints: Vec<FunctionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slater_hint: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum OracleSetJson {
    #[serde(rename = "halfspace")]
    HalfSpace { normal: Vec<String>, offset: String },
    #[serde(rename = "ball")]
    Ball {
        c: Vec<String>,
        r2: String,
        closed: bool,
    },
    #[serde(rename = "rationals")]
    Rationals { dim: usize },
    #[serde(rename = "intervals")]
    Intervals { bounds: Vec<(String, String)> },
    #[serde(rename = "carved")]
    Carved { dim: usize, set: SetJson },
    #[serde(rename = "complement")]
    Complement { of: Box<OracleSetJson> },
    #[serde(rename = "union")]
    Union { parts: Vec<OracleSetJson> },
    #[serde(rename = "intersection")]
    Intersection { parts: Vec<OracleSetJson> },
    #[serde(rename = "product")]
    Product {
        left: Box<OracleSetJson>,
        right: Box<OracleSetJson>,
    },
}

/// A membership-oracle file: the set plus optional segment endpoint pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleFileJson {
    pub dimension: usize,
    pub set: OracleSetJson,
    #[serde(default)]
    pub pairs: Vec<(Vec<String>, Vec<String>)>,
}

/// A parsed problem file, in either of the two accepted shapes.
#[derive(Debug, Clone)]
pub enum ProblemInstance {
    Geometric(Problem),
    Constrained(ConstrainedProblem),
}

impl ProblemInstance {
    pub fn dim(&self) -> usize {
        match self {
            ProblemInstance::Geometric(p) => p.dim(),
            ProblemInstance::Constrained(cp) => cp.dim(),
        }
    }

    pub fn objective(&self) -> &NCFunction {
        match self {
            ProblemInstance::Geometric(p) => p.objective(),
            ProblemInstance::Constrained(cp) => cp.objective(),
        }
    }

    /// The geometric set the problem minimizes over, ignoring any
    /// functional constraints.
    pub fn geometric_set(&self) -> &CarvedPolyhedron {
        match self {
            ProblemInstance::Geometric(p) => p.feasible_set(),
            ProblemInstance::Constrained(cp) => cp.geometric_set(),
        }
    }
}

/// A parsed oracle file.
#[derive(Debug, Clone)]
pub struct OracleInstance {
    pub set: OracleSet,
    pub pairs: Vec<(RatVec, RatVec)>,
}

pub fn parse_problem(text: &str) -> Result<ProblemInstance, Error> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Json("expected a JSON object at the top level".into()))?;
    if obj.contains_key("feasible_set") {
        let file: GeometricFileJson =
            serde_json::from_value(value).map_err(|e| Error::Json(e.to_string()))?;
        Ok(ProblemInstance::Geometric(geometric_from_json(&file)?))
    } else if obj.contains_key("geometric_set") {
        let file: ConstrainedFileJson =
            serde_json::from_value(value).map_err(|e| Error::Json(e.to_string()))?;
        Ok(ProblemInstance::Constrained(constrained_from_json(&file)?))
    } else {
        Err(Error::Json(
            "a problem file needs either a \"feasible_set\" or a \"geometric_set\" key".into(),
        ))
    }
}

pub fn parse_oracle(text: &str) -> Result<OracleInstance, Error> {
    let file: OracleFileJson =
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    let set = oracle_set_from_json(&file.set)?;
    if set.dim() != file.dimension {
        return Err(Error::DimensionMismatch { expected: file.dimension, found: set.dim() });
    }
    let mut pairs = Vec::new();
    for (x, y) in &file.pairs {
        pairs.push((point_from_json(file.dimension, x)?, point_from_json(file.dimension, y)?));
    }
    Ok(OracleInstance { set, pairs })
}

/// Serializes any wire value in the canonical file layout: two-space
/// pretty printing with a trailing newline.
pub fn to_canonical_string<T: Serialize>(value: &T) -> Result<String, Error> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Json(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn geometric_from_json(file: &GeometricFileJson) -> Result<Problem, Error> {
    let objective = function_from_json(file.dimension, &file.objective)?;
    let feasible_set = set_from_json(file.dimension, &file.feasible_set)?;
    Problem::new(objective, feasible_set)
}

pub fn geometric_to_json(p: &Problem) -> GeometricFileJson {
    GeometricFileJson {
        dimension: p.dim(),
        objective: function_to_json(p.objective()),
        feasible_set: set_to_json(p.feasible_set()),
    }
}

pub fn constrained_from_json(file: &ConstrainedFileJson) -> Result<ConstrainedProblem, Error> {
    let objective = function_from_json(file.dimension, &file.objective)?;
    let geometric_set = set_from_json(file.dimension, &file.geometric_set)?;
    let mut constraints = Vec::new();
    for g in &file.functional_constraints {
        constraints.push(function_from_json(file.dimension, g)?);
    }
    let hint = match &file.slater_hint {
        Some(coords) => Some(point_from_json(file.dimension, coords)?),
        None => None,
    };
    ConstrainedProblem::new(objective, geometric_set, constraints, hint)
}

pub fn constrained_to_json(cp: &ConstrainedProblem) -> ConstrainedFileJson {
    ConstrainedFileJson {
        dimension: cp.dim(),
        objective: function_to_json(cp.objective()),
        geometric_set: set_to_json(cp.geometric_set()),
        functional_constraints: cp.constraints().iter().map(function_to_json).collect(),
        slater_hint: cp.slater_hint().map(|h| rats_to_json(h)),
    }
}

pub fn constraint_from_json(dim: usize, c: &ConstraintJson) -> Result<LinearConstraint, Error> {
    let a = point_from_json(dim, &c.a)?;
    let b = rat_parse(&c.b)?;
    Ok(match c.rel {
        RelJson::Le => LinearConstraint::le(a, b),
        RelJson::Lt => LinearConstraint::lt(a, b),
        RelJson::Eq => LinearConstraint::eq(a, b),
    })
}

pub fn constraint_to_json(row: &LinearConstraint) -> ConstraintJson {
    ConstraintJson {
        a: rats_to_json(&row.form.coeffs),
        b: rat_display(&-row.form.constant.clone()),
        rel: match row.rel {
            Relation::Le => RelJson::Le,
            Relation::Lt => RelJson::Lt,
            Relation::Eq => RelJson::Eq,
        },
    }
}

pub fn rows_from_json(dim: usize, rows: &[ConstraintJson]) -> Result<Vec<LinearConstraint>, Error> {
    rows.iter().map(|c| constraint_from_json(dim, c)).collect()
}

pub fn rows_to_json(rows: &[LinearConstraint]) -> Vec<ConstraintJson> {
    rows.iter().map(constraint_to_json).collect()
}

pub fn cell_from_json(dim: usize, rows: &[ConstraintJson]) -> Result<Cell, Error> {
    Cell::new(dim, rows_from_json(dim, rows)?)
}

pub fn set_from_json(dim: usize, set: &SetJson) -> Result<CarvedPolyhedron, Error> {
    let hull = Polyhedron::new(dim, rows_from_json(dim, &set.hull)?)?;
    let mut cells = Vec::new();
    for cell in &set.removed {
        cells.push(cell_from_json(dim, cell)?);
    }
    CarvedPolyhedron::new(hull, cells)
}

pub fn set_to_json(set: &CarvedPolyhedron) -> SetJson {
    SetJson {
        hull: rows_to_json(set.hull().rows()),
        removed: set.removed().iter().map(|c| rows_to_json(c.rows())).collect(),
    }
}

/// A solution difference set shares the set schema: base rows as the
/// hull, subtracted cells as removed.
pub fn diff_set_to_json(set: &DiffSet) -> SetJson {
    SetJson {
        hull: rows_to_json(set.base.rows()),
        removed: set.removed.iter().map(|c| rows_to_json(c.rows())).collect(),
    }
}

pub fn function_from_json(dim: usize, f: &FunctionJson) -> Result<NCFunction, Error> {
    let base = base_from_json(dim, &f.base)?;
    let domain = match &f.domain {
        DomainJson::Keyword(word) if word == "full" => Domain::Full { dim },
        DomainJson::Keyword(word) => {
            return Err(Error::Json(format!(
                "unknown domain keyword {word:?}; expected \"full\" or a set object"
            )));
        }
        DomainJson::Set(set) => Domain::Carved(set_from_json(dim, set)?),
    };
    let mut overrides = Vec::new();
    for ov in &f.overrides {
        overrides.push(Override {
            cell: cell_from_json(dim, &ov.cell)?,
            value: extval_from_json(&ov.value)?,
        });
    }
    NCFunction::new(base, domain, overrides)
}

pub fn function_to_json(f: &NCFunction) -> FunctionJson {
    FunctionJson {
        base: base_to_json(f.base()),
        domain: match f.domain() {
            Domain::Full { .. } => DomainJson::Keyword("full".into()),
            Domain::Carved(set) => DomainJson::Set(set_to_json(set)),
        },
        overrides: f
            .overrides()
            .iter()
            .map(|ov| OverrideJson {
                cell: rows_to_json(ov.cell.rows()),
                value: extval_to_json(&ov.value),
            })
            .collect(),
    }
}

fn base_from_json(dim: usize, base: &BaseJson) -> Result<ConvexBase, Error> {
    match base {
        BaseJson::MaxAffine { pieces } => {
            if pieces.is_empty() {
                return Err(Error::Json("a max-affine base needs at least one piece".into()));
            }
            let mut forms = Vec::new();
            for piece in pieces {
                forms.push(AffineForm::new(
                    point_from_json(dim, &piece.a)?,
                    rat_parse(&piece.b)?,
                ));
            }
            Ok(ConvexBase::max_affine(forms))
        }
        BaseJson::Quadratic { q, b, c } => {
            if q.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: q.len() });
            }
            let mut rows = Vec::new();
            for row in q {
                rows.push(point_from_json(dim, row)?);
            }
            Ok(ConvexBase::quadratic(rows, point_from_json(dim, b)?, rat_parse(c)?))
        }
    }
}

fn base_to_json(base: &ConvexBase) -> BaseJson {
    match base {
        ConvexBase::MaxAffine { pieces } => BaseJson::MaxAffine {
            pieces: pieces
                .iter()
                .map(|p| PieceJson { a: rats_to_json(&p.coeffs), b: rat_display(&p.constant) })
                .collect(),
        },
        ConvexBase::Quadratic { q, b, c } => BaseJson::Quadratic {
            q: q.iter().map(|row| rats_to_json(row)).collect(),
            b: rats_to_json(b),
            c: rat_display(c),
        },
    }
}

pub fn oracle_set_from_json(set: &OracleSetJson) -> Result<OracleSet, Error> {
    Ok(match set {
        OracleSetJson::HalfSpace { normal, offset } => OracleSet::HalfSpace {
            normal: parse_rats(normal)?,
            offset: rat_parse(offset)?,
        },
        OracleSetJson::Ball { c, r2, closed } => OracleSet::Ball {
            center: parse_rats(c)?,
            radius_sq: rat_parse(r2)?,
            closed: *closed,
        },
        OracleSetJson::Rationals { dim } => OracleSet::Rationals { dim: *dim },
        OracleSetJson::Intervals { bounds } => {
            let mut parsed = Vec::new();
            for (lo, hi) in bounds {
                parsed.push((rat_parse(lo)?, rat_parse(hi)?));
            }
            OracleSet::Intervals { bounds: parsed }
        }
        OracleSetJson::Carved { dim, set } => OracleSet::Carved(set_from_json(*dim, set)?),
        OracleSetJson::Complement { of } => {
            OracleSet::Complement(Box::new(oracle_set_from_json(of)?))
        }
        OracleSetJson::Union { parts } => {
            OracleSet::Union(parts.iter().map(oracle_set_from_json).collect::<Result<_, _>>()?)
        }
        OracleSetJson::Intersection { parts } => OracleSet::Intersection(
            parts.iter().map(oracle_set_from_json).collect::<Result<_, _>>()?,
        ),
        OracleSetJson::Product { left, right } => OracleSet::Product(
            Box::new(oracle_set_from_json(left)?),
            Box::new(oracle_set_from_json(right)?),
        ),
    })
}

pub fn oracle_set_to_json(set: &OracleSet) -> OracleSetJson {
    match set {
        OracleSet::HalfSpace { normal, offset } => OracleSetJson::HalfSpace {
            normal: rats_to_json(normal),
            offset: rat_display(offset),
        },
        OracleSet::Ball { center, radius_sq, closed } => OracleSetJson::Ball {
            c: rats_to_json(center),
            r2: rat_display(radius_sq),
            closed: *closed,
        },
        OracleSet::Rationals { dim } => OracleSetJson::Rationals { dim: *dim },
        OracleSet::Intervals { bounds } => OracleSetJson::Intervals {
            bounds: bounds
                .iter()
                .map(|(lo, hi)| (rat_display(lo), rat_display(hi)))
                .collect(),
        },
        OracleSet::Carved(cp) => OracleSetJson::Carved { dim: cp.dim(), set: set_to_json(cp) },
        OracleSet::Complement(inner) => {
            OracleSetJson::Complement { of: Box::new(oracle_set_to_json(inner)) }
        }
        OracleSet::Union(parts) => {
            OracleSetJson::Union { parts: parts.iter().map(oracle_set_to_json).collect() }
        }
        OracleSet::Intersection(parts) => {
            OracleSetJson::Intersection { parts: parts.iter().map(oracle_set_to_json).collect() }
        }
        OracleSet::Product(a, b) => OracleSetJson::Product {
            left: Box::new(oracle_set_to_json(a)),
            right: Box::new(oracle_set_to_json(b)),
        },
    }
}

/// Finitely generated set as `{"points": [...], "rays": [...]}`.
pub fn fgset_to_json(set: &FGSet) -> serde_json::Value {
    serde_json::json!({
        "points": set.points().iter().map(|p| rats_to_json(p)).collect::<Vec<_>>(),
        "rays": set.rays().iter().map(|r| rats_to_json(r)).collect::<Vec<_>>(),
    })
}

pub fn weights_to_json(w: &FgWeights) -> serde_json::Value {
    serde_json::json!({
        "point_weights": rats_to_json(&w.point_weights),
        "ray_weights": rats_to_json(&w.ray_weights),
    })
}

pub fn rats_to_json(values: &[Rat]) -> Vec<String> {
    values.iter().map(rat_display).collect()
}

pub fn parse_rats(values: &[String]) -> Result<RatVec, Error> {
    values.iter().map(|s| rat_parse(s)).collect()
}

pub fn point_from_json(dim: usize, coords: &[String]) -> Result<RatVec, Error> {
    if coords.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: coords.len() });
    }
    parse_rats(coords)
}

pub fn extval_from_json(value: &str) -> Result<ExtVal, Error> {
    if value == "inf" {
        Ok(ExtVal::PlusInf)
    } else {
        Ok(ExtVal::Finite(rat_parse(value)?))
    }
}

pub fn extval_to_json(value: &ExtVal) -> String {
    match value {
        ExtVal::Finite(v) => rat_display(v),
        ExtVal::PlusInf => "inf".into(),
    }
}
