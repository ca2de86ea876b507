//! Brute-force verification oracles: membership-set expression trees, dyadic
//! directional witness search, grid liminf brackets, grid minimization, and
//! grid-local minimizer enumeration.
//!
//! Everything here is evidence, not certification. Grid scans return exact
//! rational brackets whose soundness rests on the scanned function being
//! gradient-bounded over the scan region; the exact modules certify, the
//! oracle corroborates or refutes.

use num::Signed;

use crate::error::Error;
use crate::funcs::{Domain, NCFunction};
use crate::par;
use crate::rat::{dot, l1_norm, lerp, rat, rat_int, vadd, ExtVal, Rat, RatVec};
use crate::sets::CarvedPolyhedron;

/// Hard limit on the number of grid points a single scan may enumerate.
pub const GRID_POINT_CAP: u64 = 1 << 22;

/// Default number of dyadic levels for directional witness search.
pub const DEFAULT_WITNESS_LEVELS: u32 = 30;

const LIMINF_SUBDIVISIONS: i64 = 4;
const CANDIDATE_CAP: usize = 64;
const SAMPLE_CAP: usize = 512;
const PAIR_CAP: u64 = 100_000;

/// Membership test at exact rational points, the only interface the
/// directional witness search needs.
pub trait MembershipOracle {
    fn dim(&self) -> usize;
    fn member(&self, x: &[Rat]) -> Result<bool, Error>;
}

impl MembershipOracle for CarvedPolyhedron {
    fn dim(&self) -> usize {
        CarvedPolyhedron::dim(self)
    }

    fn member(&self, x: &[Rat]) -> Result<bool, Error> {
        CarvedPolyhedron::member(self, x)
    }
}

/// Set expression tree with exactly decidable membership at rational points.
#[derive(Debug, Clone)]
pub enum OracleSet {
    /// normal·x ≤ offset.
    HalfSpace { normal: RatVec, offset: Rat },
    /// ∥x − center∥² ≤ radius_sq, or < when open.
    Ball {
        center: RatVec,
        radius_sq: Rat,
        closed: bool,
    },
    /// Every rational point of the given dimension.
    Rationals { dim: usize },
    /// Product of closed intervals.
    Intervals { bounds: Vec<(Rat, Rat)> },
    Carved(CarvedPolyhedron),
    Complement(Box<OracleSet>),
    Union(Vec<OracleSet>),
    Intersection(Vec<OracleSet>),
    Product(Box<OracleSet>, Box<OracleSet>),
}

impl OracleSet {
    pub fn dim(&self) -> usize {
        match self {
            OracleSet::HalfSpace { normal, .. } => normal.len(),
            OracleSet::Ball { center, .. } => center.len(),
            OracleSet::Rationals { dim } => *dim,
            OracleSet::Intervals { bounds } => bounds.len(),
            OracleSet::Carved(cp) => cp.dim(),
            OracleSet::Complement(inner) => inner.dim(),
            OracleSet::Union(parts) | OracleSet::Intersection(parts) => {
                parts.first().map_or(0, OracleSet::dim)
            }
            OracleSet::Product(a, b) => a.dim() + b.dim(),
        }
    }

    pub fn member(&self, x: &[Rat]) -> Result<bool, Error> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        match self {
            OracleSet::HalfSpace { normal, offset } => Ok(dot(normal, x) <= *offset),
            OracleSet::Ball {
                center,
                radius_sq,
                closed,
            } => {
                let mut d2 = rat_int(0);
                for (xi, ci) in x.iter().zip(center) {
                    let d = xi - ci;
                    d2 += &d * &d;
                }
                Ok(if *closed {
                    d2 <= *radius_sq
                } else {
                    d2 < *radius_sq
                })
            }
            OracleSet::Rationals { .. } => Ok(true),
            OracleSet::Intervals { bounds } => Ok(bounds
                .iter()
                .zip(x)
                .all(|((lo, hi), xi)| lo <= xi && xi <= hi)),
            OracleSet::Carved(cp) => cp.member(x),
            OracleSet::Complement(inner) => Ok(!inner.member(x)?),
            OracleSet::Union(parts) => {
                for p in parts {
                    if p.member(x)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            OracleSet::Intersection(parts) => {
                for p in parts {
                    if !p.member(x)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            OracleSet::Product(a, b) => {
                let (left, right) = x.split_at(a.dim());
                Ok(a.member(left)? && b.member(right)?)
            }
        }
    }
}

impl MembershipOracle for OracleSet {
    fn dim(&self) -> usize {
        OracleSet::dim(self)
    }

    fn member(&self, x: &[Rat]) -> Result<bool, Error> {
        OracleSet::member(self, x)
    }
}

/// Rectangular rational grid: an axis-aligned box, a spacing, and a
/// refinement-level count for the scans that shrink around a point.
#[derive(Debug, Clone)]
pub struct GridSpec {
    bounds: Vec<(Rat, Rat)>,
    step: Rat,
    levels: u32,
    counts: Vec<u64>,
    total: u64,
}

impl GridSpec {
    pub fn new(bounds: Vec<(Rat, Rat)>, step: Rat, levels: u32) -> Result<Self, Error> {
        if bounds.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if step <= rat_int(0) {
            return Err(Error::InvalidGrid("step must be positive".into()));
        }
        if levels == 0 {
            return Err(Error::InvalidGrid("at least one level is required".into()));
        }
        let mut counts = Vec::with_capacity(bounds.len());
        let mut total: u64 = 1;
        for (lo, hi) in &bounds {
            if lo > hi {
                return Err(Error::InvalidGrid(format!(
                    "empty interval [{}, {}]",
                    crate::rat::rat_display(lo),
                    crate::rat::rat_display(hi)
                )));
            }
            let span = (hi - lo) / &step;
            let count = u64::try_from(span.floor().to_integer())
                .unwrap_or(u64::MAX)
                .saturating_add(1);
            total = total.saturating_mul(count);
            counts.push(count);
        }
        if total > GRID_POINT_CAP {
            return Err(Error::CapExceeded {
                what: "grid points",
                limit: GRID_POINT_CAP as usize,
                found: usize::try_from(total).unwrap_or(usize::MAX),
            });
        }
        Ok(GridSpec {
            bounds,
            step,
            levels,
            counts,
            total,
        })
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn step(&self) -> &Rat {
        &self.step
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn bounds(&self) -> &[(Rat, Rat)] {
        &self.bounds
    }

    /// Number of grid points.
    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    fn multi(&self, flat: u64) -> Vec<u64> {
        let mut rest = flat;
        let mut idx = vec![0u64; self.counts.len()];
        for (i, count) in self.counts.iter().enumerate().rev() {
            idx[i] = rest % count;
            rest /= count;
        }
        idx
    }

    fn flat(&self, multi: &[u64]) -> u64 {
        let mut flat = 0u64;
        for (i, count) in self.counts.iter().enumerate() {
            flat = flat * count + multi[i];
        }
        flat
    }

    fn point_at(&self, multi: &[u64]) -> RatVec {
        multi
            .iter()
            .zip(&self.bounds)
            .map(|(k, (lo, _))| lo + rat_int(*k as i64) * &self.step)
            .collect()
    }

    /// Grid point for a flat index, row-major over the axes.
    pub fn point(&self, flat: u64) -> RatVec {
        self.point_at(&self.multi(flat))
    }

    /// True when x lies inside the grid's box.
    pub fn contains(&self, x: &[Rat]) -> bool {
        x.len() == self.bounds.len()
            && self
                .bounds
                .iter()
                .zip(x)
                .all(|((lo, hi), xi)| lo <= xi && xi <= hi)
    }

    /// Largest coordinate magnitude over the box.
    pub(crate) fn max_abs(&self) -> Rat {
        let mut m = rat_int(0);
        for (lo, hi) in &self.bounds {
            let a = lo.abs().max(hi.abs());
            if a > m {
                m = a;
            }
        }
        m
    }
}

/// Outcome of the dyadic directional witness search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HoOutcome {
    /// x + t(y − x) lies in the set for this t.
    FoundWitness(Rat),
    /// No dyadic t down to 2^(−levels) put the probe in the set.
    NoneUpTo(u32),
}

/// Searches t ∈ {1/2, 1/4, …, 2^(−levels)} for the first t with
/// x + t(y − x) in the set. Both endpoints must be members.
pub fn ho_witness_test(
    set: &dyn MembershipOracle,
    x: &[Rat],
    y: &[Rat],
    levels: u32,
) -> Result<HoOutcome, Error> {
    let dim = set.dim();
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: x.len(),
        });
    }
    if y.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: y.len(),
        });
    }
    if !set.member(x)? {
        return Err(Error::EndpointNotInSet { which: "start" });
    }
    if !set.member(y)? {
        return Err(Error::EndpointNotInSet { which: "end" });
    }
    let half = rat(1, 2);
    let mut t = rat_int(1);
    for _ in 1..=levels {
        t *= &half;
        if set.member(&lerp(x, y, &t))? {
            return Ok(HoOutcome::FoundWitness(t));
        }
    }
    Ok(HoOutcome::NoneUpTo(levels))
}

/// Exact rational interval [lo, hi], possibly infinite on both ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bracket {
    pub lo: ExtVal,
    pub hi: ExtVal,
}

impl Bracket {
    pub fn contains(&self, v: &ExtVal) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn width(&self) -> ExtVal {
        match (&self.lo, &self.hi) {
            (ExtVal::Finite(a), ExtVal::Finite(b)) => ExtVal::Finite(b - a),
            (ExtVal::PlusInf, ExtVal::PlusInf) => ExtVal::Finite(rat_int(0)),
            _ => ExtVal::PlusInf,
        }
    }
}

impl std::fmt::Display for Bracket {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Exact bound on ∥∇f∥₁ over points with coordinate magnitude ≤ max_abs.
pub(crate) fn gradient_l1_bound(f: &NCFunction, max_abs: &Rat) -> Rat {
    match f.base() {
        crate::funcs::ConvexBase::MaxAffine { pieces } => pieces
            .iter()
            .map(|p| l1_norm(&p.coeffs))
            .max()
            .unwrap_or_else(|| rat_int(0)),
        crate::funcs::ConvexBase::Quadratic { q, b, .. } => {
            let mut qsum = rat_int(0);
            for row in q {
                qsum += l1_norm(row);
            }
            l1_norm(b) + rat_int(2) * max_abs * qsum
        }
    }
}

fn in_domain_closure(f: &NCFunction, x: &[Rat]) -> Result<bool, Error> {
    match f.domain() {
        Domain::Full { .. } => Ok(true),
        Domain::Carved(cp) => cp.hull().member(x),
    }
}

/// Enumerates offset vectors z ∈ {−span..=span}^dim.
fn offsets(dim: usize, span: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::with_capacity(out.len() * (2 * span as usize + 1));
        for prefix in &out {
            for z in -span..=span {
                let mut p = prefix.clone();
                p.push(z);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Brackets liminf of f at y by exact minimization over shrinking sampled
/// boxes centered at y. Level ℓ scans the points y + (step/2^ℓ)·(z/4) for
/// z ∈ {−4..4}^dim; the spec's box plays no role here. The bounds assume f
/// is gradient-bounded near y, so treat the result as evidence.
pub fn grid_liminf(f: &NCFunction, y: &[Rat], spec: &GridSpec) -> Result<Bracket, Error> {
    let dim = f.dim();
    if y.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: y.len(),
        });
    }
    let all_inf = Bracket {
        lo: ExtVal::PlusInf,
        hi: ExtVal::PlusInf,
    };
    if !in_domain_closure(f, y)? {
        return Ok(all_inf);
    }
    let per_level = (2 * LIMINF_SUBDIVISIONS as u64 + 1).pow(dim as u32);
    if per_level.saturating_mul(spec.levels() as u64) > GRID_POINT_CAP {
        return Err(Error::CapExceeded {
            what: "grid points",
            limit: GRID_POINT_CAP as usize,
            found: usize::MAX,
        });
    }
    let reach = l1_norm(y) + spec.step();
    let lipschitz = gradient_l1_bound(f, &reach);
    let zs = offsets(dim, LIMINF_SUBDIVISIONS);
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    let mut radius = spec.step().clone();
    let half = rat(1, 2);
    for _ in 0..spec.levels() {
        let spacing = &radius / rat_int(LIMINF_SUBDIVISIONS);
        let mut level_min = ExtVal::PlusInf;
        for z in &zs {
            let x: RatVec = y
                .iter()
                .zip(z)
                .map(|(yi, zi)| yi + rat_int(*zi) * &spacing)
                .collect();
            let v = f.evaluate(&x)?;
            if v < level_min {
                level_min = v;
            }
        }
        let m = match level_min {
            ExtVal::Finite(m) => m,
            ExtVal::PlusInf => return Ok(all_inf),
        };
        let lo_c = &m - &lipschitz * &spacing;
        let hi_c = &m + &lipschitz * &radius;
        lo = Some(lo.map_or(lo_c.clone(), |cur| cur.max(lo_c)));
        hi = Some(hi.map_or(hi_c.clone(), |cur| cur.min(hi_c)));
        radius *= &half;
    }
    Ok(Bracket {
        lo: ExtVal::Finite(lo.expect("levels is positive")),
        hi: ExtVal::Finite(hi.expect("levels is positive")),
    })
}

/// In-set grid values ordered so that any member sorts below a non-member.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum GridVal {
    InSet(ExtVal),
    Out,
}

/// Result of an exhaustive grid minimization of f over a carved set.
#[derive(Debug, Clone)]
pub struct GridMinReport {
    /// Least f value over in-set grid points; PlusInf when none is finite.
    pub minimum: ExtVal,
    /// minimum − L·step with L the exact gradient bound over the box.
    pub lower_bound: ExtVal,
    /// Argmin points in scan order, truncated to a fixed cap.
    pub candidates: Vec<RatVec>,
    /// Total number of argmin grid points before truncation.
    pub tie_count: u64,
    /// Whether the box contains the set's relative-interior witness.
    pub covers_witness: bool,
}

impl GridMinReport {
    /// The evidence interval [lower_bound, minimum].
    pub fn bracket(&self) -> Bracket {
        Bracket {
            lo: self.lower_bound.clone(),
            hi: self.minimum.clone(),
        }
    }
}

/// Minimizes f over the grid points of the box that belong to d.
pub fn grid_min(
    f: &NCFunction,
    d: &CarvedPolyhedron,
    spec: &GridSpec,
) -> Result<GridMinReport, Error> {
    if f.dim() != d.dim() || spec.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            found: if f.dim() != d.dim() {
                f.dim()
            } else {
                spec.dim()
            },
        });
    }
    let n = usize::try_from(spec.len()).unwrap_or(usize::MAX);
    let covers_witness = spec.contains(&d.ri_witness()?);
    let scanned = par::scan_min(n, |i| {
        let x = spec.point(i as u64);
        if d.member(&x)? {
            Ok(GridVal::InSet(f.evaluate(&x)?))
        } else {
            Ok(GridVal::Out)
        }
    })?;
    let (minimum, flats) = match scanned {
        Some((GridVal::InSet(v @ ExtVal::Finite(_)), flats)) => (v, flats),
        _ => {
            return Ok(GridMinReport {
                minimum: ExtVal::PlusInf,
                lower_bound: ExtVal::PlusInf,
                candidates: Vec::new(),
                tie_count: 0,
                covers_witness,
            })
        }
    };
    let lipschitz = gradient_l1_bound(f, &spec.max_abs());
    let lower_bound = match &minimum {
        ExtVal::Finite(m) => ExtVal::Finite(m - &lipschitz * spec.step()),
        ExtVal::PlusInf => ExtVal::PlusInf,
    };
    let tie_count = flats.len() as u64;
    let candidates = flats
        .iter()
        .take(CANDIDATE_CAP)
        .map(|&i| spec.point(i as u64))
        .collect();
    Ok(GridMinReport {
        minimum,
        lower_bound,
        candidates,
        tie_count,
        covers_witness,
    })
}

/// One plateau of grid-local minimizers: a Moore-connected component of
/// equal-value grid points that are minimal among their in-set neighbors.
#[derive(Debug, Clone)]
pub struct GridLocalCluster {
    /// Lexicographically first point of the cluster.
    pub representative: RatVec,
    pub value: ExtVal,
    pub size: u64,
}

/// Finds every cluster of grid-local minimizers of f over d in the box.
///
/// A grid point qualifies when it lies in d and its value is ≤ the value at
/// every neighboring grid point that also lies in d (Moore neighborhood).
/// Qualifying points of equal value are merged into connected clusters.
/// Clusters whose common value is +∞ are reported too; callers filter.
pub fn grid_local_minima(
    f: &NCFunction,
    d: &CarvedPolyhedron,
    spec: &GridSpec,
) -> Result<Vec<GridLocalCluster>, Error> {
    if f.dim() != d.dim() || spec.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            found: if f.dim() != d.dim() {
                f.dim()
            } else {
                spec.dim()
            },
        });
    }
    let n = usize::try_from(spec.len()).unwrap_or(usize::MAX);
    let mut values: Vec<Option<ExtVal>> = Vec::with_capacity(n);
    for i in 0..n {
        let x = spec.point(i as u64);
        if d.member(&x)? {
            values.push(Some(f.evaluate(&x)?));
        } else {
            values.push(None);
        }
    }
    let moves = offsets(spec.dim(), 1);
    let neighbor_flats = |flat: usize| -> Vec<usize> {
        let multi = spec.multi(flat as u64);
        let mut out = Vec::new();
        'moves: for mv in &moves {
            if mv.iter().all(|&z| z == 0) {
                continue;
            }
            let mut nb = Vec::with_capacity(multi.len());
            for (i, &z) in mv.iter().enumerate() {
                let shifted = multi[i] as i64 + z;
                if shifted < 0 || shifted as u64 >= spec.counts[i] {
                    continue 'moves;
                }
                nb.push(shifted as u64);
            }
            out.push(spec.flat(&nb) as usize);
        }
        out
    };
    let mut qualifies = vec![false; n];
    for (i, val) in values.iter().enumerate() {
        let Some(v) = val else { continue };
        qualifies[i] = neighbor_flats(i)
            .into_iter()
            .all(|j| values[j].as_ref().is_none_or(|w| v <= w));
    }
    let mut seen = vec![false; n];
    let mut clusters = Vec::new();
    for start in 0..n {
        if !qualifies[start] || seen[start] {
            continue;
        }
        let value = values[start].clone().expect("qualifying points are in d");
        let mut stack = vec![start];
        let mut size = 0u64;
        seen[start] = true;
        while let Some(i) = stack.pop() {
            size += 1;
            for j in neighbor_flats(i) {
                if qualifies[j] && !seen[j] && values[j].as_ref() == Some(&value) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        clusters.push(GridLocalCluster {
            representative: spec.point(start as u64),
            value,
            size,
        });
    }
    clusters.sort_by(|a, b| a.value.cmp(&b.value));
    Ok(clusters)
}

/// Evidence from sampled midpoint probing of a membership oracle.
#[derive(Debug, Clone)]
pub struct NearConvexityEvidence {
    /// True when a conclusive hole was found between two member points.
    pub flagged: bool,
    /// The member pair and their midpoint witnessing the flag.
    pub witness: Option<(RatVec, RatVec, RatVec)>,
    pub pairs_tested: u64,
}

/// Looks for two members of the set whose midpoint sits in a sampled hole:
/// a small box around the midpoint with no sampled point in the set. Such a
/// hole refutes the existence of a convex set C with C ⊂ Ω ⊂ cl C, because
/// the midpoint would lie in cl C while an entire neighborhood misses C.
/// A clean pass never certifies anything.
pub fn sampled_near_convexity_check(
    set: &OracleSet,
    spec: &GridSpec,
) -> Result<NearConvexityEvidence, Error> {
    if set.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: spec.dim(),
        });
    }
    let n = usize::try_from(spec.len()).unwrap_or(usize::MAX);
    let mut members = Vec::new();
    for i in 0..n {
        let x = spec.point(i as u64);
        if set.member(&x)? {
            members.push(x);
        }
    }
    if members.len() > SAMPLE_CAP {
        let stride = members.len().div_ceil(SAMPLE_CAP);
        members = members.into_iter().step_by(stride).collect();
    }
    let half = rat(1, 2);
    let probe_spacing = spec.step() * &half;
    let probes = offsets(spec.dim(), 2);
    let mut pairs_tested = 0u64;
    for i in 0..members.len() {
        for j in (i + 1)..members.len() {
            if pairs_tested >= PAIR_CAP {
                return Ok(NearConvexityEvidence {
                    flagged: false,
                    witness: None,
                    pairs_tested,
                });
            }
            pairs_tested += 1;
            let mid = lerp(&members[i], &members[j], &half);
            if set.member(&mid)? {
                continue;
            }
            let mut hole = true;
            for z in &probes {
                let shift: RatVec = z.iter().map(|&k| rat_int(k) * &probe_spacing).collect();
                if set.member(&vadd(&mid, &shift))? {
                    hole = false;
                    break;
                }
            }
            if hole {
                return Ok(NearConvexityEvidence {
                    flagged: true,
                    witness: Some((members[i].clone(), members[j].clone(), mid)),
                    pairs_tested,
                });
            }
        }
    }
    Ok(NearConvexityEvidence {
        flagged: false,
        witness: None,
        pairs_tested,
    })
}
