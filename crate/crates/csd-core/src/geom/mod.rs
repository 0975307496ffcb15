//! Exact rational geometry: points, finite domains, halfspaces,
//! polytopes, and the LP-based separation and intersection oracles
//! everything else builds on.

mod convex;
mod lp;
mod traces;

pub use convex::{
    hulls_intersect, hulls_intersect_quick, point_in_hull, points_in_hull, separate,
    IntersectionWitness, Separator,
};
pub(crate) use convex::canonical_intersection_point;
pub use lp::{lex_min_point, lp_feasible, solve_lp, Constraint, Feasibility, LpOutcome};
pub use traces::{
    enumerate_halfspace_traces, enumerate_halfspace_traces_capped, restrict_enumeration, trace,
    TraceEntry, TraceEnumeration, DEFAULT_TRACE_CAP,
};

use crate::scalar::{dot, Scalar};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use once_cell::sync::OnceCell;
use serde::{Deserialize, Serialize};
use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

/// A point in `R^d` with exact rational coordinates. Serializes as a
/// flat array of lowest-terms `"p/q"` strings.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    pub coords: Vec<Scalar>,
}

impl Point {
    pub fn new(coords: Vec<Scalar>) -> Self {
        Point { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Point {
            coords: coords.iter().map(|&c| Scalar::from_int(c)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A finite ordered set of distinct points in `R^d`.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct Domain {
    dim: usize,
    points: Vec<Point>,
    /// Points as integer numerators over per-point denominators, for the
    /// hot comparison loops. Built lazily, never serialized.
    #[serde(skip)]
    scaled: OnceCell<ScaledPoints>,
    #[serde(skip)]
    key: OnceCell<u128>,
}

impl<'de> serde::Deserialize<'de> for Domain {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            dim: usize,
            points: Vec<Point>,
        }
        let raw = Raw::deserialize(deserializer)?;
        Domain::new(raw.dim, raw.points).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct ScaledPoints {
    /// `numerators[i][j] = points[i].coords[j] * denoms[i]`: each point
    /// over its own (small) common denominator.
    pub numerators: Vec<Vec<BigInt>>,
    pub denoms: Vec<BigInt>,
    /// The same data in machine words when it fits; hot loops use this
    /// with checked arithmetic and fall back to the big integers.
    pub small: Option<(Vec<Vec<i128>>, Vec<i128>)>,
}

impl Domain {
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (i, p) in points.iter().enumerate() {
            if !seen.insert(p.clone()) {
                return Err(Error::DuplicatePoint(i));
            }
        }
        Ok(Domain {
            dim,
            points,
            scaled: OnceCell::new(),
            key: OnceCell::new(),
        })
    }

    /// 1D domain from integer coordinates.
    pub fn line(coords: &[i64]) -> Result<Self> {
        Domain::new(1, coords.iter().map(|&c| Point::from_ints(&[c])).collect())
    }

    /// Planar parabola points `(t, t^2)` for `t = 0..n-1`; strictly convex
    /// position with rational coordinates.
    pub fn parabola(n: usize) -> Result<Self> {
        Domain::new(
            2,
            (0..n as i64).map(|t| Point::from_ints(&[t, t * t])).collect(),
        )
    }

    /// The `k x k` integer grid.
    pub fn grid(k: usize) -> Result<Self> {
        let mut pts = Vec::new();
        for x in 0..k as i64 {
            for y in 0..k as i64 {
                pts.push(Point::from_ints(&[x, y]));
            }
        }
        Domain::new(2, pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn full_set(&self) -> PointSet {
        PointSet::full(self.len())
    }

    /// Sub-domain consisting of the points of `set`, in domain order.
    pub fn restrict(&self, set: &PointSet) -> Result<Domain> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        Domain::new(
            self.dim,
            set.iter().map(|i| self.points[i].clone()).collect(),
        )
    }

    /// A collision-resistant cache key over the exact point data,
    /// computed once.
    pub fn cache_key(&self) -> u128 {
        *self.key.get_or_init(|| self.compute_cache_key())
    }

    fn compute_cache_key(&self) -> u128 {
        let mut h1 = DefaultHasher::new();
        (self.dim, 0x9e37u16).hash(&mut h1);
        for p in &self.points {
            for c in &p.coords {
                c.numer().hash(&mut h1);
                c.denom().hash(&mut h1);
            }
        }
        let mut h2 = DefaultHasher::new();
        (self.len(), 0x85ebu16).hash(&mut h2);
        for p in self.points.iter().rev() {
            for c in p.coords.iter().rev() {
                c.denom().hash(&mut h2);
                c.numer().hash(&mut h2);
            }
        }
        ((h1.finish() as u128) << 64) | h2.finish() as u128
    }

    pub(crate) fn scaled(&self) -> &ScaledPoints {
        self.scaled.get_or_init(|| {
            let mut numerators = Vec::with_capacity(self.points.len());
            let mut denoms = Vec::with_capacity(self.points.len());
            for p in &self.points {
                let mut denom = BigInt::one();
                for c in &p.coords {
                    denom = denom.lcm(c.denom());
                }
                numerators.push(
                    p.coords
                        .iter()
                        .map(|c| c.numer() * (&denom / c.denom()))
                        .collect::<Vec<BigInt>>(),
                );
                denoms.push(denom);
            }
            let small = {
                use num_traits::ToPrimitive;
                let nums: Option<Vec<Vec<i128>>> = numerators
                    .iter()
                    .map(|row| row.iter().map(|v| v.to_i128()).collect())
                    .collect();
                let dens: Option<Vec<i128>> =
                    denoms.iter().map(|v| v.to_i128()).collect();
                nums.zip(dens)
            };
            ScaledPoints {
                numerators,
                denoms,
                small,
            }
        })
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Domain(d={}, n={})", self.dim, self.points.len())
    }
}

/// A subset of a domain, stored as sorted, duplicate-free point indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub struct PointSet {
    indices: Vec<usize>,
}

impl PointSet {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        PointSet { indices }
    }

    pub fn empty() -> Self {
        PointSet { indices: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        PointSet {
            indices: (0..n).collect(),
        }
    }

    pub fn validate(&self, domain: &Domain) -> Result<()> {
        if let Some(&max) = self.indices.last() {
            if max >= domain.len() {
                return Err(Error::IndexOutOfRange {
                    index: max,
                    size: domain.len(),
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet {
            indices: self
                .indices
                .iter()
                .copied()
                .filter(|&i| other.contains(i))
                .collect(),
        }
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut v = self.indices.clone();
        v.extend(other.iter());
        PointSet::new(v)
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        PointSet {
            indices: self
                .indices
                .iter()
                .copied()
                .filter(|&i| !other.contains(i))
                .collect(),
        }
    }

    pub fn complement(&self, n: usize) -> PointSet {
        PointSet {
            indices: (0..n).filter(|&i| !self.contains(i)).collect(),
        }
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        PointSet::new(iter.into_iter().collect())
    }
}

/// An oriented affine halfspace.
///
/// `closed == true` means `{x : <normal, x> >= bias}`; `closed == false`
/// means the strict complement-side form `{x : <normal, x> < bias}`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Halfspace {
    normal: Vec<Scalar>,
    bias: Scalar,
    closed: bool,
}

impl Halfspace {
    pub fn new(normal: Vec<Scalar>, bias: Scalar, closed: bool) -> Result<Self> {
        if normal.iter().all(|c| c.is_zero()) {
            return Err(Error::ZeroNormal);
        }
        Ok(Halfspace {
            normal,
            bias,
            closed,
        })
    }

    /// The strict form `{x : <normal, x> < bias}`.
    pub fn strict(normal: Vec<Scalar>, bias: Scalar) -> Result<Self> {
        Halfspace::new(normal, bias, false)
    }

    pub fn normal(&self) -> &[Scalar] {
        &self.normal
    }

    pub fn bias(&self) -> &Scalar {
        &self.bias
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn contains(&self, p: &Point) -> bool {
        let v = dot(&self.normal, &p.coords);
        if self.closed {
            v >= self.bias
        } else {
            v < self.bias
        }
    }
}

impl fmt::Debug for Halfspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.closed { ">=" } else { "<" };
        write!(f, "{{x : <{:?}, x> {} {}}}", self.normal, op, self.bias)
    }
}

/// One linear inequality `<normal, x> <= bound` with a stable id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub id: usize,
    pub normal: Vec<Scalar>,
    pub bound: Scalar,
}

impl Inequality {
    pub fn satisfied_by(&self, x: &[Scalar]) -> bool {
        dot(&self.normal, x) <= self.bound
    }

    pub fn tight_at(&self, x: &[Scalar]) -> bool {
        dot(&self.normal, x) == self.bound
    }
}

/// An H-polytope: a list of closed inequalities `<w, x> <= c` in `R^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polytope {
    dim: usize,
    inequalities: Vec<Inequality>,
}

impl Polytope {
    pub fn new(dim: usize, rows: Vec<(Vec<Scalar>, Scalar)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        let mut inequalities = Vec::with_capacity(rows.len());
        for (id, (normal, bound)) in rows.into_iter().enumerate() {
            if normal.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: normal.len(),
                });
            }
            inequalities.push(Inequality { id, normal, bound });
        }
        Ok(Polytope { dim, inequalities })
    }

    /// The axis box `[lo, hi]^dim`.
    pub fn bounding_box(dim: usize, lo: Scalar, hi: Scalar) -> Result<Self> {
        let mut rows = Vec::new();
        for j in 0..dim {
            let mut up = vec![Scalar::zero(); dim];
            up[j] = Scalar::one();
            rows.push((up, hi.clone()));
            let mut down = vec![Scalar::zero(); dim];
            down[j] = Scalar::from_int(-1);
            rows.push((down, -lo.clone()));
        }
        Polytope::new(dim, rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inequalities(&self) -> &[Inequality] {
        &self.inequalities
    }

    pub fn inequality(&self, id: usize) -> Option<&Inequality> {
        self.inequalities.get(id)
    }

    pub fn num_inequalities(&self) -> usize {
        self.inequalities.len()
    }

    pub fn contains(&self, x: &[Scalar]) -> bool {
        self.dim == x.len() && self.inequalities.iter().all(|r| r.satisfied_by(x))
    }

    pub(crate) fn rows(&self) -> Vec<(Vec<Scalar>, Scalar)> {
        self.inequalities
            .iter()
            .map(|r| (r.normal.clone(), r.bound.clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_rejects_duplicates_and_mismatched_dims() {
        let err = Domain::new(
            1,
            vec![Point::from_ints(&[0]), Point::from_ints(&[0])],
        );
        assert_eq!(err.unwrap_err(), Error::DuplicatePoint(1));
        let err = Domain::new(2, vec![Point::from_ints(&[0])]);
        assert!(matches!(err.unwrap_err(), Error::DimensionMismatch { .. }));
    }

    #[test]
    fn halfspace_membership_respects_flags() {
        let on_boundary = Point::from_ints(&[1]);
        let strict = Halfspace::strict(vec![Scalar::one()], Scalar::one()).unwrap();
        assert!(!strict.contains(&on_boundary));
        let closed = Halfspace::new(vec![Scalar::one()], Scalar::one(), true).unwrap();
        assert!(closed.contains(&on_boundary));
    }

    #[test]
    fn zero_normal_rejected() {
        assert_eq!(
            Halfspace::strict(vec![Scalar::zero()], Scalar::one()).unwrap_err(),
            Error::ZeroNormal
        );
    }

    #[test]
    fn pointset_ops() {
        let a = PointSet::new(vec![3, 1, 1]);
        let b = PointSet::new(vec![1, 2]);
        assert_eq!(a.len(), 2);
        assert_eq!(a.intersection(&b), PointSet::new(vec![1]));
        assert_eq!(a.union(&b), PointSet::new(vec![1, 2, 3]));
        assert_eq!(a.difference(&b), PointSet::new(vec![3]));
        assert_eq!(b.complement(4), PointSet::new(vec![0, 3]));
        assert!(PointSet::new(vec![1]).is_subset_of(&a));
    }

    #[test]
    fn domain_per_point_denominator_scaling() {
        let d = Domain::new(
            1,
            vec![
                Point::new(vec![Scalar::ratio(1, 2)]),
                Point::new(vec![Scalar::ratio(1, 3)]),
            ],
        )
        .unwrap();
        let scaled = d.scaled();
        assert_eq!(scaled.denoms, vec![BigInt::from(2), BigInt::from(3)]);
        assert_eq!(scaled.numerators[0][0], BigInt::from(1));
        assert_eq!(scaled.numerators[1][0], BigInt::from(1));
    }

    #[test]
    fn json_round_trip_domain() {
        let d = Domain::parabola(3).unwrap();
        let js = serde_json::to_string(&d).unwrap();
        let back: Domain = serde_json::from_str(&js).unwrap();
        assert_eq!(back, d);
    }
}
