//! Hard-instance generators: the set-disjointness reduction chain with
//! convex-position gadgets and coordinate lifts, and the projective-plane
//! family demonstrating that container families of halfspace size do not
//! exist for general VC classes.

use crate::geom::{Domain, Point, PointSet};
use crate::scalar::Scalar;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A set-disjointness input pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjInstance {
    pub x: Vec<bool>,
    pub y: Vec<bool>,
}

impl DisjInstance {
    pub fn new(x: Vec<bool>, y: Vec<bool>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch(x.len(), y.len()));
        }
        Ok(DisjInstance { x, y })
    }

    /// The disjointness value: 1 when no index carries a one on both
    /// sides, 0 otherwise.
    pub fn value(&self) -> u8 {
        let shared = self.x.iter().zip(&self.y).any(|(&a, &b)| a && b);
        u8::from(!shared)
    }
}

/// A planar gadget: `2^k` rational points in strictly convex position,
/// indexed by k-bit strings (least-significant bit first).
#[derive(Clone, Debug)]
pub struct GadgetDomain {
    pub domain: Domain,
    pub bits: usize,
}

impl GadgetDomain {
    /// Domain index of the point for a bit string.
    pub fn index_of(&self, z: &[bool]) -> usize {
        bits_to_index(z)
    }
}

fn bits_to_index(z: &[bool]) -> usize {
    z.iter()
        .enumerate()
        .fold(0usize, |acc, (i, &b)| acc | (b as usize) << i)
}

/// Default cap on `2^k` gadget points.
pub const DEFAULT_GADGET_CAP: usize = 4096;

/// The `2^k` points `(t, t^2)` on the rational parabola, `t = 0..2^k-1`.
/// Strict convex position gives the crucial property: every point is
/// separable from the rest by a line.
pub fn convex_position_gadget(k: usize) -> Result<GadgetDomain> {
    convex_position_gadget_capped(k, DEFAULT_GADGET_CAP)
}

pub fn convex_position_gadget_capped(k: usize, cap: usize) -> Result<GadgetDomain> {
    if k == 0 {
        return Err(Error::InvalidInput("gadget needs k >= 1".into()));
    }
    if k >= usize::BITS as usize || (1usize << k) > cap {
        return Err(Error::CapExceeded(format!(
            "gadget of 2^{k} points exceeds cap {cap}"
        )));
    }
    Ok(GadgetDomain {
        domain: Domain::parabola(1 << k)?,
        bits: k,
    })
}

/// A promise instance produced by a reduction.
#[derive(Clone, Debug)]
pub struct ReducedInstance {
    pub domain: Domain,
    pub alice: PointSet,
    pub bob: PointSet,
}

/// Maps a `DISJ_k` pair onto the planar gadget: Alice's input becomes
/// the single point indexed by her string, Bob's becomes every point
/// whose index shares a one-bit with his string. The instance satisfies
/// the promise because the gadget is in convex position.
pub fn disj_to_promise_csd(inst: &DisjInstance) -> Result<ReducedInstance> {
    let k = inst.x.len();
    let gadget = convex_position_gadget(k)?;
    let a = PointSet::new(vec![bits_to_index(&inst.x)]);
    let y_mask = bits_to_index(&inst.y);
    let b: PointSet = (0..(1usize << k)).filter(|t| t & y_mask != 0).collect();
    Ok(ReducedInstance {
        domain: gadget.domain,
        alice: a,
        bob: b,
    })
}

/// Embeds a planar point into block `j` (1-based) of `R^{3c}`:
/// coordinates `3(j-1)..3j` hold `(x1, x2, 1)`, the rest are zero.
pub fn lift(p: &Point, j: usize, c: usize) -> Result<Point> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: p.dim(),
        });
    }
    if j == 0 || j > c {
        return Err(Error::LiftIndexOutOfRange { index: j, blocks: c });
    }
    let mut coords = vec![Scalar::zero(); 3 * c];
    coords[3 * (j - 1)] = p.coords[0].clone();
    coords[3 * (j - 1) + 1] = p.coords[1].clone();
    coords[3 * (j - 1) + 2] = Scalar::one();
    Ok(Point::new(coords))
}

/// The full chain `DISJ_{ck} -> AND_c ∘ DISJ_k -> PromiseCSD` over the
/// lifted domain of `2^k * c` points in `R^{3c}`: block `j` of the
/// inputs is reduced on its own planar gadget copy, embedded in its own
/// coordinate triple.
pub fn disj_to_csd_full(inst: &DisjInstance, c: usize, k: usize) -> Result<ReducedInstance> {
    if c == 0 || k == 0 {
        return Err(Error::InvalidInput("need c >= 1 and k >= 1".into()));
    }
    if inst.x.len() != c * k {
        return Err(Error::LengthMismatch(inst.x.len(), c * k));
    }
    let gadget = convex_position_gadget(k)?;
    let block = 1usize << k;
    let mut points = Vec::with_capacity(c * block);
    for j in 1..=c {
        for t in 0..block {
            points.push(lift(gadget.domain.point(t), j, c)?);
        }
    }
    let domain = Domain::new(3 * c, points)?;
    let mut alice = Vec::new();
    let mut bob = Vec::new();
    for j in 0..c {
        let xs = &inst.x[j * k..(j + 1) * k];
        let ys = &inst.y[j * k..(j + 1) * k];
        alice.push(j * block + bits_to_index(xs));
        let y_mask = bits_to_index(ys);
        for t in 0..block {
            if t & y_mask != 0 {
                bob.push(j * block + t);
            }
        }
    }
    Ok(ReducedInstance {
        domain,
        alice: PointSet::new(alice),
        bob: PointSet::new(bob),
    })
}

/// A projective plane of prime order: `q^2 + q + 1` points and as many
/// lines, each line listing its point indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectivePlane {
    pub order: u64,
    pub num_points: usize,
    pub lines: Vec<Vec<usize>>,
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut f = 2;
    while f * f <= q {
        if q % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

/// The lines of `PG(2, q)` over the prime field: normalized homogeneous
/// triples for points and lines, incidence by a zero dot product mod q.
pub fn projective_plane_lines(q: u64) -> Result<ProjectivePlane> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    // Canonical representatives: first nonzero coordinate equals one.
    let mut reps: Vec<[u64; 3]> = Vec::new();
    for a in 0..q {
        for b in 0..q {
            reps.push([1, a, b]);
        }
    }
    for a in 0..q {
        reps.push([0, 1, a]);
    }
    reps.push([0, 0, 1]);
    let n = reps.len();
    debug_assert_eq!(n as u64, q * q + q + 1);

    let mut lines = Vec::with_capacity(n);
    for l in &reps {
        let members: Vec<usize> = reps
            .iter()
            .enumerate()
            .filter(|(_, p)| (l[0] * p[0] + l[1] * p[1] + l[2] * p[2]) % q == 0)
            .map(|(i, _)| i)
            .collect();
        debug_assert_eq!(members.len() as u64, q + 1);
        lines.push(members);
    }
    Ok(ProjectivePlane {
        order: q,
        num_points: n,
        lines,
    })
}

/// Exact container-counting demonstration on the projective plane: with
/// containers capped at `(q+1) + floor(eps N)` points, at most
/// `max_lines_per_container` lines fit into one container (computed
/// exactly), so any family needs at least `ceil(L / that)` members; an
/// explicit grouping achieves the bound, making `min_containers` exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneCoverDemo {
    pub order: u64,
    pub num_points: usize,
    pub num_lines: usize,
    pub container_cap: usize,
    pub max_lines_per_container: usize,
    pub min_containers: usize,
}

/// Runs the exact set-cover computation at desk scale (`q <= 3`).
pub fn plane_cover_demo(q: u64, eps: &Scalar) -> Result<PlaneCoverDemo> {
    if q > 3 {
        return Err(Error::CapExceeded(
            "exact cover search is limited to q <= 3".into(),
        ));
    }
    let plane = projective_plane_lines(q)?;
    let n = plane.num_points;
    let l = plane.lines.len();
    let cap_scalar = Scalar::from_int((q + 1) as i64) + eps * &Scalar::from_int(n as i64);
    use num_traits::ToPrimitive;
    let cap = cap_scalar.floor().to_usize().unwrap_or(0);

    // Exact max number of lines whose union fits in `cap` points:
    // exhaustive over line subsets (L <= 13 here).
    let masks: Vec<u64> = plane
        .lines
        .iter()
        .map(|line| line.iter().fold(0u64, |m, &p| m | 1 << p))
        .collect();
    let mut best = 0usize;
    for sub in 1u64..(1 << l) {
        let count = sub.count_ones() as usize;
        if count <= best {
            continue;
        }
        let mut union = 0u64;
        for (i, m) in masks.iter().enumerate() {
            if sub >> i & 1 == 1 {
                union |= m;
            }
        }
        if union.count_ones() as usize <= cap {
            best = count;
        }
    }
    if best == 0 {
        return Err(Error::InvalidInput(
            "container cap below a single line size".into(),
        ));
    }
    let lower = l.div_ceil(best);

    // Explicit grouping achieving the bound: chunks of `best` lines.
    // Any `best` lines fit because pairwise intersections are single
    // points; verify exactly.
    let mut achieved = 0usize;
    let mut idx = 0usize;
    while idx < l {
        let hi = (idx + best).min(l);
        let mut union = 0u64;
        for m in &masks[idx..hi] {
            union |= m;
        }
        if union.count_ones() as usize > cap {
            return Err(Error::InvalidInput(
                "grouping exceeded the container cap".into(),
            ));
        }
        achieved += 1;
        idx = hi;
    }
    debug_assert_eq!(achieved, lower);
    Ok(PlaneCoverDemo {
        order: q,
        num_points: n,
        num_lines: l,
        container_cap: cap,
        max_lines_per_container: best,
        min_containers: lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{
        enumerate_halfspace_traces, hulls_intersect, hulls_intersect_quick, point_in_hull,
        separate,
    };
    use crate::scalar::dot;

    fn bits(v: u64, len: usize) -> Vec<bool> {
        (0..len).map(|i| v >> i & 1 == 1).collect()
    }

    #[test]
    fn gadget_is_strictly_convex() {
        let g = convex_position_gadget(3).unwrap();
        assert_eq!(g.domain.len(), 8);
        // Positive orientation of every consecutive triple.
        for w in 0..6usize {
            let a = g.domain.point(w);
            let b = g.domain.point(w + 1);
            let c = g.domain.point(w + 2);
            let cross = (&b.coords[0] - &a.coords[0]) * (&c.coords[1] - &a.coords[1])
                - (&b.coords[1] - &a.coords[1]) * (&c.coords[0] - &a.coords[0]);
            assert!(cross.is_positive());
        }
    }

    #[test]
    fn gadget_k1_and_k2_separability() {
        let g = convex_position_gadget(1).unwrap();
        assert_eq!(g.domain.len(), 2);
        for i in 0..2usize {
            let rest: PointSet = (0..2).filter(|&t| t != i).collect();
            assert!(separate(&g.domain, &PointSet::new(vec![i]), &rest)
                .unwrap()
                .is_some());
        }
        // k = 2: all singletons and complements are halfspace traces.
        let g = convex_position_gadget(2).unwrap();
        let tr = enumerate_halfspace_traces(&g.domain).unwrap();
        for i in 0..4usize {
            let single = PointSet::new(vec![i]);
            assert!(tr.id_of(&single).is_some());
            assert!(tr.id_of(&single.complement(4)).is_some());
        }
    }

    #[test]
    fn gadget_cap_and_zero_k() {
        assert!(convex_position_gadget(0).is_err());
        assert!(matches!(
            convex_position_gadget_capped(13, 4096),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn figure_instance_disjoint() {
        // x = 0010, y = 0101 share no one-index, so the singleton lands
        // outside the hull of Bob's points.
        let inst = DisjInstance::new(
            vec![false, false, true, false],
            vec![false, true, false, true],
        )
        .unwrap();
        assert_eq!(inst.value(), 1);
        let red = disj_to_promise_csd(&inst).unwrap();
        assert_eq!(red.alice.len(), 1);
        let a_idx = red.alice.iter().next().unwrap();
        assert!(!red.bob.contains(a_idx));
        assert!(!point_in_hull(&red.domain, red.domain.point(a_idx), &red.bob).unwrap());
    }

    #[test]
    fn shared_one_bit_maps_to_membership() {
        let inst = DisjInstance::new(vec![true], vec![true]).unwrap();
        assert_eq!(inst.value(), 0);
        let red = disj_to_promise_csd(&inst).unwrap();
        assert!(red.alice.is_subset_of(&red.bob));
    }

    #[test]
    fn exhaustive_k3_matches_disjointness_oracle() {
        for xv in 0u64..8 {
            for yv in 0u64..8 {
                let inst = DisjInstance::new(bits(xv, 3), bits(yv, 3)).unwrap();
                let red = disj_to_promise_csd(&inst).unwrap();
                if red.bob.is_empty() {
                    // Empty Bob side: hulls trivially disjoint.
                    assert_eq!(inst.value(), 1);
                    continue;
                }
                let intersecting =
                    hulls_intersect_quick(&red.domain, &red.alice, &red.bob).unwrap();
                assert_eq!(
                    inst.value() == 0,
                    intersecting,
                    "x={xv:03b} y={yv:03b}"
                );
                // Promise membership: singleton inside Bob's set, or
                // strictly outside its hull.
                let a_idx = red.alice.iter().next().unwrap();
                assert!(red.bob.contains(a_idx) || !intersecting);
            }
        }
    }

    #[test]
    fn lift_places_coordinates() {
        let p = Point::from_ints(&[1, 2]);
        let l = lift(&p, 2, 2).unwrap();
        assert_eq!(l, Point::from_ints(&[0, 0, 0, 1, 2, 1]));
        let l1 = lift(&p, 1, 1).unwrap();
        assert_eq!(l1, Point::from_ints(&[1, 2, 1]));
        assert!(matches!(
            lift(&p, 3, 2),
            Err(Error::LiftIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn lifted_block_separators_recombine() {
        // All blocks disjoint: block separators compose into one global
        // affine separator, positive on Alice's points, negative on
        // Bob's.
        let c = 2;
        let k = 2;
        let inst = DisjInstance::new(bits(0b1000, 4), bits(0b0100, 4)).unwrap();
        assert_eq!(inst.value(), 1);
        let red = disj_to_csd_full(&inst, c, k).unwrap();
        let gadget = convex_position_gadget(k).unwrap();
        let block = 1usize << k;
        let mut w = vec![Scalar::zero(); 3 * c];
        for j in 0..c {
            let a_j: PointSet = red
                .alice
                .iter()
                .filter(|i| i / block == j)
                .map(|i| i % block)
                .collect();
            let b_j: PointSet = red
                .bob
                .iter()
                .filter(|i| i / block == j)
                .map(|i| i % block)
                .collect();
            if b_j.is_empty() {
                // No constraint from this block; leave coefficients zero
                // except a positive constant on the lifted 1-coordinate.
                w[3 * j + 2] = Scalar::one();
                continue;
            }
            let sep = separate(&gadget.domain, &a_j, &b_j).unwrap().unwrap();
            // l_j(p) = bias - <normal, p> is positive on the A side.
            w[3 * j] = -sep.halfspace.normal()[0].clone();
            w[3 * j + 1] = -sep.halfspace.normal()[1].clone();
            w[3 * j + 2] = sep.halfspace.bias().clone();
        }
        for i in red.alice.iter() {
            assert!(dot(&w, &red.domain.point(i).coords).is_positive());
        }
        for i in red.bob.iter() {
            assert!(dot(&w, &red.domain.point(i).coords).is_negative());
        }
    }

    #[test]
    fn single_block_reduces_to_planar_gadget() {
        let inst = DisjInstance::new(bits(0b10, 2), bits(0b11, 2)).unwrap();
        let full = disj_to_csd_full(&inst, 1, 2).unwrap();
        let planar = disj_to_promise_csd(&inst).unwrap();
        assert_eq!(full.alice, planar.alice);
        assert_eq!(full.bob, planar.bob);
        assert_eq!(full.domain.len(), planar.domain.len());
        // Points agree after dropping the constant lifted coordinate.
        for i in 0..full.domain.len() {
            assert_eq!(full.domain.point(i).coords[0], planar.domain.point(i).coords[0]);
            assert_eq!(full.domain.point(i).coords[1], planar.domain.point(i).coords[1]);
            assert_eq!(full.domain.point(i).coords[2], Scalar::one());
        }
    }

    #[test]
    fn exhaustive_c2_k2_matches_oracle() {
        // All 256 pairs: DISJ_4 equals hull disjointness of the lifted
        // instance (LP oracle in R^6).
        for xv in 0u64..16 {
            for yv in 0u64..16 {
                let inst = DisjInstance::new(bits(xv, 4), bits(yv, 4)).unwrap();
                let red = disj_to_csd_full(&inst, 2, 2).unwrap();
                if red.bob.is_empty() {
                    assert_eq!(inst.value(), 1);
                    continue;
                }
                let intersecting =
                    hulls_intersect(&red.domain, &red.alice, &red.bob)
                        .unwrap()
                        .is_some();
                assert_eq!(inst.value() == 0, intersecting, "x={xv:04b} y={yv:04b}");
            }
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(DisjInstance::new(vec![true], vec![true, false]).is_err());
        let inst = DisjInstance::new(bits(0, 3), bits(0, 3)).unwrap();
        assert!(matches!(
            disj_to_csd_full(&inst, 2, 2),
            Err(Error::LengthMismatch(3, 4))
        ));
    }

    #[test]
    fn fano_plane_axioms() {
        let plane = projective_plane_lines(2).unwrap();
        assert_eq!(plane.num_points, 7);
        assert_eq!(plane.lines.len(), 7);
        for line in &plane.lines {
            assert_eq!(line.len(), 3);
        }
        // Every two lines meet in exactly one point.
        for i in 0..7 {
            for j in (i + 1)..7 {
                let a: std::collections::HashSet<usize> =
                    plane.lines[i].iter().copied().collect();
                let shared = plane.lines[j].iter().filter(|p| a.contains(p)).count();
                assert_eq!(shared, 1, "lines {i} and {j}");
            }
        }
        // Every two points lie on exactly one line.
        for p in 0..7usize {
            for r in (p + 1)..7 {
                let through = plane
                    .lines
                    .iter()
                    .filter(|l| l.contains(&p) && l.contains(&r))
                    .count();
                assert_eq!(through, 1, "points {p} and {r}");
            }
        }
    }

    #[test]
    fn order_three_plane() {
        let plane = projective_plane_lines(3).unwrap();
        assert_eq!(plane.num_points, 13);
        assert_eq!(plane.lines.len(), 13);
        assert!(plane.lines.iter().all(|l| l.len() == 4));
    }

    #[test]
    fn non_prime_rejected() {
        assert_eq!(projective_plane_lines(4).unwrap_err(), Error::NotPrime(4));
        assert_eq!(projective_plane_lines(1).unwrap_err(), Error::NotPrime(1));
    }

    #[test]
    fn cover_demo_grows_with_plane_size() {
        let eps = Scalar::ratio(1, 4);
        let d2 = plane_cover_demo(2, &eps).unwrap();
        // Fano: cap 3 + 1 = 4 < two lines' union (5), so one line per
        // container and all 7 are needed.
        assert_eq!(d2.container_cap, 4);
        assert_eq!(d2.max_lines_per_container, 1);
        assert_eq!(d2.min_containers, 7);
        let d3 = plane_cover_demo(3, &eps).unwrap();
        // Order 3: cap 4 + 3 = 7 fits exactly two lines (4 + 4 - 1).
        assert_eq!(d3.container_cap, 7);
        assert_eq!(d3.max_lines_per_container, 2);
        assert_eq!(d3.min_containers, 7);
        // The count stays proportional to the number of lines, unlike
        // the fixed-size halfspace container families.
        assert!(d3.min_containers * d3.max_lines_per_container >= d3.num_lines);
    }
}
