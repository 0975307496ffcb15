//! Caratheodory-type procedures: classical coefficient sparsification,
//! the symmetric two-set variant, and the dual variant realized through
//! bottom-vertex triangulation (ray-shooting encode, facet-chain decode).

use crate::geom::{
    hulls_intersect, lex_min_point, solve_lp, Constraint, Domain, LpOutcome, Point, PointSet,
    Polytope,
};
use crate::linalg::{nullspace_basis, rank, solve_square};
use crate::scalar::{dot, Scalar};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// A simplex given by at most `m + 1` vertices in `R^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplex {
    pub vertices: Vec<Point>,
}

impl Simplex {
    /// Exact membership: is `p` a convex combination of the vertices?
    pub fn contains(&self, p: &Point) -> bool {
        in_convex_hull_of(&self.vertices, p)
    }
}

/// Exact test `p in conv(points)` via a small feasibility LP.
pub(crate) fn in_convex_hull_of(points: &[Point], p: &Point) -> bool {
    let n = points.len();
    if n == 0 {
        return false;
    }
    let d = p.dim();
    let mut cons: Vec<Constraint> = Vec::new();
    for k in 0..d {
        let row: Vec<Scalar> = points.iter().map(|v| v.coords[k].clone()).collect();
        let neg: Vec<Scalar> = row.iter().map(|v| -v.clone()).collect();
        cons.push(Constraint::new(row, p.coords[k].clone()));
        cons.push(Constraint::new(neg, -p.coords[k].clone()));
    }
    cons.push(Constraint::new(vec![Scalar::one(); n], Scalar::one()));
    cons.push(Constraint::new(
        vec![Scalar::from_int(-1); n],
        Scalar::from_int(-1),
    ));
    for t in 0..n {
        let mut row = vec![Scalar::zero(); n];
        row[t] = Scalar::from_int(-1);
        cons.push(Constraint::new(row, Scalar::zero()));
    }
    matches!(
        solve_lp(&cons, &vec![Scalar::zero(); n], false),
        LpOutcome::Optimal { .. }
    )
}

/// An ordered sequence of inequality ids of a source polytope; the wire
/// form of the dual-Caratheodory encoding. Serializes as an integer
/// array.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BvtSequence {
    pub constraint_ids: Vec<usize>,
}

/// Reduces a convex representation of `x` over `Y` to support size at
/// most `d + 1`, exactly. Returns `(domain index, coefficient)` pairs.
pub fn caratheodory_reduce(
    domain: &Domain,
    x: &Point,
    y: &PointSet,
) -> Result<Vec<(usize, Scalar)>> {
    if y.is_empty() {
        return Err(Error::EmptySet);
    }
    y.validate(domain)?;
    if x.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: x.dim(),
        });
    }
    // x already a member: coefficient one on it.
    for i in y.iter() {
        if domain.point(i) == x {
            return Ok(vec![(i, Scalar::one())]);
        }
    }
    let idx: Vec<usize> = y.iter().collect();
    let d = domain.dim();
    let coeffs = convex_coefficients(domain, &idx, x).ok_or(Error::NotInHull)?;
    let mut support: Vec<(usize, Scalar)> = idx
        .into_iter()
        .zip(coeffs)
        .filter(|(_, c)| !c.is_zero())
        .collect();

    // Kernel-shift elimination until the support fits d + 1 points.
    while support.len() > d + 1 {
        let s = support.len();
        // Rows: sum alpha_i y_i = 0 (d rows), sum alpha_i = 0 (1 row).
        let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(d + 1);
        for k in 0..d {
            rows.push(
                support
                    .iter()
                    .map(|(i, _)| domain.point(*i).coords[k].clone())
                    .collect(),
            );
        }
        rows.push(vec![Scalar::one(); s]);
        let kernel = nullspace_basis(&rows, s);
        let alpha = kernel
            .first()
            .expect("support exceeds d+1, kernel is nontrivial")
            .clone();
        shift_until_vanish(&mut support, &alpha);
    }
    debug_assert!({
        let mut recon = vec![Scalar::zero(); d];
        let mut total = Scalar::zero();
        for (i, c) in &support {
            total += c;
            for k in 0..d {
                recon[k] += &(c * &domain.point(*i).coords[k]);
            }
        }
        total == Scalar::one() && recon == x.coords && support.iter().all(|(_, c)| c.is_positive())
    });
    Ok(support)
}

/// Convex-combination coefficients of `x` over the listed points, if any.
fn convex_coefficients(domain: &Domain, idx: &[usize], x: &Point) -> Option<Vec<Scalar>> {
    let n = idx.len();
    let d = domain.dim();
    let mut cons: Vec<Constraint> = Vec::new();
    for k in 0..d {
        let row: Vec<Scalar> = idx
            .iter()
            .map(|&i| domain.point(i).coords[k].clone())
            .collect();
        let neg: Vec<Scalar> = row.iter().map(|v| -v.clone()).collect();
        cons.push(Constraint::new(row, x.coords[k].clone()));
        cons.push(Constraint::new(neg, -x.coords[k].clone()));
    }
    cons.push(Constraint::new(vec![Scalar::one(); n], Scalar::one()));
    cons.push(Constraint::new(
        vec![Scalar::from_int(-1); n],
        Scalar::from_int(-1),
    ));
    for t in 0..n {
        let mut row = vec![Scalar::zero(); n];
        row[t] = Scalar::from_int(-1);
        cons.push(Constraint::new(row, Scalar::zero()));
    }
    match solve_lp(&cons, &vec![Scalar::zero(); n], false) {
        LpOutcome::Optimal { point, .. } => Some(point),
        _ => None,
    }
}

/// Shifts coefficients along the kernel vector until one vanishes,
/// keeping all of them nonnegative. Between the two admissible shift
/// directions, the one whose first-vanishing coefficient has the
/// smallest position wins.
fn shift_until_vanish(support: &mut Vec<(usize, Scalar)>, alpha: &[Scalar]) {
    debug_assert_eq!(support.len(), alpha.len());
    let lams: Vec<Scalar> = support.iter().map(|(_, c)| c.clone()).collect();
    let t = blocking_shift(&lams, alpha);
    for ((_, lam), a) in support.iter_mut().zip(alpha) {
        *lam = &*lam + &(&t * a);
    }
    debug_assert!(support.iter().all(|(_, c)| !c.is_negative()));
    support.retain(|(_, c)| !c.is_zero());
}

/// The shift scale that first zeroes a coefficient; deterministic: of
/// the two directions, prefer the one vanishing the smallest position.
fn blocking_shift(lams: &[Scalar], alpha: &[Scalar]) -> Scalar {
    let mut t_pos: Option<(Scalar, usize)> = None; // blocked by alpha < 0
    let mut t_neg: Option<(Scalar, usize)> = None; // blocked by alpha > 0
    for (pos, (lam, a)) in lams.iter().zip(alpha).enumerate() {
        if a.is_negative() {
            let t = lam / &(-a.clone());
            if t_pos.as_ref().map_or(true, |(b, _)| t < *b) {
                t_pos = Some((t, pos));
            }
        } else if a.is_positive() {
            let t = -(lam / a);
            if t_neg.as_ref().map_or(true, |(b, _)| t > *b) {
                t_neg = Some((t, pos));
            }
        }
    }
    match (t_pos, t_neg) {
        (Some((tp, ip)), Some((tn, in_))) => {
            if ip <= in_ {
                tp
            } else {
                tn
            }
        }
        (Some((tp, _)), None) => tp,
        (None, Some((tn, _))) => tn,
        (None, None) => unreachable!("kernel vector is zero"),
    }
}

/// Result of the symmetric two-set reduction: small subsets of each side
/// whose hulls still share the witness point.
#[derive(Clone, Debug)]
pub struct SymmetricCaratheodory {
    pub s1: Vec<(usize, Scalar)>,
    pub s2: Vec<(usize, Scalar)>,
    pub witness: Point,
}

/// Shrinks an intersecting pair to subsets with `|S1| + |S2| <= d + 2`
/// via the kernel-shift loop, keeping a common witness point exact.
pub fn symmetric_caratheodory(
    domain: &Domain,
    x: &PointSet,
    y: &PointSet,
) -> Result<SymmetricCaratheodory> {
    let witness = hulls_intersect(domain, x, y)?.ok_or(Error::DisjointHulls)?;
    let d = domain.dim();
    let mut s1 = witness.x_coeffs;
    let mut s2 = witness.y_coeffs;

    while s1.len() + s2.len() > d + 2 {
        let (n1, n2) = (s1.len(), s2.len());
        let s = n1 + n2;
        // Rows: sum a_i x_i - sum b_j y_j = 0 (d), sum a = 0, sum b = 0.
        let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(d + 2);
        for k in 0..d {
            let mut row = Vec::with_capacity(s);
            for (i, _) in &s1 {
                row.push(domain.point(*i).coords[k].clone());
            }
            for (j, _) in &s2 {
                row.push(-domain.point(*j).coords[k].clone());
            }
            rows.push(row);
        }
        let mut ones_x = vec![Scalar::zero(); s];
        for item in ones_x.iter_mut().take(n1) {
            *item = Scalar::one();
        }
        rows.push(ones_x);
        let mut ones_y = vec![Scalar::zero(); s];
        for item in ones_y.iter_mut().skip(n1) {
            *item = Scalar::one();
        }
        rows.push(ones_y);

        let kernel = nullspace_basis(&rows, s);
        let alpha = kernel
            .first()
            .expect("joint support exceeds d+2, kernel is nontrivial")
            .clone();
        let mut joint: Vec<(usize, Scalar)> =
            s1.iter().cloned().chain(s2.iter().cloned()).collect();
        shift_until_vanish(&mut joint, &alpha);
        // Positions are preserved in order by the shift; recompute which
        // of the first n1 slots survived to split the sides back.
        let lams: Vec<Scalar> = s1
            .iter()
            .map(|(_, c)| c.clone())
            .chain(s2.iter().map(|(_, c)| c.clone()))
            .collect();
        let t = blocking_shift(&lams, &alpha);
        let survivors_x = lams
            .iter()
            .zip(&alpha)
            .take(n1)
            .filter(|(lam, a)| !(&**lam + &(&t * *a)).is_zero())
            .count();
        let mut jt = joint.into_iter();
        s1 = (&mut jt).take(survivors_x).collect();
        s2 = jt.collect();
        let _ = n2;
        debug_assert!(!s1.is_empty() && !s2.is_empty());
    }

    let mut z = vec![Scalar::zero(); d];
    for (i, c) in &s1 {
        for k in 0..d {
            z[k] += &(c * &domain.point(*i).coords[k]);
        }
    }
    debug_assert_eq!(
        {
            let mut w = vec![Scalar::zero(); d];
            for (j, c) in &s2 {
                for k in 0..d {
                    w[k] += &(c * &domain.point(*j).coords[k]);
                }
            }
            w
        },
        z
    );
    Ok(SymmetricCaratheodory {
        s1,
        s2,
        witness: Point::new(z),
    })
}

// ---------------------------------------------------------------------
// Bottom-vertex triangulation.
// ---------------------------------------------------------------------

/// Face-walking state over one polytope: caches bottom vertices and
/// affine dimensions per tight set. Small polytopes enumerate their
/// vertex set once and answer every face query by scanning it; larger
/// ones fall back to exact LPs.
pub struct BvtContext {
    poly: Polytope,
    dim: usize,
    vertices: Option<Vec<Vec<Scalar>>>,
    bottom_memo: HashMap<Vec<usize>, Option<Vec<Scalar>>>,
    dim_memo: HashMap<Vec<usize>, Option<usize>>,
    full_dim: usize,
}

/// Budget on `C(#inequalities, dim)` under which the vertex list is
/// enumerated eagerly.
const VERTEX_ENUM_BUDGET: u128 = 60_000;

impl BvtContext {
    /// Prepares a context; errors if the polytope is empty or unbounded.
    pub fn new(poly: &Polytope) -> Result<Self> {
        Self::with_known_shape(poly, None)
    }

    /// Like [`BvtContext::new`] for callers that already know the
    /// polytope is bounded, nonempty, and of the given affine-hull
    /// dimension; skips the corresponding LP checks.
    pub fn with_known_shape(poly: &Polytope, known_dim: Option<usize>) -> Result<Self> {
        let dim = poly.dim();
        let mut ctx = BvtContext {
            poly: poly.clone(),
            dim,
            vertices: None,
            bottom_memo: HashMap::new(),
            dim_memo: HashMap::new(),
            full_dim: 0,
        };
        if known_dim.is_none() {
            ctx.check_nonempty_bounded()?;
        }
        if binomial(ctx.poly.num_inequalities(), dim) <= VERTEX_ENUM_BUDGET {
            let verts = enumerate_vertices_raw(&ctx.poly);
            if verts.is_empty() {
                return Err(Error::EmptyPolytope);
            }
            ctx.vertices = Some(verts);
        }
        ctx.full_dim = match known_dim {
            Some(d) => d,
            None => ctx.affine_dim(&[])?.expect("nonempty checked above"),
        };
        Ok(ctx)
    }

    fn check_nonempty_bounded(&self) -> Result<()> {
        let cons = self.constraints(&[]);
        for k in 0..self.dim {
            let mut obj = vec![Scalar::zero(); self.dim];
            obj[k] = Scalar::one();
            for maximize in [false, true] {
                match solve_lp(&cons, &obj, maximize) {
                    LpOutcome::Infeasible { .. } => return Err(Error::EmptyPolytope),
                    LpOutcome::Unbounded => return Err(Error::UnboundedPolytope),
                    LpOutcome::Optimal { .. } => {}
                }
            }
        }
        Ok(())
    }

    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    pub fn polytope(&self) -> &Polytope {
        &self.poly
    }

    fn constraints(&self, tight: &[usize]) -> Vec<Constraint> {
        let mut cons: Vec<Constraint> = self
            .poly
            .inequalities()
            .iter()
            .map(|r| Constraint::new(r.normal.clone(), r.bound.clone()))
            .collect();
        for &id in tight {
            let r = &self.poly.inequalities()[id];
            cons.push(Constraint::new(
                r.normal.iter().map(|v| -v.clone()).collect(),
                -r.bound.clone(),
            ));
        }
        cons
    }

    fn face_vertices(&self, tight: &[usize]) -> Vec<&Vec<Scalar>> {
        let verts = self.vertices.as_ref().expect("vertex path");
        verts
            .iter()
            .filter(|v| {
                tight
                    .iter()
                    .all(|&id| self.poly.inequalities()[id].tight_at(v))
            })
            .collect()
    }

    /// Lexicographically smallest vertex of the face with the given
    /// tight set; `None` if the face is empty.
    pub fn bottom(&mut self, tight: &[usize]) -> Result<Option<Vec<Scalar>>> {
        let key = tight.to_vec();
        if let Some(v) = self.bottom_memo.get(&key) {
            return Ok(v.clone());
        }
        let result = if self.vertices.is_some() {
            self.face_vertices(tight).into_iter().min().cloned()
        } else {
            lex_min_point(&self.constraints(tight), self.dim)?
        };
        self.bottom_memo.insert(key, result.clone());
        Ok(result)
    }

    /// Affine dimension of the face; `None` if the face is empty.
    pub fn affine_dim(&mut self, tight: &[usize]) -> Result<Option<usize>> {
        let key = tight.to_vec();
        if let Some(v) = self.dim_memo.get(&key) {
            return Ok(*v);
        }
        let result = if self.vertices.is_some() {
            let fv = self.face_vertices(tight);
            if fv.is_empty() {
                None
            } else {
                let base = fv[0];
                let diffs: Vec<Vec<Scalar>> = fv[1..]
                    .iter()
                    .map(|v| v.iter().zip(base.iter()).map(|(a, b)| a - b).collect())
                    .collect();
                Some(rank(&diffs))
            }
        } else {
            self.affine_dim_lp(tight)?
        };
        self.dim_memo.insert(key, result);
        Ok(result)
    }

    /// Certified affine dimension via LPs: grow a direction basis until
    /// every direction orthogonal to it is constant over the face.
    fn affine_dim_lp(&self, tight: &[usize]) -> Result<Option<usize>> {
        let cons = self.constraints(tight);
        if lex_min_point(&cons, self.dim)?.is_none() {
            return Ok(None);
        }
        let mut dirs: Vec<Vec<Scalar>> = Vec::new();
        'outer: loop {
            let kernel = if dirs.is_empty() {
                (0..self.dim)
                    .map(|k| {
                        let mut e = vec![Scalar::zero(); self.dim];
                        e[k] = Scalar::one();
                        e
                    })
                    .collect()
            } else {
                nullspace_basis(&dirs, self.dim)
            };
            if kernel.is_empty() {
                break;
            }
            for w in &kernel {
                let hi = match solve_lp(&cons, w, true) {
                    LpOutcome::Optimal { point, value } => (point, value),
                    _ => return Err(Error::UnboundedPolytope),
                };
                let lo = match solve_lp(&cons, w, false) {
                    LpOutcome::Optimal { point, value } => (point, value),
                    _ => return Err(Error::UnboundedPolytope),
                };
                if hi.1 > lo.1 {
                    dirs.push(hi.0.iter().zip(lo.0.iter()).map(|(a, b)| a - b).collect());
                    continue 'outer;
                }
            }
            break;
        }
        Ok(Some(dirs.len()))
    }

    /// Among candidate ids, the smallest one whose tightening drops the
    /// face dimension by exactly one.
    fn smallest_facet_defining(
        &mut self,
        tight: &[usize],
        cur_dim: usize,
        candidates: &[usize],
    ) -> Result<usize> {
        for &c in candidates {
            let mut t = tight.to_vec();
            t.push(c);
            t.sort_unstable();
            if self.affine_dim(&t)? == Some(cur_dim - 1) {
                return Ok(c);
            }
        }
        Err(Error::InvalidInput(
            "no facet-defining inequality at hit point".into(),
        ))
    }

    /// Ray-shooting encode: the constraint-id sequence whose facet chain
    /// pins down vertices spanning `a`. Length equals the affine-hull
    /// dimension of the polytope.
    pub fn encode(&mut self, a: &[Scalar]) -> Result<BvtSequence> {
        if !self.poly.contains(a) {
            return Err(Error::PointNotInPolytope);
        }
        let mut tight: Vec<usize> = Vec::new();
        let mut cur_dim = self.full_dim;
        let mut a_cur = a.to_vec();
        let mut seq = Vec::with_capacity(cur_dim);
        while cur_dim > 0 {
            let x = self.bottom(&tight)?.expect("current face contains a point");
            if x == a_cur {
                // Degenerate ray: the query sits on the pivot. Recurse
                // into the smallest-id facet tight at it.
                let candidates: Vec<usize> = self
                    .poly
                    .inequalities()
                    .iter()
                    .filter(|r| !tight.contains(&r.id) && r.tight_at(&a_cur))
                    .map(|r| r.id)
                    .collect();
                let c = self.smallest_facet_defining(&tight, cur_dim, &candidates)?;
                seq.push(c);
                tight.push(c);
                tight.sort_unstable();
                cur_dim -= 1;
                continue;
            }
            // Shoot the ray x + t (a_cur - x), t >= 1, to the boundary.
            let dir: Vec<Scalar> = a_cur.iter().zip(&x).map(|(p, q)| p - q).collect();
            let mut t_max: Option<Scalar> = None;
            for r in self.poly.inequalities() {
                let slope = dot(&r.normal, &dir);
                if slope.is_positive() {
                    let slack = &r.bound - &dot(&r.normal, &x);
                    let t = &slack / &slope;
                    if t_max.as_ref().map_or(true, |b| t < *b) {
                        t_max = Some(t);
                    }
                }
            }
            let t_max = t_max.ok_or(Error::UnboundedPolytope)?;
            debug_assert!(t_max >= Scalar::one());
            let hit: Vec<Scalar> = x
                .iter()
                .zip(&dir)
                .map(|(xq, dq)| xq + &(&t_max * dq))
                .collect();
            let binding: Vec<usize> = self
                .poly
                .inequalities()
                .iter()
                .filter(|r| dot(&r.normal, &dir).is_positive() && r.tight_at(&hit))
                .map(|r| r.id)
                .collect();
            debug_assert!(!binding.is_empty());
            // A unique binding constraint always defines a facet; a
            // corner hit needs the dimension filter.
            let c = if binding.len() == 1 {
                binding[0]
            } else {
                self.smallest_facet_defining(&tight, cur_dim, &binding)?
            };
            seq.push(c);
            tight.push(c);
            tight.sort_unstable();
            cur_dim -= 1;
            a_cur = hit;
        }
        Ok(BvtSequence {
            constraint_ids: seq,
        })
    }

    /// Facet-chain decode: bottom vertices of the successive tightenings,
    /// `x_0..x_m`.
    pub fn decode(&mut self, seq: &BvtSequence) -> Result<Vec<Vec<Scalar>>> {
        let mut tight: Vec<usize> = Vec::new();
        let mut out = Vec::with_capacity(seq.constraint_ids.len() + 1);
        let first = self.bottom(&[])?.ok_or(Error::EmptyPolytope)?;
        out.push(first);
        for &id in &seq.constraint_ids {
            if id >= self.poly.num_inequalities() {
                return Err(Error::InvalidSequence);
            }
            tight.push(id);
            tight.sort_unstable();
            match self.bottom(&tight)? {
                Some(v) => out.push(v),
                None => return Err(Error::InvalidSequence),
            }
        }
        Ok(out)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// All vertices of a polytope: solutions of `dim`-subsets of
/// inequalities turned tight that satisfy every inequality.
fn enumerate_vertices_raw(poly: &Polytope) -> Vec<Vec<Scalar>> {
    let dim = poly.dim();
    let rows = poly.inequalities();
    let m = rows.len();
    let mut out: Vec<Vec<Scalar>> = Vec::new();
    if m < dim {
        return out;
    }
    let mut subset: Vec<usize> = (0..dim).collect();
    loop {
        let a: Vec<Vec<Scalar>> = subset.iter().map(|&i| rows[i].normal.clone()).collect();
        let b: Vec<Scalar> = subset.iter().map(|&i| rows[i].bound.clone()).collect();
        if let Some(x) = solve_square(&a, &b) {
            if poly.contains(&x) && !out.contains(&x) {
                out.push(x);
            }
        }
        // Next dim-subset in lexicographic order.
        let mut i = dim;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if subset[i] != i + m - dim {
                subset[i] += 1;
                for j in (i + 1)..dim {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Exact vertex enumeration of a bounded polytope (desk scale).
pub fn enumerate_vertices(poly: &Polytope) -> Result<Vec<Vec<Scalar>>> {
    let ctx = BvtContext::new(poly)?;
    match ctx.vertices {
        Some(v) => Ok(v),
        None => Err(Error::CapExceeded(
            "vertex enumeration over budget for this polytope".into(),
        )),
    }
}

/// The canonical pivot: lexicographically smallest vertex of a bounded
/// nonempty polytope.
pub fn bottom_vertex(poly: &Polytope) -> Result<Point> {
    let mut ctx = BvtContext::new(poly)?;
    let v = ctx.bottom(&[])?.ok_or(Error::EmptyPolytope)?;
    Ok(Point::new(v))
}

/// Encodes `a`'s position in `poly` as a sequence of constraint ids of
/// length equal to the affine-hull dimension.
pub fn bvt_encode(poly: &Polytope, a: &Point) -> Result<BvtSequence> {
    let mut ctx = BvtContext::new(poly)?;
    ctx.encode(&a.coords)
}

/// Decodes a constraint sequence into the chain of bottom vertices
/// `x_0..x_m`.
pub fn bvt_decode(poly: &Polytope, seq: &BvtSequence) -> Result<Vec<Point>> {
    let mut ctx = BvtContext::new(poly)?;
    Ok(ctx.decode(seq)?.into_iter().map(Point::new).collect())
}

/// Covers a bounded polytope by the simplices decoded from every valid
/// facet chain: at most `n^d` of them for `n` inequalities in affine
/// dimension `d`.
pub fn cover_by_simplices(poly: &Polytope) -> Result<Vec<Simplex>> {
    let mut ctx = BvtContext::new(poly)?;
    let full = ctx.full_dim;
    let first = ctx.bottom(&[])?.ok_or(Error::EmptyPolytope)?;
    let mut out: Vec<Simplex> = Vec::new();
    rec_cover(&mut ctx, &mut Vec::new(), full, &mut vec![first], &mut out)?;
    // Chains through faces incident to a shared pivot decode to the same
    // vertex list; keep one copy each.
    let mut seen: Vec<Vec<Point>> = Vec::new();
    out.retain(|sx| {
        if seen.contains(&sx.vertices) {
            false
        } else {
            seen.push(sx.vertices.clone());
            true
        }
    });
    Ok(out)
}

fn rec_cover(
    ctx: &mut BvtContext,
    tight: &mut Vec<usize>,
    cur_dim: usize,
    chain: &mut Vec<Vec<Scalar>>,
    out: &mut Vec<Simplex>,
) -> Result<()> {
    if cur_dim == 0 {
        out.push(Simplex {
            vertices: chain.iter().cloned().map(Point::new).collect(),
        });
        return Ok(());
    }
    for c in 0..ctx.poly.num_inequalities() {
        if tight.contains(&c) {
            continue;
        }
        let mut t = tight.clone();
        t.push(c);
        t.sort_unstable();
        if ctx.affine_dim(&t)? != Some(cur_dim - 1) {
            continue;
        }
        let bottom = ctx.bottom(&t)?.expect("face is nonempty");
        tight.push(c);
        chain.push(bottom);
        rec_cover(ctx, tight, cur_dim - 1, chain, out)?;
        chain.pop();
        tight.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn interval(lo: Scalar, hi: Scalar) -> Polytope {
        Polytope::new(
            1,
            vec![(vec![Scalar::one()], hi), (vec![Scalar::from_int(-1)], -lo)],
        )
        .unwrap()
    }

    #[test]
    fn caratheodory_reduce_line() {
        let d = Domain::line(&[0, 1, 2, 3]).unwrap();
        let out = caratheodory_reduce(&d, &Point::from_ints(&[1]), &d.full_set()).unwrap();
        assert!(out.len() <= 2);
        let recon: Scalar = out
            .iter()
            .fold(Scalar::zero(), |acc, (i, c)| acc + c * &d.point(*i).coords[0]);
        assert_eq!(recon, s(1));
    }

    #[test]
    fn caratheodory_reduce_member_point() {
        let d = Domain::line(&[0, 1, 2]).unwrap();
        let out = caratheodory_reduce(&d, &Point::from_ints(&[2]), &d.full_set()).unwrap();
        assert_eq!(out, vec![(2, Scalar::one())]);
    }

    #[test]
    fn caratheodory_reduce_rejects_outside_point() {
        let d = Domain::line(&[0, 1]).unwrap();
        assert_eq!(
            caratheodory_reduce(&d, &Point::from_ints(&[5]), &d.full_set()).unwrap_err(),
            Error::NotInHull
        );
    }

    #[test]
    fn caratheodory_reduce_planar_exact_reconstruction() {
        let d = Domain::grid(4).unwrap();
        let q = Point::new(vec![Scalar::ratio(7, 5), Scalar::ratio(9, 7)]);
        let out = caratheodory_reduce(&d, &q, &d.full_set()).unwrap();
        assert!(out.len() <= 3);
        let mut recon = vec![Scalar::zero(), Scalar::zero()];
        let mut total = Scalar::zero();
        for (i, c) in &out {
            total += c;
            for k in 0..2 {
                recon[k] += &(c * &d.point(*i).coords[k]);
            }
        }
        assert_eq!(total, Scalar::one());
        assert_eq!(recon, q.coords);
    }

    #[test]
    fn symmetric_line_example() {
        // X = {0,2}, Y = {1,3}: joint support <= 3 = d + 2, and the hulls
        // of the outputs still intersect.
        let d = Domain::line(&[0, 2, 1, 3]).unwrap();
        let x = PointSet::new(vec![0, 1]);
        let y = PointSet::new(vec![2, 3]);
        let out = symmetric_caratheodory(&d, &x, &y).unwrap();
        assert!(out.s1.len() + out.s2.len() <= 3);
        let s1: PointSet = out.s1.iter().map(|(i, _)| *i).collect();
        let s2: PointSet = out.s2.iter().map(|(i, _)| *i).collect();
        assert!(hulls_intersect(&d, &s1, &s2).unwrap().is_some());
    }

    #[test]
    fn symmetric_shared_point() {
        let d = Domain::line(&[5, 7]).unwrap();
        let both = PointSet::new(vec![0]);
        let out = symmetric_caratheodory(&d, &both, &both).unwrap();
        assert_eq!(out.s1.len() + out.s2.len(), 2);
        assert_eq!(out.witness, Point::from_ints(&[5]));
    }

    #[test]
    fn symmetric_disjoint_errors() {
        let d = Domain::line(&[0, 1]).unwrap();
        assert_eq!(
            symmetric_caratheodory(&d, &PointSet::new(vec![0]), &PointSet::new(vec![1]))
                .unwrap_err(),
            Error::DisjointHulls
        );
    }

    #[test]
    fn symmetric_exercises_elimination_from_dense_start() {
        // Two overlapping planar quadrilaterals; the LP witness support
        // can exceed d + 2 only transiently, the loop must land <= 4.
        let d = Domain::new(
            2,
            vec![
                Point::from_ints(&[0, 0]),
                Point::from_ints(&[4, 0]),
                Point::from_ints(&[0, 4]),
                Point::from_ints(&[4, 4]),
                Point::from_ints(&[1, 1]),
                Point::from_ints(&[3, 1]),
                Point::from_ints(&[1, 3]),
                Point::from_ints(&[3, 3]),
            ],
        )
        .unwrap();
        let x = PointSet::new(vec![0, 1, 2, 3]);
        let y = PointSet::new(vec![4, 5, 6, 7]);
        let out = symmetric_caratheodory(&d, &x, &y).unwrap();
        assert!(out.s1.len() + out.s2.len() <= 4);
        let s1: PointSet = out.s1.iter().map(|(i, _)| *i).collect();
        let s2: PointSet = out.s2.iter().map(|(i, _)| *i).collect();
        assert!(hulls_intersect(&d, &s1, &s2).unwrap().is_some());
    }

    #[test]
    fn bottom_vertex_examples() {
        let sq = Polytope::bounding_box(2, s(0), s(1)).unwrap();
        assert_eq!(bottom_vertex(&sq).unwrap(), Point::from_ints(&[0, 0]));
        let seg = interval(Scalar::ratio(1, 3), Scalar::ratio(2, 3));
        assert_eq!(
            bottom_vertex(&seg).unwrap(),
            Point::new(vec![Scalar::ratio(1, 3)])
        );
    }

    #[test]
    fn bottom_vertex_rejects_empty_and_unbounded() {
        let empty = interval(s(1), s(0));
        assert_eq!(bottom_vertex(&empty).unwrap_err(), Error::EmptyPolytope);
        let unbounded = Polytope::new(1, vec![(vec![s(-1)], s(0))]).unwrap();
        assert_eq!(
            bottom_vertex(&unbounded).unwrap_err(),
            Error::UnboundedPolytope
        );
    }

    #[test]
    fn bvt_unit_interval() {
        // Q = [0,1], a = 1/3: the ray from 0 through 1/3 exits at 1, so
        // the sequence holds the id of "x <= 1".
        let q = interval(s(0), s(1));
        let seq = bvt_encode(&q, &Point::new(vec![Scalar::ratio(1, 3)])).unwrap();
        assert_eq!(seq.constraint_ids, vec![0]);
        let verts = bvt_decode(&q, &seq).unwrap();
        assert_eq!(verts, vec![Point::from_ints(&[0]), Point::from_ints(&[1])]);
    }

    #[test]
    fn bvt_degenerate_query_at_pivot() {
        let q = interval(s(0), s(1));
        let seq = bvt_encode(&q, &Point::from_ints(&[0])).unwrap();
        let verts = bvt_decode(&q, &seq).unwrap();
        assert!(in_convex_hull_of(&verts, &Point::from_ints(&[0])));
    }

    #[test]
    fn bvt_invalid_sequence_errors() {
        let q = interval(s(0), s(1));
        let bad = BvtSequence {
            constraint_ids: vec![0, 1],
        };
        assert_eq!(bvt_decode(&q, &bad).unwrap_err(), Error::InvalidSequence);
        let oob = BvtSequence {
            constraint_ids: vec![7],
        };
        assert_eq!(bvt_decode(&q, &oob).unwrap_err(), Error::InvalidSequence);
    }

    #[test]
    fn bvt_outside_point_errors() {
        let q = interval(s(0), s(1));
        assert_eq!(
            bvt_encode(&q, &Point::from_ints(&[3])).unwrap_err(),
            Error::PointNotInPolytope
        );
    }

    fn hexagon() -> Polytope {
        Polytope::new(
            2,
            vec![
                (vec![s(1), s(0)], s(2)),
                (vec![s(-1), s(0)], s(2)),
                (vec![s(1), s(2)], s(3)),
                (vec![s(-1), s(2)], s(3)),
                (vec![s(1), s(-2)], s(3)),
                (vec![s(-1), s(-2)], s(3)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn bvt_round_trip_contains_query_on_hexagon() {
        let q = hexagon();
        let mut ctx = BvtContext::new(&q).unwrap();
        assert_eq!(ctx.full_dim(), 2);
        for ix in -6..=6 {
            for iy in -6..=6 {
                let a = Point::new(vec![Scalar::ratio(ix, 3), Scalar::ratio(iy, 3)]);
                if !q.contains(&a.coords) {
                    continue;
                }
                let seq = ctx.encode(&a.coords).unwrap();
                assert_eq!(seq.constraint_ids.len(), 2);
                let verts = ctx.decode(&seq).unwrap();
                assert_eq!(verts.len(), 3);
                assert!(
                    in_convex_hull_of(
                        &verts.iter().cloned().map(Point::new).collect::<Vec<_>>(),
                        &a
                    ),
                    "query {a:?} outside decoded simplex"
                );
            }
        }
    }

    #[test]
    fn cover_by_simplices_hexagon() {
        let q = hexagon();
        let cover = cover_by_simplices(&q).unwrap();
        assert!(cover.len() <= 36, "cover size {} > 6^2", cover.len());
        for ix in -6..=6 {
            for iy in -6..=6 {
                let p = Point::new(vec![Scalar::ratio(ix, 3), Scalar::ratio(iy, 3)]);
                if q.contains(&p.coords) {
                    assert!(cover.iter().any(|sx| sx.contains(&p)), "{p:?} not covered");
                }
            }
        }
    }

    #[test]
    fn cover_of_simplex_is_itself() {
        let tri = Polytope::new(
            2,
            vec![
                (vec![s(-1), s(0)], s(0)),
                (vec![s(0), s(-1)], s(0)),
                (vec![s(1), s(1)], s(1)),
            ],
        )
        .unwrap();
        let cover = cover_by_simplices(&tri).unwrap();
        assert!(cover.len() <= 9);
        // Exactly one full-dimensional simplex: the triangle itself.
        // Chains that revisit the pivot decode to degenerate (flat)
        // simplices, which cover nothing extra.
        let full: Vec<&Simplex> = cover
            .iter()
            .filter(|sx| {
                let mut vs = sx.vertices.clone();
                vs.sort();
                vs.dedup();
                vs.len() == 3
            })
            .collect();
        assert_eq!(full.len(), 1);
        let mut vs = full[0].vertices.clone();
        vs.sort();
        assert_eq!(
            vs,
            vec![
                Point::from_ints(&[0, 0]),
                Point::from_ints(&[0, 1]),
                Point::from_ints(&[1, 0]),
            ]
        );
    }

    #[test]
    fn vertex_enumeration_square() {
        let sq = Polytope::bounding_box(2, s(0), s(1)).unwrap();
        let mut vs = enumerate_vertices(&sq).unwrap();
        vs.sort();
        assert_eq!(vs.len(), 4);
        assert_eq!(vs[0], vec![s(0), s(0)]);
        assert_eq!(vs[3], vec![s(1), s(1)]);
    }
}
