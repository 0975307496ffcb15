//! Convex-hull oracles: intersection with exact witness, max-margin
//! separation, and hull membership.
//!
//! Dimensions 1 and 2 get predicate-based fast paths (interval tests,
//! polygon tests); the general path is the exact LP.

use super::lp::{lex_min_point, solve_lp, Constraint, LpOutcome};
use super::{Domain, Halfspace, Point, PointSet};
use crate::scalar::{dot, Scalar};
use crate::{Error, Result};

/// A point in both hulls together with exact convex coefficients that
/// reconstruct it on each side. Coefficients are `(domain index, weight)`
/// with nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionWitness {
    pub point: Point,
    pub x_coeffs: Vec<(usize, Scalar)>,
    pub y_coeffs: Vec<(usize, Scalar)>,
}

/// A strict separating halfspace with its L-infinity margin.
/// `halfspace` contains all of X, excludes all of Y, and the values
/// `<a, x>` stay at least `margin` away from the bias on both sides.
#[derive(Clone, Debug)]
pub struct Separator {
    pub halfspace: Halfspace,
    pub margin: Scalar,
}

fn check_inputs(domain: &Domain, x: &PointSet, y: &PointSet) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet);
    }
    x.validate(domain)?;
    y.validate(domain)?;
    Ok(())
}

/// Exact intersection test returning the canonical witness: the
/// lexicographically smallest point of `conv(X) ∩ conv(Y)`.
pub fn hulls_intersect(
    domain: &Domain,
    x: &PointSet,
    y: &PointSet,
) -> Result<Option<IntersectionWitness>> {
    check_inputs(domain, x, y)?;
    let d = domain.dim();
    let xi: Vec<usize> = x.iter().collect();
    let yi: Vec<usize> = y.iter().collect();
    let nx = xi.len();
    let ny = yi.len();
    let nv = nx + ny;

    // Variables: lambda over X then mu over Y.
    let mut cons: Vec<Constraint> = Vec::new();
    for k in 0..d {
        let mut row = vec![Scalar::zero(); nv];
        for (t, &i) in xi.iter().enumerate() {
            row[t] = domain.point(i).coords[k].clone();
        }
        for (t, &j) in yi.iter().enumerate() {
            row[nx + t] = -domain.point(j).coords[k].clone();
        }
        let neg: Vec<Scalar> = row.iter().map(|v| -v.clone()).collect();
        cons.push(Constraint::new(row, Scalar::zero()));
        cons.push(Constraint::new(neg, Scalar::zero()));
    }
    for (lo, hi) in [(0, nx), (nx, nv)] {
        let mut row = vec![Scalar::zero(); nv];
        for item in row.iter_mut().take(hi).skip(lo) {
            *item = Scalar::one();
        }
        let neg: Vec<Scalar> = row.iter().map(|v| -v.clone()).collect();
        cons.push(Constraint::new(row, Scalar::one()));
        cons.push(Constraint::new(neg, Scalar::from_int(-1)));
    }
    for t in 0..nv {
        let mut row = vec![Scalar::zero(); nv];
        row[t] = Scalar::from_int(-1);
        cons.push(Constraint::new(row, Scalar::zero()));
    }

    // Feasible at all?
    let zero_obj = vec![Scalar::zero(); nv];
    if let LpOutcome::Infeasible { .. } = solve_lp(&cons, &zero_obj, false) {
        return Ok(None);
    }

    // Pin the witness point coordinate by coordinate (lex-min), then read
    // off a basic coefficient vector.
    let mut work = cons;
    for k in 0..d {
        let mut obj = vec![Scalar::zero(); nv];
        for (t, &i) in xi.iter().enumerate() {
            obj[t] = domain.point(i).coords[k].clone();
        }
        let value = match solve_lp(&work, &obj, false) {
            LpOutcome::Optimal { value, .. } => value,
            _ => unreachable!("bounded feasible program"),
        };
        let neg: Vec<Scalar> = obj.iter().map(|v| -v.clone()).collect();
        work.push(Constraint::new(obj, value.clone()));
        work.push(Constraint::new(neg, -value));
    }
    let coeffs = match solve_lp(&work, &zero_obj, false) {
        LpOutcome::Optimal { point, .. } => point,
        _ => unreachable!("bounded feasible program"),
    };

    let x_coeffs: Vec<(usize, Scalar)> = xi
        .iter()
        .enumerate()
        .filter(|(t, _)| !coeffs[*t].is_zero())
        .map(|(t, &i)| (i, coeffs[t].clone()))
        .collect();
    let y_coeffs: Vec<(usize, Scalar)> = yi
        .iter()
        .enumerate()
        .filter(|(t, _)| !coeffs[nx + *t].is_zero())
        .map(|(t, &j)| (j, coeffs[nx + t].clone()))
        .collect();
    let mut point = vec![Scalar::zero(); d];
    for (i, w) in &x_coeffs {
        for k in 0..d {
            point[k] += &(w * &domain.point(*i).coords[k]);
        }
    }
    debug_assert_eq!(
        {
            let mut q = vec![Scalar::zero(); d];
            for (j, w) in &y_coeffs {
                for k in 0..d {
                    q[k] += &(w * &domain.point(*j).coords[k]);
                }
            }
            q
        },
        point
    );
    Ok(Some(IntersectionWitness {
        point: Point::new(point),
        x_coeffs,
        y_coeffs,
    }))
}

/// Fast exact yes/no version of [`hulls_intersect`].
pub fn hulls_intersect_quick(domain: &Domain, x: &PointSet, y: &PointSet) -> Result<bool> {
    check_inputs(domain, x, y)?;
    match domain.dim() {
        1 => {
            let vals = |s: &PointSet| {
                let mut lo: Option<Scalar> = None;
                let mut hi: Option<Scalar> = None;
                for i in s.iter() {
                    let v = domain.point(i).coords[0].clone();
                    lo = Some(match lo {
                        None => v.clone(),
                        Some(l) => l.min(v.clone()),
                    });
                    hi = Some(match hi {
                        None => v,
                        Some(h) => h.max(v),
                    });
                }
                (lo.unwrap(), hi.unwrap())
            };
            let (xl, xr) = vals(x);
            let (yl, yr) = vals(y);
            // Disjoint iff x_right < y_left or y_right < x_left.
            Ok(!(xr < yl || yr < xl))
        }
        2 => {
            let hx = convex_hull_2d(domain, x);
            let hy = convex_hull_2d(domain, y);
            Ok(polygons_intersect(domain, &hx, &hy))
        }
        _ => Ok(hulls_intersect(domain, x, y)?.is_some()),
    }
}

/// Orientation of the triple `(a, b, c)`: sign of the cross product of
/// `b - a` and `c - a`.
fn orient(a: &Point, b: &Point, c: &Point) -> std::cmp::Ordering {
    let v = (&b.coords[0] - &a.coords[0]) * (&c.coords[1] - &a.coords[1])
        - (&b.coords[1] - &a.coords[1]) * (&c.coords[0] - &a.coords[0]);
    v.as_rational().numer().sign().into_ordering()
}

trait SignExt {
    fn into_ordering(self) -> std::cmp::Ordering;
}

impl SignExt for num_bigint::Sign {
    fn into_ordering(self) -> std::cmp::Ordering {
        match self {
            num_bigint::Sign::Minus => std::cmp::Ordering::Less,
            num_bigint::Sign::NoSign => std::cmp::Ordering::Equal,
            num_bigint::Sign::Plus => std::cmp::Ordering::Greater,
        }
    }
}

/// Convex hull indices in counterclockwise order (monotone chain).
/// Collinear interior points are dropped; a hull may degenerate to a
/// single point or a segment.
pub(crate) fn convex_hull_2d(domain: &Domain, set: &PointSet) -> Vec<usize> {
    let mut idx: Vec<usize> = set.iter().collect();
    idx.sort_by(|&a, &b| domain.point(a).coords.cmp(&domain.point(b).coords));
    idx.dedup_by(|a, b| domain.point(*a) == domain.point(*b));
    if idx.len() <= 2 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && orient(
                domain.point(lower[lower.len() - 2]),
                domain.point(lower[lower.len() - 1]),
                domain.point(i),
            ) != std::cmp::Ordering::Greater
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && orient(
                domain.point(upper[upper.len() - 2]),
                domain.point(upper[upper.len() - 1]),
                domain.point(i),
            ) != std::cmp::Ordering::Greater
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn on_segment(a: &Point, b: &Point, q: &Point) -> bool {
    if orient(a, b, q) != std::cmp::Ordering::Equal {
        return false;
    }
    (0..2).all(|k| {
        let lo = a.coords[k].clone().min(b.coords[k].clone());
        let hi = a.coords[k].clone().max(b.coords[k].clone());
        lo <= q.coords[k] && q.coords[k] <= hi
    })
}

fn segments_intersect(p1: &Point, p2: &Point, p3: &Point, p4: &Point) -> bool {
    use std::cmp::Ordering::*;
    let d1 = orient(p3, p4, p1);
    let d2 = orient(p3, p4, p2);
    let d3 = orient(p1, p2, p3);
    let d4 = orient(p1, p2, p4);
    if ((d1 == Greater && d2 == Less) || (d1 == Less && d2 == Greater))
        && ((d3 == Greater && d4 == Less) || (d3 == Less && d4 == Greater))
    {
        return true;
    }
    (d1 == Equal && on_segment(p3, p4, p1))
        || (d2 == Equal && on_segment(p3, p4, p2))
        || (d3 == Equal && on_segment(p1, p2, p3))
        || (d4 == Equal && on_segment(p1, p2, p4))
}

fn point_in_hull_cycle(domain: &Domain, hull: &[usize], q: &Point) -> bool {
    match hull.len() {
        0 => false,
        1 => domain.point(hull[0]) == q,
        2 => on_segment(domain.point(hull[0]), domain.point(hull[1]), q),
        _ => (0..hull.len()).all(|i| {
            let a = domain.point(hull[i]);
            let b = domain.point(hull[(i + 1) % hull.len()]);
            orient(a, b, q) != std::cmp::Ordering::Less
        }),
    }
}

fn polygons_intersect(domain: &Domain, hx: &[usize], hy: &[usize]) -> bool {
    if hx
        .iter()
        .any(|&i| point_in_hull_cycle(domain, hy, domain.point(i)))
        || hy
            .iter()
            .any(|&j| point_in_hull_cycle(domain, hx, domain.point(j)))
    {
        return true;
    }
    let edges = |h: &[usize]| -> Vec<(usize, usize)> {
        match h.len() {
            0 | 1 => vec![],
            2 => vec![(h[0], h[1])],
            n => (0..n).map(|i| (h[i], h[(i + 1) % n])).collect(),
        }
    };
    for (a, b) in edges(hx) {
        for (c, d) in edges(hy) {
            if segments_intersect(
                domain.point(a),
                domain.point(b),
                domain.point(c),
                domain.point(d),
            ) {
                return true;
            }
        }
    }
    false
}

/// The lexicographically smallest point of `conv(X) ∩ conv(Y)`, if any.
/// Small planar and one-dimensional inputs take exact predicate fast
/// paths; everything else goes through the LP witness.
pub(crate) fn canonical_intersection_point(
    domain: &Domain,
    x: &PointSet,
    y: &PointSet,
) -> Result<Option<Point>> {
    check_inputs(domain, x, y)?;
    match domain.dim() {
        1 => {
            let ends = |s: &PointSet| {
                let mut lo: Option<Scalar> = None;
                let mut hi: Option<Scalar> = None;
                for i in s.iter() {
                    let v = domain.point(i).coords[0].clone();
                    lo = Some(lo.map_or(v.clone(), |l: Scalar| l.min(v.clone())));
                    hi = Some(hi.map_or(v.clone(), |h: Scalar| h.max(v)));
                }
                (lo.unwrap(), hi.unwrap())
            };
            let (xl, xr) = ends(x);
            let (yl, yr) = ends(y);
            let lo = xl.max(yl);
            let hi = xr.min(yr);
            Ok((lo <= hi).then(|| Point::new(vec![lo])))
        }
        2 => {
            let hx = convex_hull_2d(domain, x);
            let hy = convex_hull_2d(domain, y);
            if hx.len() <= 2 && hy.len() <= 2 {
                let seg = |h: &[usize]| {
                    let a = domain.point(h[0]).clone();
                    let b = domain.point(*h.last().unwrap()).clone();
                    (a, b)
                };
                let (p1, p2) = seg(&hx);
                let (p3, p4) = seg(&hy);
                return Ok(segment_intersection_lex_min(&p1, &p2, &p3, &p4));
            }
            if hx.len() == 1 {
                let q = domain.point(hx[0]);
                return Ok(point_in_hull_cycle(domain, &hy, q).then(|| q.clone()));
            }
            if hy.len() == 1 {
                let q = domain.point(hy[0]);
                return Ok(point_in_hull_cycle(domain, &hx, q).then(|| q.clone()));
            }
            // General planar intersection: fall back to the LP witness.
            Ok(hulls_intersect(domain, x, y)?.map(|w| w.point))
        }
        _ => Ok(hulls_intersect(domain, x, y)?.map(|w| w.point)),
    }
}

/// Lexicographically smallest point of the intersection of two closed
/// segments (either may be degenerate), or `None` if disjoint.
fn segment_intersection_lex_min(p1: &Point, p2: &Point, p3: &Point, p4: &Point) -> Option<Point> {
    let sub = |a: &Point, b: &Point| {
        vec![
            &a.coords[0] - &b.coords[0],
            &a.coords[1] - &b.coords[1],
        ]
    };
    let cross = |u: &[Scalar], v: &[Scalar]| &u[0] * &v[1] - &u[1] * &v[0];
    let d1 = sub(p2, p1);
    let d2 = sub(p4, p3);
    let denom = cross(&d1, &d2);
    if !denom.is_zero() {
        // Proper lines: unique candidate p1 + t d1 with s on the other.
        let w = sub(p3, p1);
        let t = cross(&w, &d2) / denom.clone();
        let s = cross(&w, &d1) / denom;
        let zero = Scalar::zero();
        let one = Scalar::one();
        if t >= zero && t <= one && s >= zero && s <= one {
            return Some(Point::new(vec![
                &p1.coords[0] + &(&t * &d1[0]),
                &p1.coords[1] + &(&t * &d1[1]),
            ]));
        }
        return None;
    }
    // Parallel. Distinct supporting lines never meet.
    if !cross(&sub(p3, p1), &d1).is_zero() && !(d1[0].is_zero() && d1[1].is_zero()) {
        return None;
    }
    if d1[0].is_zero() && d1[1].is_zero() {
        // First segment is a point.
        return on_segment(p3, p4, p1).then(|| p1.clone());
    }
    if d2[0].is_zero() && d2[1].is_zero() {
        return on_segment(p1, p2, p3).then(|| p3.clone());
    }
    if !cross(&sub(p3, p1), &d1).is_zero() {
        return None;
    }
    // Collinear overlap: compare lexicographic endpoints.
    let (a_lo, a_hi) = if p1.coords <= p2.coords {
        (p1, p2)
    } else {
        (p2, p1)
    };
    let (b_lo, b_hi) = if p3.coords <= p4.coords {
        (p3, p4)
    } else {
        (p4, p3)
    };
    let lo = if a_lo.coords >= b_lo.coords { a_lo } else { b_lo };
    let hi = if a_hi.coords <= b_hi.coords { a_hi } else { b_hi };
    (lo.coords <= hi.coords).then(|| lo.clone())
}

/// Batched exact hull membership: the hull structure is built once.
pub fn points_in_hull(domain: &Domain, queries: &[Point], set: &PointSet) -> Result<Vec<bool>> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    set.validate(domain)?;
    match domain.dim() {
        2 => {
            let hull = convex_hull_2d(domain, set);
            Ok(queries
                .iter()
                .map(|q| point_in_hull_cycle(domain, &hull, q))
                .collect())
        }
        _ => queries
            .iter()
            .map(|q| point_in_hull(domain, q, set))
            .collect(),
    }
}

/// Exact membership of an arbitrary point in `conv(set)`.
pub fn point_in_hull(domain: &Domain, q: &Point, set: &PointSet) -> Result<bool> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    set.validate(domain)?;
    if q.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: q.dim(),
        });
    }
    match domain.dim() {
        1 => {
            let mut lo: Option<&Scalar> = None;
            let mut hi: Option<&Scalar> = None;
            for i in set.iter() {
                let v = &domain.point(i).coords[0];
                if lo.is_none() || v < lo.unwrap() {
                    lo = Some(v);
                }
                if hi.is_none() || v > hi.unwrap() {
                    hi = Some(v);
                }
            }
            Ok(lo.unwrap() <= &q.coords[0] && &q.coords[0] <= hi.unwrap())
        }
        2 => {
            let hull = convex_hull_2d(domain, set);
            Ok(point_in_hull_cycle(domain, &hull, q))
        }
        _ => {
            let idx: Vec<usize> = set.iter().collect();
            let n = idx.len();
            let d = domain.dim();
            let mut cons: Vec<Constraint> = Vec::new();
            for k in 0..d {
                let row: Vec<Scalar> = idx
                    .iter()
                    .map(|&i| domain.point(i).coords[k].clone())
                    .collect();
                let neg: Vec<Scalar> = row.iter().map(|v| -v.clone()).collect();
                cons.push(Constraint::new(row, q.coords[k].clone()));
                cons.push(Constraint::new(neg, -q.coords[k].clone()));
            }
            let ones = vec![Scalar::one(); n];
            let negs = vec![Scalar::from_int(-1); n];
            cons.push(Constraint::new(ones, Scalar::one()));
            cons.push(Constraint::new(negs, Scalar::from_int(-1)));
            for t in 0..n {
                let mut row = vec![Scalar::zero(); n];
                row[t] = Scalar::from_int(-1);
                cons.push(Constraint::new(row, Scalar::zero()));
            }
            Ok(matches!(
                solve_lp(&cons, &vec![Scalar::zero(); n], false),
                LpOutcome::Optimal { .. }
            ))
        }
    }
}

/// Max-margin strict separator containing `X` and excluding `Y`, or
/// `None` exactly when the hulls intersect.
///
/// Deterministic canonical output: margin is the LP optimum, and among
/// optimal representatives the lexicographically smallest `(normal, bias)`
/// is returned.
pub fn separate(domain: &Domain, x: &PointSet, y: &PointSet) -> Result<Option<Separator>> {
    check_inputs(domain, x, y)?;
    let d = domain.dim();
    let nv = d + 2; // a_1..a_d, b, delta

    let mut cons: Vec<Constraint> = Vec::new();
    for i in x.iter() {
        // <a, x> - b + delta <= 0
        let mut row: Vec<Scalar> = domain.point(i).coords.clone();
        row.push(Scalar::from_int(-1));
        row.push(Scalar::one());
        cons.push(Constraint::new(row, Scalar::zero()));
    }
    for j in y.iter() {
        // -<a, y> + b + delta <= 0
        let mut row: Vec<Scalar> = domain
            .point(j)
            .coords
            .iter()
            .map(|v| -v.clone())
            .collect();
        row.push(Scalar::one());
        row.push(Scalar::one());
        cons.push(Constraint::new(row, Scalar::zero()));
    }
    // Box |a_k| <= 1, |b| <= 1 keeps the program bounded.
    for k in 0..=d {
        let mut up = vec![Scalar::zero(); nv];
        up[k] = Scalar::one();
        cons.push(Constraint::new(up, Scalar::one()));
        let mut down = vec![Scalar::zero(); nv];
        down[k] = Scalar::from_int(-1);
        cons.push(Constraint::new(down, Scalar::one()));
    }

    let mut obj = vec![Scalar::zero(); nv];
    obj[d + 1] = Scalar::one();
    let margin = match solve_lp(&cons, &obj, true) {
        LpOutcome::Optimal { value, .. } => value,
        other => unreachable!("margin program is feasible and bounded: {other:?}"),
    };
    if !margin.is_positive() {
        return Ok(None);
    }

    // Canonicalize: pin delta to the optimum, take the lex-min (a, b).
    let mut pin_up = vec![Scalar::zero(); nv];
    pin_up[d + 1] = Scalar::one();
    cons.push(Constraint::new(pin_up, margin.clone()));
    let mut pin_down = vec![Scalar::zero(); nv];
    pin_down[d + 1] = Scalar::from_int(-1);
    cons.push(Constraint::new(pin_down, -margin.clone()));
    let point = lex_min_point(&cons, nv)?.expect("optimal face is nonempty");
    let normal = point[..d].to_vec();
    let bias = point[d].clone();
    debug_assert!(x.iter().all(|i| {
        dot(&normal, &domain.point(i).coords) <= &bias - &margin
    }));
    debug_assert!(y.iter().all(|j| {
        dot(&normal, &domain.point(j).coords) >= &bias + &margin
    }));
    Ok(Some(Separator {
        halfspace: Halfspace::strict(normal, bias)?,
        margin,
    }))
}
