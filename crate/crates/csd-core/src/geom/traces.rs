//! Enumeration of halfspace traces on a finite domain.
//!
//! A trace is a set of the form `{u in U : <a, u> < b}`. The enumeration
//! is complete: every trace realized by any halfspace appears exactly
//! once, together with a canonical realizing halfspace whose bias sits in
//! the middle of the value gap, so the realization has a strictly
//! positive two-sided margin.
//!
//! Dimension 1 uses a threshold sweep, dimension 2 a rotational sweep
//! over critical normal directions, and higher dimensions an exact LP
//! realizability test per subset (desk scale only).

use super::lp::{solve_lp, Constraint, LpOutcome};
use super::{Domain, Halfspace, PointSet};
use crate::bitset::BitSet;
use crate::scalar::{dot, Scalar};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::collections::HashMap;

/// Default guard on the predicted enumeration size `2 n^d`.
pub const DEFAULT_TRACE_CAP: u64 = 40_000_000;

/// Hard cap on `n` for the subset-LP method used when `d >= 3`.
const SUBSET_LP_MAX_POINTS: usize = 16;

/// One realized trace with its canonical certificate.
#[derive(Clone, Debug)]
pub struct TraceEntry {
    pub members: PointSet,
    /// Canonical realizing halfspace `{x : <a, x> < b}` with the bias at
    /// the middle of the value gap.
    pub halfspace: Halfspace,
    /// Two-sided value margin of the boxed representative over the
    /// domain; strictly positive.
    pub margin: Scalar,
    pub(crate) bits: BitSet,
    rep_cache: once_cell::unsync::OnceCell<Vec<Scalar>>,
}

impl TraceEntry {
    /// `(a, b) / max(||a||_inf, |b|)`: the canonical halfspace scaled
    /// into the unit box of `R^{d+1}`. Computed on first use.
    pub fn rep(&self) -> &[Scalar] {
        self.rep_cache.get_or_init(|| {
            let mut scale = self.halfspace.bias().abs();
            for c in self.halfspace.normal() {
                scale = scale.max(c.abs());
            }
            let mut rep: Vec<Scalar> = self
                .halfspace
                .normal()
                .iter()
                .map(|c| c / &scale)
                .collect();
            rep.push(self.halfspace.bias() / &scale);
            rep
        })
    }
}

/// The complete list of halfspace traces on a domain, in a canonical
/// order (by size, then lexicographically by member indices).
#[derive(Clone)]
pub struct TraceEnumeration {
    entries: Vec<TraceEntry>,
    by_bits: HashMap<Vec<u64>, usize>,
    eps_hat: Scalar,
    dim: usize,
    n: usize,
}

impl TraceEnumeration {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[TraceEntry] {
        &self.entries
    }

    pub fn entry(&self, id: usize) -> &TraceEntry {
        &self.entries[id]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }

    /// Canonical id of a trace, if realized.
    pub fn id_of(&self, set: &PointSet) -> Option<usize> {
        let bits = BitSet::from_point_set(self.n, set);
        self.by_bits.get(bits.words()).copied()
    }

    pub(crate) fn id_of_bits(&self, bits: &BitSet) -> Option<usize> {
        self.by_bits.get(bits.words()).copied()
    }

    /// Half the smallest canonical-representative margin across all
    /// traces. Every trace has a representative in the unit box whose
    /// two-sided margin is at least `2 * eps_hat`.
    pub fn eps_hat(&self) -> &Scalar {
        &self.eps_hat
    }
}

/// The trace of a halfspace on a domain, by exact pointwise evaluation.
pub fn trace(h: &Halfspace, domain: &Domain) -> Result<PointSet> {
    if h.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: h.dim(),
        });
    }
    Ok(PointSet::new(
        (0..domain.len())
            .filter(|&i| h.contains(domain.point(i)))
            .collect(),
    ))
}

/// Complete trace enumeration with the default resource cap.
pub fn enumerate_halfspace_traces(domain: &Domain) -> Result<TraceEnumeration> {
    enumerate_halfspace_traces_capped(domain, DEFAULT_TRACE_CAP)
}

/// Complete trace enumeration; errors if the predicted size `2 n^d`
/// exceeds `cap`.
pub fn enumerate_halfspace_traces_capped(
    domain: &Domain,
    cap: u64,
) -> Result<TraceEnumeration> {
    let n = domain.len();
    let d = domain.dim();
    let predicted = BigInt::from(2) * BigInt::from(n).pow(d as u32);
    if predicted > BigInt::from(cap) {
        return Err(Error::CapExceeded(format!(
            "predicted trace count 2*{n}^{d} exceeds cap {cap}"
        )));
    }
    let mut builder = Builder::new(domain);
    match d {
        1 => builder.sweep_1d(),
        2 => builder.sweep_2d(),
        _ => {
            if n > SUBSET_LP_MAX_POINTS {
                return Err(Error::CapExceeded(format!(
                    "subset enumeration for d={d} limited to {SUBSET_LP_MAX_POINTS} points, got {n}"
                )));
            }
            builder.subset_lp()?;
        }
    }
    builder.finish()
}

/// Trace enumeration of a sub-domain derived from a full enumeration of
/// its superset: every halfspace trace on the subset is the restriction
/// of one on the superset, so restricting and deduplicating is complete.
/// Far cheaper than re-sweeping when many subsets of one root domain are
/// processed.
pub fn restrict_enumeration(
    root: &TraceEnumeration,
    root_domain: &Domain,
    sub: &PointSet,
) -> Result<TraceEnumeration> {
    if sub.is_empty() {
        return Err(Error::EmptySet);
    }
    sub.validate(root_domain)?;
    if sub.len() == root_domain.len() {
        return Ok(root.clone());
    }
    let sub_idx: Vec<usize> = sub.iter().collect();
    let n_sub = sub_idx.len();
    let scaled = root_domain.scaled();
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut entries: Vec<TraceEntry> = Vec::new();
    // Word-level gather: mask of sub positions per root word, and the
    // sub position of every root index.
    let root_words = root_domain.len().div_ceil(64);
    let mut sub_mask = vec![0u64; root_words];
    let mut pos_of = vec![usize::MAX; root_domain.len()];
    for (pos, &orig) in sub_idx.iter().enumerate() {
        sub_mask[orig / 64] |= 1 << (orig % 64);
        pos_of[orig] = pos;
    }
    let mut words_buf = vec![0u64; n_sub.div_ceil(64)];
    for e in root.entries() {
        for w in words_buf.iter_mut() {
            *w = 0;
        }
        for (wi, (&rw, &mask)) in e.bits.words().iter().zip(&sub_mask).enumerate() {
            let mut live = rw & mask;
            while live != 0 {
                let b = live.trailing_zeros() as usize;
                let pos = pos_of[wi * 64 + b];
                words_buf[pos / 64] |= 1 << (pos % 64);
                live &= live - 1;
            }
        }
        if seen.contains_key(words_buf.as_slice()) {
            continue;
        }
        let mut bits = BitSet::new(n_sub);
        for (pos_word, w) in words_buf.iter().enumerate() {
            let mut live = *w;
            while live != 0 {
                let b = live.trailing_zeros() as usize;
                bits.insert(pos_word * 64 + b);
                live &= live - 1;
            }
        }
        // Canonical sub-entry: scale the root normal to integers, find
        // the value gap over the subset, recenter the bias. Sweep-built
        // normals are already integral.
        let normal = e.halfspace.normal();
        let a_int: Vec<BigInt> = if normal.iter().all(|c| c.denom() == &BigInt::from(1)) {
            normal.iter().map(|c| c.numer().clone()).collect()
        } else {
            let mut norm_den = BigInt::from(1);
            for c in normal {
                norm_den = norm_den.lcm(c.denom());
            }
            normal
                .iter()
                .map(|c| c.numer() * (&norm_den / c.denom()))
                .collect()
        };
        // Value of subset position p along a_int: ival / den. Stay in
        // machine words with checked arithmetic when everything fits;
        // only the final bias and margin become rationals.
        let fast: Option<(Scalar, Scalar)> =
            scaled.small.as_ref().and_then(|(snums, sdens)| {
                use num_traits::ToPrimitive;
                let sa: Option<Vec<i128>> = a_int.iter().map(|v| v.to_i128()).collect();
                let sa = sa?;
                let mut lo: Option<(i128, i128)> = None;
                let mut hi: Option<(i128, i128)> = None;
                for (pos, &orig) in sub_idx.iter().enumerate() {
                    let mut ival: i128 = 0;
                    for (aj, nj) in sa.iter().zip(&snums[orig]) {
                        ival = ival.checked_add(aj.checked_mul(*nj)?)?;
                    }
                    let den = sdens[orig];
                    let inside = bits.contains(pos);
                    let target = if inside { &mut lo } else { &mut hi };
                    let better = match target.as_ref() {
                        None => true,
                        Some((bn, bd)) => {
                            let lhs = ival.checked_mul(*bd)?;
                            let rhs = bn.checked_mul(den)?;
                            if inside {
                                lhs > rhs
                            } else {
                                lhs < rhs
                            }
                        }
                    };
                    if better {
                        *target = Some((ival, den));
                    }
                }
                // bias = midpoint, gap = half-width, both over the common
                // denominator 2 * l_d * h_d.
                let (bias_n, bias_d, gap_n, gap_d) = match (lo, hi) {
                    (Some((ln, ld)), Some((hn, hd))) => {
                        let den = ld.checked_mul(hd)?.checked_mul(2)?;
                        let a = ln.checked_mul(hd)?;
                        let b = hn.checked_mul(ld)?;
                        (a.checked_add(b)?, den, b.checked_sub(a)?, den)
                    }
                    (Some((ln, ld)), None) => (ln.checked_add(ld)?, ld, 1, 1),
                    (None, Some((hn, hd))) => (hn.checked_sub(hd)?, hd, 1, 1),
                    (None, None) => unreachable!("subset is nonempty"),
                };
                // scale = max(||a||_inf, |bias|); margin = gap / scale.
                let a_max = sa.iter().map(|v| v.checked_abs()).try_fold(0i128, |m, v| {
                    v.map(|v| m.max(v))
                })?;
                let bias_abs_n = bias_n.checked_abs()?;
                let bias_d_abs = bias_d.checked_abs()?;
                let scale_is_bias =
                    bias_abs_n > a_max.checked_mul(bias_d_abs)?;
                let (mn, md) = if scale_is_bias {
                    (gap_n.checked_mul(bias_d_abs)?, gap_d.checked_mul(bias_abs_n)?)
                } else {
                    (gap_n, gap_d.checked_mul(a_max)?)
                };
                Some((
                    Scalar::new(BigInt::from(bias_n), BigInt::from(bias_d)),
                    Scalar::new(BigInt::from(mn), BigInt::from(md)),
                ))
            });
        let (bias, margin) = match fast {
            Some(pair) => pair,
            None => {
                let mut lo: Option<(BigInt, BigInt)> = None;
                let mut hi: Option<(BigInt, BigInt)> = None;
                for (pos, &orig) in sub_idx.iter().enumerate() {
                    let mut ival = BigInt::from(0);
                    for (aj, nj) in a_int.iter().zip(&scaled.numerators[orig]) {
                        ival += aj * nj;
                    }
                    let den = scaled.denoms[orig].clone();
                    let inside = bits.contains(pos);
                    let target = if inside { &mut lo } else { &mut hi };
                    let better = match target.as_ref() {
                        None => true,
                        Some((bn, bd)) => {
                            let cmp = (&ival * bd).cmp(&(bn * &den));
                            if inside {
                                cmp == std::cmp::Ordering::Greater
                            } else {
                                cmp == std::cmp::Ordering::Less
                            }
                        }
                    };
                    if better {
                        *target = Some((ival, den));
                    }
                }
                let val = |(n, d): &(BigInt, BigInt)| Scalar::new(n.clone(), d.clone());
                let (bias, gap) = match (&lo, &hi) {
                    (Some(l), Some(h)) => {
                        let l = val(l);
                        let h = val(h);
                        debug_assert!(l < h);
                        let two = Scalar::from_int(2);
                        ((&l + &h) / two.clone(), (&h - &l) / two)
                    }
                    (Some(l), None) => (val(l) + Scalar::one(), Scalar::one()),
                    (None, Some(h)) => (val(h) - Scalar::one(), Scalar::one()),
                    (None, None) => unreachable!("subset is nonempty"),
                };
                let mut scale = bias.abs();
                for c in &a_int {
                    scale = scale.max(Scalar::from_bigint(c.clone()).abs());
                }
                (bias, &gap / &scale)
            }
        };
        let normal: Vec<Scalar> = a_int.into_iter().map(Scalar::from_bigint).collect();
        seen.insert(bits.words().to_vec(), entries.len());
        entries.push(TraceEntry {
            members: bits.to_point_set(),
            halfspace: Halfspace::strict(normal, bias).expect("nonzero normal"),
            margin,
            bits,
            rep_cache: once_cell::unsync::OnceCell::new(),
        });
    }
    entries.sort_by(|a, b| {
        (a.members.len(), a.bits.words()).cmp(&(b.members.len(), b.bits.words()))
    });
    let by_bits: HashMap<Vec<u64>, usize> = entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.bits.words().to_vec(), i))
        .collect();
    let eps_hat = entries
        .iter()
        .map(|e| e.margin.clone())
        .reduce(Scalar::min)
        .expect("nonempty")
        / Scalar::from_int(2);
    Ok(TraceEnumeration {
        entries,
        by_bits,
        eps_hat,
        dim: root.dim,
        n: n_sub,
    })
}

/// Subset-LP enumeration regardless of dimension; used to cross-check
/// the sweep methods in tests.
pub(crate) fn enumerate_by_subset_lp(domain: &Domain) -> Result<TraceEnumeration> {
    if domain.len() > SUBSET_LP_MAX_POINTS {
        return Err(Error::CapExceeded("subset enumeration limit".into()));
    }
    let mut builder = Builder::new(domain);
    builder.subset_lp()?;
    builder.finish()
}

struct Builder<'a> {
    domain: &'a Domain,
    seen: HashMap<Vec<u64>, usize>,
    entries: Vec<TraceEntry>,
}

impl<'a> Builder<'a> {
    fn new(domain: &'a Domain) -> Self {
        Builder {
            domain,
            seen: HashMap::new(),
            entries: Vec::new(),
        }
    }

    fn is_seen(&self, bits: &BitSet) -> bool {
        self.seen.contains_key(bits.words())
    }

    /// Records the trace cut out by integer normal `a`, with the exact
    /// rational values bordering the cut; `None` encodes minus/plus
    /// infinity. Values are `(numerator, denominator)` pairs.
    fn record_cut(
        &mut self,
        bits: BitSet,
        normal_int: &[BigInt],
        s_minus: Option<(BigInt, BigInt)>,
        s_plus: Option<(BigInt, BigInt)>,
    ) {
        if self.seen.contains_key(bits.words()) {
            return;
        }
        let normal: Vec<Scalar> = normal_int
            .iter()
            .map(|c| Scalar::from_bigint(c.clone()))
            .collect();
        let val = |(num, den): (BigInt, BigInt)| Scalar::new(num, den);
        let (bias, gap) = match (s_minus, s_plus) {
            (Some(lo), Some(hi)) => {
                let lo = val(lo);
                let hi = val(hi);
                debug_assert!(lo < hi);
                let two = Scalar::from_int(2);
                ((&lo + &hi) / two.clone(), (&hi - &lo) / two)
            }
            (Some(lo), None) => (val(lo) + Scalar::one(), Scalar::one()),
            (None, Some(hi)) => (val(hi) - Scalar::one(), Scalar::one()),
            (None, None) => unreachable!("domain is nonempty"),
        };
        self.push_entry(bits, normal, bias, gap);
    }

    fn push_entry(&mut self, bits: BitSet, normal: Vec<Scalar>, bias: Scalar, gap: Scalar) {
        debug_assert!(gap.is_positive());
        let mut scale = bias.abs();
        for c in &normal {
            scale = scale.max(c.abs());
        }
        debug_assert!(scale.is_positive());
        let margin = &gap / &scale;
        let members = bits.to_point_set();
        // The canonical-realization property (trace(halfspace) == members)
        // is covered by dedicated tests; re-evaluating it here would cost
        // O(n) rational work per entry.
        let halfspace = Halfspace::strict(normal, bias).expect("nonzero normal");
        self.seen.insert(bits.words().to_vec(), self.entries.len());
        self.entries.push(TraceEntry {
            members,
            halfspace,
            margin,
            bits,
            rep_cache: once_cell::unsync::OnceCell::new(),
        });
    }

    fn sweep_1d(&mut self) {
        let n = self.domain.len();
        let scaled = self.domain.scaled();
        for dir in [1i64, -1i64] {
            let a = BigInt::from(dir);
            let vals: Vec<(BigInt, BigInt)> = (0..n)
                .map(|i| (&a * &scaled.numerators[i][0], scaled.denoms[i].clone()))
                .collect();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| (&vals[i].0 * &vals[j].1).cmp(&(&vals[j].0 * &vals[i].1)));
            let mut bits = BitSet::new(n);
            let at = |k: usize| (vals[order[k]].0.clone(), vals[order[k]].1.clone());
            self.record_cut(bits.clone(), &[a.clone()], None, Some(at(0)));
            for k in 0..n {
                bits.insert(order[k]);
                let s_plus = if k + 1 < n { Some(at(k + 1)) } else { None };
                self.record_cut(bits.clone(), &[a.clone()], Some(at(k)), s_plus);
            }
        }
    }

    fn sweep_2d(&mut self) {
        let n = self.domain.len();
        let scaled = self.domain.scaled();
        let nums = &scaled.numerators;
        let dens = &scaled.denoms;

        // Critical normal directions: perpendiculars to point differences
        // (denominators cleared per pair).
        let mut dirs: Vec<(BigInt, BigInt)> = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = &nums[i][0] * &dens[j] - &nums[j][0] * &dens[i];
                let dy = &nums[i][1] * &dens[j] - &nums[j][1] * &dens[i];
                let perp = primitive((-dy.clone(), dx.clone()));
                dirs.push(perp.clone());
                dirs.push((-perp.0, -perp.1));
            }
        }
        if dirs.is_empty() {
            dirs.push((BigInt::from(1), BigInt::from(0)));
            dirs.push((BigInt::from(-1), BigInt::from(0)));
        }
        dirs.sort_by(angle_cmp);
        dirs.dedup();

        // One interior direction per angular arc between consecutive
        // critical directions.
        let mut candidates = dirs.clone();
        let m = dirs.len();
        for k in 0..m {
            let d1 = &dirs[k];
            let d2 = &dirs[(k + 1) % m];
            let cross = &d1.0 * &d2.1 - &d1.1 * &d2.0;
            if cross.is_positive() {
                candidates.push(primitive((&d1.0 + &d2.0, &d1.1 + &d2.1)));
            } else {
                // Opposite or identical directions: a quarter turn lands
                // strictly inside the half-circle arc.
                candidates.push(primitive((-d1.1.clone(), d1.0.clone())));
            }
        }
        candidates.sort();
        candidates.dedup();

        let small = self.domain.scaled().small.as_ref();
        for (ax, ay) in candidates {
            let a = [ax, ay];
            // Machine-word path: values and comparator products must all
            // fit in i128 (checked); otherwise exact big integers.
            let fast: Option<Vec<i128>> = small.and_then(|(snums, sdens)| {
                use num_traits::ToPrimitive;
                let sax = a[0].to_i128()?;
                let say = a[1].to_i128()?;
                let mut out = Vec::with_capacity(n);
                let mut max_abs: i128 = 0;
                for i in 0..n {
                    let v = sax
                        .checked_mul(snums[i][0])?
                        .checked_add(say.checked_mul(snums[i][1])?)?;
                    max_abs = max_abs.max(v.checked_abs()?);
                    out.push(v);
                }
                let max_den = sdens.iter().copied().max().unwrap_or(1);
                max_abs.checked_mul(max_den)?;
                Some(out)
            });
            match fast {
                Some(ivals) => {
                    let sdens = &small.unwrap().1;
                    let cmp = |i: usize, j: usize| {
                        (ivals[i] * sdens[j]).cmp(&(ivals[j] * sdens[i]))
                    };
                    let mut order: Vec<usize> = (0..n).collect();
                    order.sort_unstable_by(|&i, &j| cmp(i, j));
                    let mut bits = BitSet::new(n);
                    let at = |k: usize| {
                        (
                            BigInt::from(ivals[order[k]]),
                            BigInt::from(sdens[order[k]]),
                        )
                    };
                    if !self.is_seen(&bits) {
                        self.record_cut(bits.clone(), &a, None, Some(at(0)));
                    }
                    let mut k = 0;
                    while k < n {
                        let mut end = k + 1;
                        while end < n
                            && cmp(order[k], order[end]) == std::cmp::Ordering::Equal
                        {
                            end += 1;
                        }
                        for pos in k..end {
                            bits.insert(order[pos]);
                        }
                        if !self.is_seen(&bits) {
                            let s_plus = if end < n { Some(at(end)) } else { None };
                            self.record_cut(bits.clone(), &a, Some(at(k)), s_plus);
                        }
                        k = end;
                    }
                }
                None => {
                    let ivals: Vec<BigInt> = (0..n)
                        .map(|i| &a[0] * &nums[i][0] + &a[1] * &nums[i][1])
                        .collect();
                    let cmp = |i: usize, j: usize| {
                        (&ivals[i] * &dens[j]).cmp(&(&ivals[j] * &dens[i]))
                    };
                    let mut order: Vec<usize> = (0..n).collect();
                    order.sort_by(|&i, &j| cmp(i, j));
                    let mut bits = BitSet::new(n);
                    let at =
                        |k: usize| (ivals[order[k]].clone(), dens[order[k]].clone());
                    if !self.is_seen(&bits) {
                        self.record_cut(bits.clone(), &a, None, Some(at(0)));
                    }
                    let mut k = 0;
                    while k < n {
                        let mut end = k + 1;
                        while end < n
                            && cmp(order[k], order[end]) == std::cmp::Ordering::Equal
                        {
                            end += 1;
                        }
                        for pos in k..end {
                            bits.insert(order[pos]);
                        }
                        if !self.is_seen(&bits) {
                            let s_plus = if end < n { Some(at(end)) } else { None };
                            self.record_cut(bits.clone(), &a, Some(at(k)), s_plus);
                        }
                        k = end;
                    }
                }
            }
        }
    }

    fn subset_lp(&mut self) -> Result<()> {
        let n = self.domain.len();
        let d = self.domain.dim();
        for mask in 0u64..(1u64 << n) {
            let mut bits = BitSet::new(n);
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    bits.insert(i);
                }
            }
            if self.seen.contains_key(bits.words()) {
                continue;
            }
            let inside = bits.count();
            if inside == 0 || inside == n {
                // Realized by an axis halfspace beyond the extreme value.
                let axis: Vec<Scalar> = (0..d)
                    .map(|k| if k == 0 { Scalar::one() } else { Scalar::zero() })
                    .collect();
                let vals: Vec<Scalar> = (0..n)
                    .map(|i| dot(&axis, &self.domain.point(i).coords))
                    .collect();
                let (bias, gap) = if inside == 0 {
                    let mn = vals.iter().cloned().reduce(Scalar::min).unwrap();
                    (mn - Scalar::one(), Scalar::one())
                } else {
                    let mx = vals.iter().cloned().reduce(Scalar::max).unwrap();
                    (mx + Scalar::one(), Scalar::one())
                };
                self.push_entry(bits, axis, bias, gap);
                continue;
            }
            // Feasibility of a margin-1 separation: <a,u> <= b-1 inside,
            // <a,u> >= b+1 outside. Scale invariance makes this equivalent
            // to strict realizability.
            let mut cons = Vec::with_capacity(n);
            for i in 0..n {
                let mut row: Vec<Scalar> = if bits.contains(i) {
                    self.domain.point(i).coords.clone()
                } else {
                    self.domain
                        .point(i)
                        .coords
                        .iter()
                        .map(|v| -v.clone())
                        .collect()
                };
                row.push(if bits.contains(i) {
                    Scalar::from_int(-1)
                } else {
                    Scalar::one()
                });
                cons.push(Constraint::new(row, Scalar::from_int(-1)));
            }
            let obj = vec![Scalar::zero(); d + 1];
            if let LpOutcome::Optimal { point, .. } = solve_lp(&cons, &obj, false) {
                let normal = point[..d].to_vec();
                // Re-center the bias in the value gap of this normal.
                let mut s_minus: Option<Scalar> = None;
                let mut s_plus: Option<Scalar> = None;
                for i in 0..n {
                    let v = dot(&normal, &self.domain.point(i).coords);
                    if bits.contains(i) {
                        s_minus = Some(match s_minus {
                            None => v,
                            Some(m) => m.max(v),
                        });
                    } else {
                        s_plus = Some(match s_plus {
                            None => v,
                            Some(m) => m.min(v),
                        });
                    }
                }
                let (lo, hi) = (s_minus.unwrap(), s_plus.unwrap());
                debug_assert!(lo < hi);
                let two = Scalar::from_int(2);
                let bias = (&lo + &hi) / two.clone();
                let gap = (&hi - &lo) / two;
                self.push_entry(bits, normal, bias, gap);
            }
        }
        Ok(())
    }

    fn finish(mut self) -> Result<TraceEnumeration> {
        let n = self.domain.len();
        let d = self.domain.dim();
        self.entries.sort_by(|a, b| {
            (a.members.len(), a.bits.words()).cmp(&(b.members.len(), b.bits.words()))
        });
        let by_bits: HashMap<Vec<u64>, usize> = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.bits.words().to_vec(), i))
            .collect();
        // Sanity: the classical bound |HS(U)| <= 2 n^d.
        let bound = BigInt::from(2) * BigInt::from(n).pow(d as u32);
        if BigInt::from(self.entries.len()) > bound {
            return Err(Error::InvalidInput(format!(
                "trace enumeration produced {} sets, above the 2n^d bound",
                self.entries.len()
            )));
        }
        let eps_hat = self
            .entries
            .iter()
            .map(|e| e.margin.clone())
            .reduce(Scalar::min)
            .expect("at least the empty and full traces exist")
            / Scalar::from_int(2);
        Ok(TraceEnumeration {
            entries: self.entries,
            by_bits,
            eps_hat,
            dim: d,
            n,
        })
    }
}

fn primitive((x, y): (BigInt, BigInt)) -> (BigInt, BigInt) {
    if x.is_zero() && y.is_zero() {
        return (x, y);
    }
    let g = x.gcd(&y);
    (x / &g, y / &g)
}

/// Angular order starting at the positive x-axis, counterclockwise.
fn angle_cmp(a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> std::cmp::Ordering {
    fn half(v: &(BigInt, BigInt)) -> u8 {
        // 0: upper half including +x axis; 1: lower half including -x axis.
        if v.1.is_positive() || (v.1.is_zero() && v.0.is_positive()) {
            0
        } else {
            1
        }
    }
    let (ha, hb) = (half(a), half(b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    // Same half-plane: a before b iff cross(a, b) > 0.
    let cross = &a.0 * &b.1 - &a.1 * &b.0;
    if cross.is_positive() {
        std::cmp::Ordering::Less
    } else if cross.is_negative() {
        std::cmp::Ordering::Greater
    } else {
        std::cmp::Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    #[test]
    fn three_collinear_points() {
        let d = Domain::line(&[0, 1, 2]).unwrap();
        let tr = enumerate_halfspace_traces(&d).unwrap();
        let sets: Vec<PointSet> = tr.entries().iter().map(|e| e.members.clone()).collect();
        let expect: Vec<PointSet> = vec![
            PointSet::empty(),
            PointSet::new(vec![0]),
            PointSet::new(vec![2]),
            PointSet::new(vec![0, 1]),
            PointSet::new(vec![1, 2]),
            PointSet::new(vec![0, 1, 2]),
        ];
        assert_eq!(sets, expect);
        assert_eq!(tr.len(), 6);
        assert!(tr.len() <= 2 * 3usize.pow(1));
    }

    #[test]
    fn single_point_domain() {
        let d = Domain::line(&[5]).unwrap();
        let tr = enumerate_halfspace_traces(&d).unwrap();
        assert_eq!(tr.len(), 2);
        assert_eq!(tr.entries()[0].members, PointSet::empty());
        assert_eq!(tr.entries()[1].members, PointSet::new(vec![0]));
    }

    #[test]
    fn four_points_in_convex_position_realize_all_singletons_and_complements() {
        let d = Domain::parabola(4).unwrap();
        let tr = enumerate_halfspace_traces(&d).unwrap();
        for i in 0..4 {
            let single = PointSet::new(vec![i]);
            assert!(tr.id_of(&single).is_some(), "missing singleton {i}");
            assert!(
                tr.id_of(&single.complement(4)).is_some(),
                "missing complement of {i}"
            );
        }
        assert!(tr.len() <= 2 * 4usize.pow(2));
    }

    #[test]
    fn canonical_reps_realize_their_traces_with_margin() {
        let d = Domain::grid(3).unwrap();
        let tr = enumerate_halfspace_traces(&d).unwrap();
        for e in tr.entries() {
            assert!(e.margin.is_positive());
            assert_eq!(trace(&e.halfspace, &d).unwrap(), e.members);
            // The boxed rep realizes the same trace with margin `e.margin`.
            let dd = d.dim();
            let rep = e.rep();
            let a = &rep[..dd];
            let b = &rep[dd];
            assert!(rep.iter().all(|c| c.abs() <= Scalar::one()));
            for i in 0..d.len() {
                let v = dot(a, &d.point(i).coords);
                if e.members.contains(i) {
                    assert!(v <= b - &e.margin);
                } else {
                    assert!(v >= b + &e.margin);
                }
            }
        }
        assert!(tr.eps_hat().is_positive());
    }

    #[test]
    fn sweep_matches_subset_lp_oracle() {
        // Degenerate configurations included: grid with collinear triples,
        // duplicates of direction vectors.
        for dom in [
            Domain::grid(3).unwrap(),
            Domain::parabola(6).unwrap(),
            Domain::new(
                2,
                vec![
                    Point::from_ints(&[0, 0]),
                    Point::from_ints(&[1, 0]),
                    Point::from_ints(&[2, 0]),
                    Point::from_ints(&[3, 0]),
                ],
            )
            .unwrap(),
            Domain::new(
                2,
                vec![
                    Point::from_ints(&[0, 0]),
                    Point::from_ints(&[1, 1]),
                    Point::from_ints(&[2, 2]),
                    Point::from_ints(&[0, 2]),
                    Point::from_ints(&[2, 0]),
                ],
            )
            .unwrap(),
        ] {
            let sweep = enumerate_halfspace_traces(&dom).unwrap();
            let oracle = enumerate_by_subset_lp(&dom).unwrap();
            let a: Vec<&PointSet> = sweep.entries().iter().map(|e| &e.members).collect();
            let b: Vec<&PointSet> = oracle.entries().iter().map(|e| &e.members).collect();
            assert_eq!(a, b, "sweep disagrees with LP oracle on {dom:?}");
        }
    }

    #[test]
    fn one_dimensional_matches_subset_lp_oracle() {
        let dom = Domain::line(&[-3, 0, 1, 4, 9]).unwrap();
        let sweep = enumerate_halfspace_traces(&dom).unwrap();
        let oracle = enumerate_by_subset_lp(&dom).unwrap();
        let a: Vec<&PointSet> = sweep.entries().iter().map(|e| &e.members).collect();
        let b: Vec<&PointSet> = oracle.entries().iter().map(|e| &e.members).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn trace_by_pointwise_evaluation_on_grid() {
        let d = Domain::grid(4).unwrap();
        let h = Halfspace::strict(
            vec![Scalar::from_int(2), Scalar::from_int(-3)],
            Scalar::ratio(1, 2),
        )
        .unwrap();
        let t = trace(&h, &d).unwrap();
        for i in 0..d.len() {
            let v = dot(h.normal(), &d.point(i).coords);
            assert_eq!(t.contains(i), v < *h.bias());
        }
    }

    // Strict-vs-closed flag semantics: the strict form {<a,x> < b} and
    // the negated closed form {<-a,x> >= -b} (same geometric side, closed
    // boundary) differ exactly on the points with <a,u> = b.
    #[test]
    fn boundary_points_flip_with_closedness() {
        let d = Domain::grid(3).unwrap();
        let a = vec![Scalar::one(), Scalar::zero()];
        let b = Scalar::one();
        let strict = Halfspace::strict(a.clone(), b.clone()).unwrap();
        let closed = Halfspace::new(
            a.iter().map(|v| -v.clone()).collect(),
            -b.clone(),
            true,
        )
        .unwrap();
        let t1 = trace(&strict, &d).unwrap();
        let t2 = trace(&closed, &d).unwrap();
        for i in 0..d.len() {
            let v = dot(&a, &d.point(i).coords);
            if v == b {
                assert!(!t1.contains(i) && t2.contains(i));
            } else {
                assert_eq!(t1.contains(i), t2.contains(i));
            }
        }
    }

    #[test]
    fn restriction_matches_fresh_enumeration() {
        for dom in [Domain::parabola(8).unwrap(), Domain::grid(3).unwrap()] {
            let root = enumerate_halfspace_traces(&dom).unwrap();
            for mask in [0b10110101u32, 0b00111100, 0b11000011, 0b00000110] {
                let sub: PointSet = (0..dom.len().min(8))
                    .filter(|i| mask >> i & 1 == 1)
                    .collect();
                if sub.is_empty() {
                    continue;
                }
                let restricted = restrict_enumeration(&root, &dom, &sub).unwrap();
                let fresh =
                    enumerate_halfspace_traces(&dom.restrict(&sub).unwrap()).unwrap();
                let a: Vec<&PointSet> =
                    restricted.entries().iter().map(|e| &e.members).collect();
                let b: Vec<&PointSet> = fresh.entries().iter().map(|e| &e.members).collect();
                assert_eq!(a, b, "mask {mask:08b} on {dom:?}");
                // Canonical halfspaces of restricted entries realize
                // their traces with positive margin.
                let sd = dom.restrict(&sub).unwrap();
                for e in restricted.entries() {
                    assert!(e.margin.is_positive());
                    assert_eq!(trace(&e.halfspace, &sd).unwrap(), e.members);
                }
                assert!(restricted.eps_hat().is_positive());
            }
        }
    }

    #[test]
    fn cap_guard_fires() {
        let d = Domain::line(&[0, 1, 2, 3]).unwrap();
        assert!(matches!(
            enumerate_halfspace_traces_capped(&d, 7),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn three_dimensional_subsets() {
        // Unit tetrahedron corners: every subset is realizable.
        let d = Domain::new(
            3,
            vec![
                Point::from_ints(&[0, 0, 0]),
                Point::from_ints(&[1, 0, 0]),
                Point::from_ints(&[0, 1, 0]),
                Point::from_ints(&[0, 0, 1]),
            ],
        )
        .unwrap();
        let tr = enumerate_halfspace_traces(&d).unwrap();
        assert_eq!(tr.len(), 16);
    }
}
