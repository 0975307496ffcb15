//! Halfspace containers: epsilon-nets over the composed difference
//! family, the auxiliary dual polytope of trace-equivalent halfspace
//! representations, the bit-exact container code, and the container
//! family a protocol round agrees on without communication.
//!
//! The decode direction is a pure function of `(code, U, V)`; both
//! protocol parties evaluate it independently and bit-identically.

use crate::bitset::BitSet;
use crate::caratheodory::{BvtContext, BvtSequence};
use crate::geom::{
    enumerate_halfspace_traces, restrict_enumeration, trace, Domain, Halfspace, PointSet,
    Polytope, TraceEnumeration,
};
use crate::scalar::{dot, Scalar};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::rc::Rc;

/// How the net is constructed. Every mode is deterministic given its
/// parameters, so two parties configured identically agree on the net
/// with zero communication.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NetMode {
    /// Certified greedy hitting set (small domains only). The greedy
    /// universe is the family of pairwise trace differences at mass
    /// `eps |U| / (d + 2)`; hitting those hits every set of the composed
    /// difference family of mass `eps |U|`.
    Exact { cap: usize },
    /// Seeded pseudo-random subset of size
    /// `ceil(c0 d^2 log(d) log(1/eps) / eps)` (log factors floored at 1).
    /// Not certified by itself; the family builder verifies the
    /// containers it produces and escalates the size if needed.
    Sampled { c0: u32, seed: u64 },
    /// The whole domain. Always a valid net; containers are then exact.
    Full,
}

impl Default for NetMode {
    fn default() -> Self {
        NetMode::Sampled { c0: 1, seed: 0 }
    }
}

/// An epsilon-net over a domain for the composed halfspace family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsNet {
    /// Net members as domain indices, in domain order.
    pub indices: PointSet,
    pub epsilon: Scalar,
    /// Whether the construction itself certifies the net property
    /// (exact and full modes) or relies on downstream verification.
    pub certified: bool,
}

/// The auxiliary dual polytope: all boxed `(alpha, beta)` representations
/// of halfspaces inducing the given trace on the net, with a uniform
/// margin on every net point.
#[derive(Clone, Debug)]
pub struct DualPolytope {
    /// Lives in `R^{d+1}`. Inequality ids: one per net point in net
    /// order, then the `2(d+1)` box rows.
    pub polytope: Polytope,
    /// The generating trace, as indices into the net (not the domain).
    pub net_trace: PointSet,
    /// The margin used in the net-point rows.
    pub margin: Scalar,
}

/// Builds the dual polytope for a net trace.
///
/// Point rows come first (one per net point, in net order), then the box
/// `|alpha_k| <= 1`, `|beta| <= 1` as `2(d+1)` rows, so ids are stable
/// and both parties derive identical polytopes.
pub fn build_dual_polytope(
    net_domain: Option<&Domain>,
    dim: usize,
    net_trace: &PointSet,
    margin: &Scalar,
) -> Result<DualPolytope> {
    if !margin.is_positive() {
        return Err(Error::InvalidInput("margin must be positive".into()));
    }
    let mut rows: Vec<(Vec<Scalar>, Scalar)> = Vec::new();
    if let Some(nd) = net_domain {
        net_trace.validate(nd)?;
        for j in 0..nd.len() {
            let v = nd.point(j);
            if net_trace.contains(j) {
                // <alpha, v> - beta <= -margin
                let mut w: Vec<Scalar> = v.coords.clone();
                w.push(Scalar::from_int(-1));
                rows.push((w, -margin.clone()));
            } else {
                // <alpha, v> - beta >= margin
                let mut w: Vec<Scalar> = v.coords.iter().map(|c| -c.clone()).collect();
                w.push(Scalar::one());
                rows.push((w, -margin.clone()));
            }
        }
    }
    for k in 0..=dim {
        let mut up = vec![Scalar::zero(); dim + 1];
        up[k] = Scalar::one();
        rows.push((up, Scalar::one()));
        let mut down = vec![Scalar::zero(); dim + 1];
        down[k] = Scalar::from_int(-1);
        rows.push((down, Scalar::one()));
    }
    Ok(DualPolytope {
        polytope: Polytope::new(dim + 1, rows)?,
        net_trace: net_trace.clone(),
        margin: margin.clone(),
    })
}

/// Number of bits to index values `0..x`.
fn ceil_log2_big(x: &BigInt) -> usize {
    if *x <= BigInt::one() {
        0
    } else {
        (x - BigInt::one()).bits() as usize
    }
}

fn ceil_log2(x: usize) -> usize {
    ceil_log2_big(&BigInt::from(x))
}

/// Smallest `k >= 0` with `2^k >= 1/eps`.
fn ceil_log2_recip(eps: &Scalar) -> usize {
    let mut k = 0usize;
    let mut pow = Scalar::one();
    let one = Scalar::one();
    while &pow * eps < one {
        pow = pow * Scalar::from_int(2);
        k += 1;
    }
    k
}

/// The compressed description of a container: the net-trace id followed
/// by the constraint-id sequence of the dual polytope walk. Bit-exact
/// layout: trace id big-endian in `trace_bits` bits, then `d+1` ids of
/// `id_bits` bits each.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContainerCode {
    pub trace_id: usize,
    pub sequence: BvtSequence,
    pub trace_bits: usize,
    pub id_bits: usize,
}

impl ContainerCode {
    pub fn bit_length(&self) -> usize {
        self.trace_bits + self.sequence.constraint_ids.len() * self.id_bits
    }

    /// Big-endian bit layout.
    pub fn to_bits(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.bit_length());
        push_bits(&mut out, self.trace_id, self.trace_bits);
        for &id in &self.sequence.constraint_ids {
            push_bits(&mut out, id, self.id_bits);
        }
        out
    }

    /// Parses a code with the given widths; expects exactly
    /// `trace_bits + seq_len * id_bits` bits.
    pub fn from_bits(
        bits: &[bool],
        trace_bits: usize,
        id_bits: usize,
        seq_len: usize,
    ) -> Result<Self> {
        if bits.len() != trace_bits + seq_len * id_bits {
            return Err(Error::MalformedCode(format!(
                "expected {} bits, got {}",
                trace_bits + seq_len * id_bits,
                bits.len()
            )));
        }
        let trace_id = read_bits(&bits[..trace_bits]);
        let mut ids = Vec::with_capacity(seq_len);
        for s in 0..seq_len {
            let off = trace_bits + s * id_bits;
            ids.push(read_bits(&bits[off..off + id_bits]));
        }
        Ok(ContainerCode {
            trace_id,
            sequence: BvtSequence {
                constraint_ids: ids,
            },
            trace_bits,
            id_bits,
        })
    }
}

fn push_bits(out: &mut Vec<bool>, value: usize, width: usize) {
    debug_assert!(width == 64 || value < (1usize << width.max(1)) || width == 0 && value == 0);
    for k in (0..width).rev() {
        out.push(value >> k & 1 == 1);
    }
}

fn read_bits(bits: &[bool]) -> usize {
    bits.iter().fold(0usize, |acc, &b| acc << 1 | b as usize)
}

/// Exact check of the container relation: `f` inside `c` with at most
/// `eps * n` extra points.
pub fn verify_container(c: &PointSet, f: &PointSet, eps: &Scalar, domain_size: usize) -> bool {
    f.is_subset_of(c)
        && Scalar::from_int(c.difference(f).len() as i64)
            <= eps * &Scalar::from_int(domain_size as i64)
}

/// Shared precomputation for encoding and decoding containers over a
/// fixed `(U, net)` pair: the full trace enumerations of both, the
/// domain margin, and the per-net-trace dual polytopes.
pub struct ContainerContext {
    domain: Domain,
    net: EpsNet,
    net_domain: Option<Domain>,
    /// Domain index -> net position.
    net_pos: HashMap<usize, usize>,
    u_traces: Rc<TraceEnumeration>,
    net_traces: Option<Rc<TraceEnumeration>>,
    pub trace_bits: usize,
    pub id_bits: usize,
    groups: HashMap<usize, BvtContext>,
}

impl ContainerContext {
    pub fn new(domain: &Domain, net: EpsNet) -> Result<Self> {
        net.indices.validate(domain)?;
        let u_traces = Rc::new(enumerate_halfspace_traces(domain)?);
        Self::with_traces(domain, net, u_traces)
    }

    /// Builds a context reusing an existing trace enumeration of `U`.
    /// The net's own trace enumeration is derived from it by
    /// restriction.
    pub fn with_traces(
        domain: &Domain,
        net: EpsNet,
        u_traces: Rc<TraceEnumeration>,
    ) -> Result<Self> {
        let d = domain.dim();
        let net_domain = if net.indices.is_empty() {
            None
        } else {
            Some(domain.restrict(&net.indices)?)
        };
        let net_traces = if net.indices.is_empty() {
            None
        } else if net.indices.len() == domain.len() {
            Some(u_traces.clone())
        } else {
            Some(Rc::new(restrict_enumeration(
                &u_traces,
                domain,
                &net.indices,
            )?))
        };
        let nv = net.indices.len();
        let trace_bits = if nv == 0 {
            0
        } else {
            ceil_log2_big(&(BigInt::from(2) * BigInt::from(nv).pow(d as u32)))
        };
        let id_bits = ceil_log2(nv + 2 * (d + 1));
        let net_pos: HashMap<usize, usize> = net
            .indices
            .iter()
            .enumerate()
            .map(|(pos, idx)| (idx, pos))
            .collect();
        Ok(ContainerContext {
            domain: domain.clone(),
            net,
            net_domain,
            net_pos,
            u_traces,
            net_traces,
            trace_bits,
            id_bits,
            groups: HashMap::new(),
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn net(&self) -> &EpsNet {
        &self.net
    }

    pub fn u_traces(&self) -> &TraceEnumeration {
        &self.u_traces
    }

    /// The uniform code length in bits:
    /// `ceil(log2(2 |V|^d)) + (d+1) ceil(log2(|V| + 2(d+1)))`.
    pub fn code_bit_length(&self) -> usize {
        self.trace_bits + (self.domain.dim() + 1) * self.id_bits
    }

    /// The trace of the set on the net, re-indexed to net positions.
    fn net_trace_of(&self, members: &PointSet) -> PointSet {
        members
            .iter()
            .filter_map(|i| self.net_pos.get(&i).copied())
            .collect()
    }

    /// Net-trace id of a domain trace.
    fn net_trace_id_of(&self, members: &PointSet) -> Result<usize> {
        match &self.net_traces {
            None => Ok(0),
            Some(nt) => {
                let vt = self.net_trace_of(members);
                nt.id_of(&vt).ok_or_else(|| {
                    Error::InvalidInput(
                        "restriction of a halfspace trace must be a net trace".into(),
                    )
                })
            }
        }
    }

    fn group(&mut self, net_trace_id: usize) -> Result<&mut BvtContext> {
        if !self.groups.contains_key(&net_trace_id) {
            let d = self.domain.dim();
            let vt = match &self.net_traces {
                None => PointSet::empty(),
                Some(nt) => {
                    if net_trace_id >= nt.len() {
                        return Err(Error::MalformedCode(format!(
                            "net trace id {net_trace_id} out of range"
                        )));
                    }
                    nt.entry(net_trace_id).members.clone()
                }
            };
            let margin = self.u_traces.eps_hat().clone();
            let dual = build_dual_polytope(self.net_domain.as_ref(), d, &vt, &margin)?;
            // The polytope is full-dimensional by construction: the
            // canonical representative of any domain trace in this group
            // has margin at least twice `eps_hat`, so a shrunk copy of it
            // is interior.
            let ctx = BvtContext::with_known_shape(&dual.polytope, Some(d + 1))?;
            self.groups.insert(net_trace_id, ctx);
        }
        Ok(self.groups.get_mut(&net_trace_id).unwrap())
    }

    /// Encodes the domain trace with the given id into a container code.
    pub fn encode_trace(&mut self, u_trace_id: usize) -> Result<ContainerCode> {
        let entry = self.u_traces.entry(u_trace_id);
        let members = entry.members.clone();
        let rep = entry.rep().to_vec();
        let net_trace_id = self.net_trace_id_of(&members)?;
        let (trace_bits, id_bits) = (self.trace_bits, self.id_bits);
        let group = self.group(net_trace_id)?;
        debug_assert!(group.polytope().contains(&rep));
        let sequence = group.encode(&rep)?;
        Ok(ContainerCode {
            trace_id: net_trace_id,
            sequence,
            trace_bits,
            id_bits,
        })
    }

    /// Encodes an arbitrary halfspace via its trace on the domain.
    pub fn encode_halfspace(&mut self, h: &Halfspace) -> Result<ContainerCode> {
        let f = trace(h, &self.domain)?;
        let id = self
            .u_traces
            .id_of(&f)
            .expect("every halfspace trace is enumerated");
        self.encode_trace(id)
    }

    /// Decodes a code into its container: the domain points outside the
    /// intersection of the closed halfspaces named by the decoded dual
    /// vertices.
    pub fn decode(&mut self, code: &ContainerCode) -> Result<PointSet> {
        let d = self.domain.dim();
        if code.sequence.constraint_ids.len() != d + 1 {
            return Err(Error::MalformedCode(format!(
                "expected a sequence of length {}, got {}",
                d + 1,
                code.sequence.constraint_ids.len()
            )));
        }
        let group = self.group(code.trace_id)?;
        let verts = group.decode(&code.sequence).map_err(|e| match e {
            Error::InvalidSequence => Error::MalformedCode("empty face in decode".into()),
            other => other,
        })?;
        let mut members = Vec::new();
        'points: for i in 0..self.domain.len() {
            let u = self.domain.point(i);
            for v in &verts {
                let (alpha, beta) = (&v[..d], &v[d]);
                if dot(alpha, &u.coords) < *beta {
                    members.push(i);
                    continue 'points;
                }
            }
        }
        Ok(PointSet::new(members))
    }
}

/// Builds an epsilon-net in the requested mode.
pub fn build_eps_net(domain: &Domain, eps: &Scalar, mode: &NetMode) -> Result<EpsNet> {
    if !eps.is_positive() || *eps > Scalar::one() {
        return Err(Error::EpsilonOutOfRange);
    }
    let n = domain.len();
    let d = domain.dim();
    match mode {
        NetMode::Full => Ok(EpsNet {
            indices: domain.full_set(),
            epsilon: eps.clone(),
            certified: true,
        }),
        NetMode::Exact { cap } => {
            if n > *cap {
                return Err(Error::CapExceeded(format!(
                    "exact net construction capped at {cap} points, domain has {n}"
                )));
            }
            let traces = enumerate_halfspace_traces(domain)?;
            // Pairwise differences G \ F of mass >= eps n / (d+2). Any
            // composed set U \ (inter H_i) \ F of mass >= eps n splits
            // into d+2 such differences, one of which carries mass
            // >= eps n / (d+2), so hitting these hits the composed family.
            let threshold_num = eps * &Scalar::from_int(n as i64);
            let dplus2 = Scalar::from_int(d as i64 + 2);
            let mut targets: Vec<BitSet> = Vec::new();
            let mut seen: std::collections::HashSet<Vec<u64>> = std::collections::HashSet::new();
            for g in traces.entries() {
                for f in traces.entries() {
                    let diff = g.bits.subtract(&f.bits);
                    let mass = Scalar::from_int(diff.count() as i64);
                    if &mass * &dplus2 >= threshold_num && seen.insert(diff.words().to_vec()) {
                        targets.push(diff);
                    }
                }
            }
            let mut chosen: Vec<usize> = Vec::new();
            let mut alive: Vec<BitSet> = targets;
            while !alive.is_empty() {
                let mut best = 0usize;
                let mut best_cover = 0usize;
                for i in 0..n {
                    let cover = alive.iter().filter(|t| t.contains(i)).count();
                    if cover > best_cover {
                        best_cover = cover;
                        best = i;
                    }
                }
                debug_assert!(best_cover > 0);
                chosen.push(best);
                alive.retain(|t| !t.contains(best));
            }
            Ok(EpsNet {
                indices: PointSet::new(chosen),
                epsilon: eps.clone(),
                certified: true,
            })
        }
        NetMode::Sampled { c0, seed } => {
            let size = sampled_net_size(*c0, d, eps).min(n);
            let mut order: Vec<usize> = (0..n).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            order.shuffle(&mut rng);
            order.truncate(size);
            Ok(EpsNet {
                indices: PointSet::new(order),
                epsilon: eps.clone(),
                certified: false,
            })
        }
    }
}

/// `ceil(c0 d^2 max(1, log2 d) max(1, log2(1/eps)) / eps)`.
pub fn sampled_net_size(c0: u32, d: usize, eps: &Scalar) -> usize {
    let log_d = ceil_log2(d).max(1);
    let log_eps = ceil_log2_recip(eps).max(1);
    let num = Scalar::from_int(c0 as i64)
        * Scalar::from_int((d * d) as i64)
        * Scalar::from_int(log_d as i64)
        * Scalar::from_int(log_eps as i64);
    let ratio = &num / eps;
    let mut k = ratio.floor();
    if Scalar::new(k.clone(), BigInt::one()) < ratio {
        k += 1;
    }
    use num_traits::ToPrimitive;
    k.to_usize().unwrap_or(usize::MAX)
}

/// One member of a container family: the container with its code and
/// the id of the domain trace that generated it. In full-net mode the
/// code is materialized lazily (the container itself is already
/// determined by the trace).
pub struct FamilyEntry {
    pub source_trace: usize,
    pub container: PointSet,
    code: once_cell::unsync::OnceCell<ContainerCode>,
    pub(crate) container_bits: BitSet,
}

impl FamilyEntry {
    pub fn code(&self) -> Option<&ContainerCode> {
        self.code.get()
    }
}

/// The family of containers for every halfspace trace of a domain, in
/// canonical order, with the net it was built over.
pub struct ContainerFamily {
    ctx: ContainerContext,
    entries: Vec<FamilyEntry>,
    pub escalations: u32,
}

impl ContainerFamily {
    /// Builds (and in sampled mode verifies, escalating the net size on
    /// failure) the container family for `(domain, eps)`.
    pub fn build(domain: &Domain, eps: &Scalar, mode: &NetMode) -> Result<Self> {
        let u_traces = Rc::new(enumerate_halfspace_traces(domain)?);
        Self::build_with_traces(domain, eps, mode, u_traces)
    }

    /// Like [`ContainerFamily::build`] with a precomputed (or restricted)
    /// trace enumeration of the domain.
    pub fn build_with_traces(
        domain: &Domain,
        eps: &Scalar,
        mode: &NetMode,
        u_traces: Rc<TraceEnumeration>,
    ) -> Result<Self> {
        if !eps.is_positive() || *eps > Scalar::one() {
            return Err(Error::EpsilonOutOfRange);
        }
        let mut attempt = 0u32;
        loop {
            let net = match (mode, attempt) {
                (NetMode::Sampled { c0, seed }, k) => {
                    let base = sampled_net_size(*c0, domain.dim(), eps);
                    let scaled = base.saturating_mul(1usize << k.min(30));
                    if scaled >= domain.len() {
                        build_eps_net(domain, eps, &NetMode::Full)?
                    } else {
                        let mut net = build_eps_net(
                            domain,
                            eps,
                            &NetMode::Sampled {
                                c0: c0.saturating_mul(1 << k.min(30)),
                                seed: *seed,
                            },
                        )?;
                        net.indices = {
                            // Deterministic escalation: same permutation,
                            // longer prefix.
                            let mut order: Vec<usize> = (0..domain.len()).collect();
                            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                            order.shuffle(&mut rng);
                            order.truncate(scaled.min(domain.len()));
                            PointSet::new(order)
                        };
                        net
                    }
                }
                (m, _) => build_eps_net(domain, eps, m)?,
            };
            let full_mode = net.indices.len() == domain.len();
            match Self::try_build(domain, eps, net, full_mode, u_traces.clone()) {
                Ok(mut fam) => {
                    fam.escalations = attempt;
                    return Ok(fam);
                }
                Err(Error::InvalidInput(msg)) if matches!(mode, NetMode::Sampled { .. }) => {
                    // Sampled net fell short; widen deterministically.
                    let _ = msg;
                    attempt += 1;
                    continue;
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn try_build(
        domain: &Domain,
        eps: &Scalar,
        net: EpsNet,
        full_mode: bool,
        u_traces: Rc<TraceEnumeration>,
    ) -> Result<Self> {
        let n = domain.len();
        let mut ctx = ContainerContext::with_traces(domain, net, u_traces)?;
        let num_traces = ctx.u_traces.len();
        let mut entries: Vec<FamilyEntry> = Vec::with_capacity(num_traces);
        if full_mode {
            // With V = U every decoded container equals its net trace,
            // so containers coincide with traces and codes can wait
            // until transmission.
            for t in 0..num_traces {
                let members = ctx.u_traces.entry(t).members.clone();
                let bits = ctx.u_traces.entry(t).bits.clone();
                entries.push(FamilyEntry {
                    source_trace: t,
                    container: members,
                    code: once_cell::unsync::OnceCell::new(),
                    container_bits: bits,
                });
            }
            // Entries are already in canonical (net-trace-id) order.
        } else {
            for t in 0..num_traces {
                let code = ctx.encode_trace(t)?;
                let container = ctx.decode(&code)?;
                let f = &ctx.u_traces.entry(t).members;
                if !verify_container(&container, f, eps, n) {
                    return Err(Error::InvalidInput(format!(
                        "net failed to certify container for trace {t}"
                    )));
                }
                let bits = BitSet::from_point_set(n, &container);
                let cell = once_cell::unsync::OnceCell::new();
                cell.set(code).ok();
                entries.push(FamilyEntry {
                    source_trace: t,
                    container,
                    code: cell,
                    container_bits: bits,
                });
            }
            entries.sort_by(|a, b| {
                let ca = a.code.get().expect("materialized");
                let cb = b.code.get().expect("materialized");
                (ca.trace_id, &ca.sequence.constraint_ids)
                    .cmp(&(cb.trace_id, &cb.sequence.constraint_ids))
            });
            // Identical codes decode identically; keep the first.
            entries.dedup_by(|a, b| a.code.get() == b.code.get());
        }
        Ok(ContainerFamily {
            ctx,
            entries,
            escalations: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FamilyEntry] {
        &self.entries
    }

    pub fn net(&self) -> &EpsNet {
        &self.ctx.net
    }

    pub fn epsilon(&self) -> &Scalar {
        &self.ctx.net.epsilon
    }

    pub fn context(&self) -> &ContainerContext {
        &self.ctx
    }

    pub fn code_bit_length(&self) -> usize {
        self.ctx.code_bit_length()
    }

    /// The code of an entry, materializing it on first use. The decoded
    /// container of the materialized code is checked against the stored
    /// one.
    pub fn code_for(&mut self, entry_idx: usize) -> Result<ContainerCode> {
        if let Some(c) = self.entries[entry_idx].code.get() {
            return Ok(c.clone());
        }
        let t = self.entries[entry_idx].source_trace;
        let code = self.ctx.encode_trace(t)?;
        let decoded = self.ctx.decode(&code)?;
        if decoded != self.entries[entry_idx].container {
            return Err(Error::InvalidInput(
                "lazily materialized code decodes to a different container".into(),
            ));
        }
        self.entries[entry_idx].code.set(code.clone()).ok();
        Ok(code)
    }

    /// Decodes an incoming code against this family's `(U, V)` pair.
    pub fn decode(&mut self, code: &ContainerCode) -> Result<PointSet> {
        self.ctx.decode(code)
    }

    /// First entry (in canonical order) whose container includes
    /// `party_bits` and has size at most `3/4` of the domain.
    pub(crate) fn first_qualifying(&self, party_bits: &BitSet) -> Option<usize> {
        let n = self.ctx.domain.len();
        self.entries.iter().position(|e| {
            4 * e.container_bits.count() <= 3 * n && party_bits.is_subset_of(&e.container_bits)
        })
    }
}

/// One-shot encode of a halfspace against `(U, net)`.
pub fn encode_container(
    h: &Halfspace,
    domain: &Domain,
    net: &EpsNet,
) -> Result<ContainerCode> {
    let mut ctx = ContainerContext::new(domain, net.clone())?;
    ctx.encode_halfspace(h)
}

/// One-shot decode of a container code against `(U, net)`.
pub fn decode_container(
    code: &ContainerCode,
    domain: &Domain,
    net: &EpsNet,
) -> Result<PointSet> {
    let mut ctx = ContainerContext::new(domain, net.clone())?;
    ctx.decode(code)
}

/// Convenience wrapper matching the family-building operation: build the
/// net in the given mode, then the verified family.
pub fn build_container_family(
    domain: &Domain,
    eps: &Scalar,
    mode: &NetMode,
) -> Result<ContainerFamily> {
    ContainerFamily::build(domain, eps, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    fn half(eps_num: i64, eps_den: i64) -> Scalar {
        Scalar::ratio(eps_num, eps_den)
    }

    #[test]
    fn code_bit_round_trip() {
        let code = ContainerCode {
            trace_id: 5,
            sequence: BvtSequence {
                constraint_ids: vec![3, 0, 7],
            },
            trace_bits: 4,
            id_bits: 3,
        };
        let bits = code.to_bits();
        assert_eq!(bits.len(), 13);
        let back = ContainerCode::from_bits(&bits, 4, 3, 3).unwrap();
        assert_eq!(back, code);
        assert!(ContainerCode::from_bits(&bits[1..], 4, 3, 3).is_err());
    }

    #[test]
    fn eps_out_of_range_rejected() {
        let d = Domain::line(&[0, 1]).unwrap();
        assert_eq!(
            build_eps_net(&d, &Scalar::zero(), &NetMode::Full).unwrap_err(),
            Error::EpsilonOutOfRange
        );
        assert_eq!(
            build_eps_net(&d, &Scalar::from_int(2), &NetMode::Full).unwrap_err(),
            Error::EpsilonOutOfRange
        );
    }

    #[test]
    fn exact_net_eps_one_is_tiny() {
        // At eps = 1 only the whole domain has qualifying mass, so a
        // one-point net would do; the certified construction hits every
        // pairwise difference of mass >= n/(d+2) and may keep a point or
        // two more.
        let d = Domain::line(&[0, 1, 2, 3]).unwrap();
        let net = build_eps_net(&d, &Scalar::one(), &NetMode::Exact { cap: 16 }).unwrap();
        assert!(net.indices.len() <= 2, "net {:?}", net.indices);
        assert!(net.certified);
    }

    #[test]
    fn exact_net_cap_guard() {
        let d = Domain::line(&[0, 1, 2, 3]).unwrap();
        assert!(matches!(
            build_eps_net(&d, &half(1, 4), &NetMode::Exact { cap: 2 }),
            Err(Error::CapExceeded(_))
        ));
    }

    // Independent oracle: the net must hit every composed-family set
    // C' \ H of mass >= eps n, where C' = U minus an intersection of
    // d+2 halfspace traces. Exhaustive over trace tuples on a tiny
    // 1D domain.
    #[test]
    fn exact_net_certified_against_composed_family_oracle() {
        let d = Domain::line(&[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        let eps = half(1, 4);
        let net = build_eps_net(&d, &eps, &NetMode::Exact { cap: 16 }).unwrap();
        let net_bits = BitSet::from_point_set(8, &net.indices);
        let traces = enumerate_halfspace_traces(&d).unwrap();
        let all: Vec<BitSet> = traces.entries().iter().map(|e| e.bits.clone()).collect();
        let full = BitSet::full(8);
        let threshold = &eps * &Scalar::from_int(8);
        // d + 2 = 3 halfspaces in the intersection.
        let mut checked = 0u64;
        for a in &all {
            for b in &all {
                for c in &all {
                    let inter = a.intersect(b).intersect(c);
                    let cprime = full.subtract(&inter);
                    for f in &all {
                        let set = cprime.subtract(f);
                        if Scalar::from_int(set.count() as i64) >= threshold {
                            assert!(
                                set.iter().any(|i| net_bits.contains(i)),
                                "net misses composed set"
                            );
                            checked += 1;
                        }
                    }
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn sampled_net_deterministic_and_sized() {
        let d = Domain::parabola(12).unwrap();
        let eps = half(1, 4);
        let a = build_eps_net(&d, &eps, &NetMode::Sampled { c0: 1, seed: 7 }).unwrap();
        let b = build_eps_net(&d, &eps, &NetMode::Sampled { c0: 1, seed: 7 }).unwrap();
        assert_eq!(a, b);
        assert!(!a.certified);
        assert!(a.indices.len() <= 12);
        let c = build_eps_net(&d, &eps, &NetMode::Sampled { c0: 1, seed: 8 }).unwrap();
        assert!(a.indices.len() == c.indices.len());
    }

    #[test]
    fn dual_polytope_line_example() {
        // U = {0,1}, H = {x < 1/2}: the domain margin works out to 1/4
        // (smallest canonical margin 1/2, halved), and P is the expected
        // wedge inside the box.
        let d = Domain::line(&[0, 1]).unwrap();
        let traces = enumerate_halfspace_traces(&d).unwrap();
        assert_eq!(traces.eps_hat(), &Scalar::ratio(1, 4));
        let net = build_eps_net(&d, &Scalar::one(), &NetMode::Full).unwrap();
        let nd = d.restrict(&net.indices).unwrap();
        let vminus = PointSet::new(vec![0]);
        let dual =
            build_dual_polytope(Some(&nd), 1, &vminus, &Scalar::ratio(1, 4)).unwrap();
        assert_eq!(dual.polytope.dim(), 2);
        assert_eq!(dual.polytope.num_inequalities(), 2 + 4);
        // (alpha, beta) = (1, 1/2) is the max-margin rep of {x < 1/2}
        // scaled into the box; it must lie in P.
        assert!(dual
            .polytope
            .contains(&[Scalar::one(), Scalar::ratio(1, 2)]));
        // Everything in P classifies 0 negative and 1 positive.
        use crate::caratheodory::enumerate_vertices;
        for v in enumerate_vertices(&dual.polytope).unwrap() {
            assert!(&v[0] * &Scalar::from_int(0) < v[1]);
            assert!(&v[0] * &Scalar::from_int(1) >= v[1]);
        }
    }

    #[test]
    fn dual_polytope_empty_net_is_box() {
        let dual = build_dual_polytope(None, 2, &PointSet::empty(), &half(1, 4)).unwrap();
        assert_eq!(dual.polytope.num_inequalities(), 6);
        assert!(dual.polytope.contains(&[
            Scalar::ratio(1, 2),
            Scalar::ratio(-1, 3),
            Scalar::zero()
        ]));
    }

    #[test]
    fn dual_polytope_vertices_realize_generating_trace() {
        // Random-ish halfspace over a 10-point planar net: every vertex
        // of P realizes the same net trace.
        let d = Domain::parabola(10).unwrap();
        let traces = enumerate_halfspace_traces(&d).unwrap();
        let h = Halfspace::strict(
            vec![Scalar::from_int(3), Scalar::from_int(-1)],
            Scalar::from_int(7),
        )
        .unwrap();
        let f = trace(&h, &d).unwrap();
        let net = build_eps_net(&d, &Scalar::one(), &NetMode::Full).unwrap();
        let nd = d.restrict(&net.indices).unwrap();
        let dual = build_dual_polytope(Some(&nd), 2, &f, traces.eps_hat()).unwrap();
        use crate::caratheodory::enumerate_vertices;
        let verts = enumerate_vertices(&dual.polytope).unwrap();
        assert!(!verts.is_empty());
        for v in verts {
            let got: PointSet = (0..nd.len())
                .filter(|&j| {
                    dot(&v[..2], &nd.point(j).coords) < v[2]
                })
                .collect();
            assert_eq!(got, f);
        }
    }

    #[test]
    fn encode_decode_round_trip_is_container() {
        // Exhaustive round trip over all traces of an 8-point parabola
        // domain with an exact quarter net.
        let d = Domain::parabola(8).unwrap();
        let eps = half(1, 4);
        let net = build_eps_net(&d, &eps, &NetMode::Exact { cap: 16 }).unwrap();
        let mut ctx = ContainerContext::new(&d, net).unwrap();
        let n_traces = ctx.u_traces().len();
        for t in 0..n_traces {
            let f = ctx.u_traces().entry(t).members.clone();
            let code = ctx.encode_trace(t).unwrap();
            assert_eq!(code.sequence.constraint_ids.len(), 3);
            let c = ctx.decode(&code).unwrap();
            assert!(
                verify_container(&c, &f, &eps, 8),
                "trace {f:?} decoded to non-container {c:?}"
            );
        }
    }

    #[test]
    fn decode_is_pure_function_of_code() {
        let d = Domain::parabola(6).unwrap();
        let eps = half(1, 2);
        let net = build_eps_net(&d, &eps, &NetMode::Exact { cap: 16 }).unwrap();
        let mut ctx1 = ContainerContext::new(&d, net.clone()).unwrap();
        let mut ctx2 = ContainerContext::new(&d, net).unwrap();
        let code = ctx1.encode_trace(3).unwrap();
        let bits = code.to_bits();
        let parsed =
            ContainerCode::from_bits(&bits, code.trace_bits, code.id_bits, 3).unwrap();
        assert_eq!(ctx1.decode(&code).unwrap(), ctx2.decode(&parsed).unwrap());
    }

    #[test]
    fn full_trace_container_is_whole_domain() {
        let d = Domain::line(&[0, 1, 2, 3]).unwrap();
        let eps = half(1, 2);
        let net = build_eps_net(&d, &eps, &NetMode::Exact { cap: 16 }).unwrap();
        let mut ctx = ContainerContext::new(&d, net).unwrap();
        let full_id = ctx.u_traces().id_of(&d.full_set()).unwrap();
        let code = ctx.encode_trace(full_id).unwrap();
        let c = ctx.decode(&code).unwrap();
        assert_eq!(c, d.full_set());
    }

    #[test]
    fn empty_trace_container_is_small() {
        let d = Domain::line(&[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        let eps = half(1, 4);
        let net = build_eps_net(&d, &eps, &NetMode::Exact { cap: 16 }).unwrap();
        let mut ctx = ContainerContext::new(&d, net).unwrap();
        let empty_id = ctx.u_traces().id_of(&PointSet::empty()).unwrap();
        let code = ctx.encode_trace(empty_id).unwrap();
        let c = ctx.decode(&code).unwrap();
        assert!(verify_container(&c, &PointSet::empty(), &eps, 8));
    }

    #[test]
    fn family_covers_every_trace_small() {
        let d = Domain::parabola(8).unwrap();
        let eps = half(1, 4);
        let mut fam =
            ContainerFamily::build(&d, &eps, &NetMode::Exact { cap: 16 }).unwrap();
        let traces = enumerate_halfspace_traces(&d).unwrap();
        for e in traces.entries() {
            let ok = fam
                .entries()
                .iter()
                .any(|fe| verify_container(&fe.container, &e.members, &eps, 8));
            assert!(ok, "no container for {:?}", e.members);
        }
        // Codes fit the documented uniform length.
        let expected = fam.code_bit_length();
        for i in 0..fam.len() {
            let code = fam.code_for(i).unwrap();
            assert_eq!(code.bit_length(), expected);
        }
    }

    #[test]
    fn family_eps_one_contains_full_domain_container() {
        let d = Domain::line(&[0, 1, 2]).unwrap();
        let fam = ContainerFamily::build(&d, &Scalar::one(), &NetMode::Full).unwrap();
        assert!(fam
            .entries()
            .iter()
            .any(|e| e.container == d.full_set()));
    }

    #[test]
    fn full_mode_family_equals_traces_with_lazy_codes() {
        let d = Domain::parabola(6).unwrap();
        let eps = half(1, 4);
        let mut fam = ContainerFamily::build(&d, &eps, &NetMode::Full).unwrap();
        let traces = enumerate_halfspace_traces(&d).unwrap();
        assert_eq!(fam.len(), traces.len());
        for (i, e) in traces.entries().iter().enumerate() {
            assert_eq!(fam.entries()[i].container, e.members);
            assert!(fam.entries()[i].code().is_none());
        }
        // Materialize one and check decode consistency.
        let code = fam.code_for(5).unwrap();
        let c = fam.decode(&code).unwrap();
        assert_eq!(c, fam.entries()[5].container);
        assert!(fam.entries()[5].code().is_some());
    }

    #[test]
    fn sampled_family_escalates_until_valid() {
        // A tiny c0 forces undersized nets; the builder must widen until
        // every trace's container verifies.
        let d = Domain::parabola(10).unwrap();
        let eps = half(1, 4);
        let mut fam =
            ContainerFamily::build(&d, &eps, &NetMode::Sampled { c0: 1, seed: 3 }).unwrap();
        let traces = enumerate_halfspace_traces(&d).unwrap();
        for e in traces.entries() {
            let ok = fam
                .entries()
                .iter()
                .any(|fe| verify_container(&fe.container, &e.members, &eps, 10));
            assert!(ok);
        }
        let _ = fam.code_for(0).unwrap();
    }

    #[test]
    fn verify_container_edge_cases() {
        let f = PointSet::new(vec![0, 1]);
        assert!(verify_container(&f, &f, &Scalar::zero(), 4));
        let u = PointSet::new(vec![0, 1, 2, 3]);
        assert!(verify_container(&u, &PointSet::empty(), &Scalar::one(), 4));
        assert!(!verify_container(
            &u,
            &PointSet::empty(),
            &Scalar::zero(),
            4
        ));
        // Non-superset fails regardless of eps.
        assert!(!verify_container(
            &PointSet::new(vec![0]),
            &f,
            &Scalar::one(),
            4
        ));
    }

    #[test]
    fn code_length_bound_example() {
        // d = 2, |V| = 20: ceil(log2 800) + 3 * ceil(log2 26) = 10 + 15.
        let trace_bits = ceil_log2_big(&BigInt::from(2 * 20usize.pow(2)));
        let id_bits = ceil_log2(20 + 2 * 3);
        assert_eq!(trace_bits, 10);
        assert_eq!(id_bits, 5);
        assert_eq!(trace_bits + 3 * id_bits, 25);
    }

    #[test]
    fn grid_eps_hat_is_positive_and_small() {
        let d = Domain::grid(3).unwrap();
        let traces = enumerate_halfspace_traces(&d).unwrap();
        assert!(traces.eps_hat().is_positive());
        assert!(traces.eps_hat() < &Scalar::one());
        let _ = Point::from_ints(&[0, 0]);
    }
}
