//! Two-party protocols with bit-exact communication accounting: the
//! promise variant of convex set disjointness, its reduction to the full
//! problem through an auxiliary witness domain, and the halfspace
//! learning protocol built on top.
//!
//! Both parties are simulated in-process. Everything either party
//! "computes without communication" (trace enumerations, container
//! families, auxiliary domains) is a deterministic function of the
//! shared domain and configuration, so the two simulated parties agree
//! by construction; a networked deployment would run the same functions
//! on each side.

use crate::bitset::BitSet;
use crate::containers::{ContainerFamily, NetMode};
use crate::geom::{
    enumerate_halfspace_traces, points_in_hull, restrict_enumeration, Domain, Point, PointSet,
    TraceEnumeration,
};
use crate::scalar::Scalar;
use crate::{Error, Result};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::rc::Rc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MessageTag {
    /// One control bit: "I found a qualifying container".
    FoundFlag,
    /// A container code payload.
    ContainerCode,
    /// A canonical halfspace-trace index (learning protocol).
    TraceIndicator,
}

/// One transmitted message with its exact payload bits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub sender: Party,
    pub bits: Vec<bool>,
    pub tag: MessageTag,
}

/// Ordered, party-tagged message log.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub messages: Vec<Message>,
}

impl Transcript {
    pub fn total_bits(&self) -> usize {
        self.messages.iter().map(|m| m.bits.len()).sum()
    }

    fn push(&mut self, sender: Party, bits: Vec<bool>, tag: MessageTag) {
        self.messages.push(Message { sender, bits, tag });
    }

    fn extend(&mut self, other: &Transcript) {
        self.messages.extend(other.messages.iter().cloned());
    }
}

/// Exact communication cost of an outcome.
pub fn transcript_bits(outcome: &ProtocolOutcome) -> usize {
    outcome.transcript.total_bits()
}

/// Per-round bookkeeping for structure checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundInfo {
    pub domain_size: usize,
    pub finder: Option<Party>,
    /// Control bits plus any container payload charged this round.
    pub bits: usize,
    /// |X_i ∩ Y_i| at the start of the round.
    pub xy_intersection: usize,
    /// Size of the container family both parties agreed on.
    pub family_size: usize,
}

/// Decision plus (for the disjoint case) the labeling certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    pub decision: u8,
    /// Total over the domain when `decision == 1`: X maps to -1, Y to +1.
    pub labeling: Option<Vec<i8>>,
    pub transcript: Transcript,
    pub rounds: Vec<RoundInfo>,
}

/// Shared protocol parameters. The net mode (with its seed) is part of
/// the configuration both parties hold, which is what lets them agree on
/// each round's container family with zero communication.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub epsilon: Scalar,
    pub net_mode: NetMode,
    /// Guard on the auxiliary-domain pair enumeration.
    pub aux_pair_cap: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            epsilon: Scalar::ratio(1, 4),
            net_mode: NetMode::Full,
            aux_pair_cap: 5_000_000,
        }
    }
}

impl ProtocolConfig {
    pub fn with_sampled_net(seed: u64) -> Self {
        ProtocolConfig {
            net_mode: NetMode::Sampled { c0: 1, seed },
            ..Default::default()
        }
    }
}

type FamilyKey = (u128, String);

/// Process-local cache of container families and auxiliary domains,
/// keyed by exact domain content and configuration. Shared across runs
/// through an `Rc`, so exhaustive sweeps over one domain pay for each
/// family once.
#[derive(Default)]
pub struct ProtocolCache {
    families: HashMap<FamilyKey, Rc<RefCell<ContainerFamily>>>,
    aux_domains: HashMap<u128, Rc<Domain>>,
    root_traces: HashMap<u128, Rc<TraceEnumeration>>,
    aux_mappings: HashMap<(u128, Vec<usize>), PointSet>,
}

impl ProtocolCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn traces_for(&mut self, domain: &Domain) -> Result<Rc<TraceEnumeration>> {
        let key = domain.cache_key();
        if let Some(t) = self.root_traces.get(&key) {
            return Ok(t.clone());
        }
        let t = Rc::new(enumerate_halfspace_traces(domain)?);
        self.root_traces.insert(key, t.clone());
        Ok(t)
    }

    /// The family over a sub-domain of `root`, with the sub-domain's
    /// trace enumeration derived from the root's by restriction.
    fn family_for_subset(
        &mut self,
        root: &Domain,
        sub: &PointSet,
        cur: &Domain,
        eps: &Scalar,
        mode: &NetMode,
    ) -> Result<Rc<RefCell<ContainerFamily>>> {
        let key = (cur.cache_key(), format!("{eps}|{mode:?}"));
        if let Some(f) = self.families.get(&key) {
            return Ok(f.clone());
        }
        let root_tr = self.traces_for(root)?;
        let u_traces = if sub.len() == root.len() {
            root_tr
        } else {
            Rc::new(restrict_enumeration(&root_tr, root, sub)?)
        };
        let fam = Rc::new(RefCell::new(ContainerFamily::build_with_traces(
            cur, eps, mode, u_traces,
        )?));
        self.families.insert(key, fam.clone());
        Ok(fam)
    }
}

/// A deterministic runner holding the configuration and cache.
pub struct ProtocolRunner {
    pub config: ProtocolConfig,
    cache: Rc<RefCell<ProtocolCache>>,
}

impl ProtocolRunner {
    pub fn new(config: ProtocolConfig) -> Self {
        ProtocolRunner {
            config,
            cache: Rc::new(RefCell::new(ProtocolCache::new())),
        }
    }

    pub fn with_cache(config: ProtocolConfig, cache: Rc<RefCell<ProtocolCache>>) -> Self {
        ProtocolRunner { config, cache }
    }

    pub fn run_promise_csd(
        &self,
        domain: &Domain,
        x: &PointSet,
        y: &PointSet,
    ) -> Result<ProtocolOutcome> {
        let mut engine = PromiseCsdEngine::new(domain, x, y, self)?;
        loop {
            if let EngineStep::Decided(_) = engine.step()? {
                return Ok(engine.into_outcome());
            }
        }
    }

    /// Auxiliary domain for the promise reduction, cached per domain.
    pub fn auxiliary_domain(&self, domain: &Domain) -> Result<Rc<Domain>> {
        let key = domain.cache_key();
        if let Some(d) = self.cache.borrow().aux_domains.get(&key) {
            return Ok(d.clone());
        }
        let aux = Rc::new(build_auxiliary_domain_capped(
            domain,
            self.config.aux_pair_cap,
        )?);
        self.cache
            .borrow_mut()
            .aux_domains
            .insert(key, aux.clone());
        Ok(aux)
    }

    /// Full convex set disjointness through the auxiliary-domain
    /// reduction: each party maps its input locally (zero communication)
    /// and the promise protocol runs on the mapped instance.
    pub fn run_csd(
        &self,
        domain: &Domain,
        x: &PointSet,
        y: &PointSet,
    ) -> Result<ProtocolOutcome> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::EmptySet);
        }
        let aux = self.auxiliary_domain(domain)?;
        let ax = self.mapped_input(domain, &aux, x)?;
        let by = self.mapped_input(domain, &aux, y)?;
        self.run_promise_csd(&aux, &ax, &by)
    }

    pub fn run_learning(
        &self,
        domain: &Domain,
        sample_a: &Sample,
        sample_b: &Sample,
    ) -> Result<LearningResult> {
        run_learning_impl(self, domain, sample_a, sample_b)
    }

    /// Memoized `conv(set) ∩ aux` mapping.
    fn mapped_input(&self, domain: &Domain, aux: &Domain, set: &PointSet) -> Result<PointSet> {
        let key = (domain.cache_key(), set.indices().to_vec());
        if let Some(m) = self.cache.borrow().aux_mappings.get(&key) {
            return Ok(m.clone());
        }
        let mapped = map_to_aux(domain, aux, set)?;
        self.cache
            .borrow_mut()
            .aux_mappings
            .insert(key, mapped.clone());
        Ok(mapped)
    }
}

/// `conv(set) ∩ aux` as indices into the auxiliary domain.
fn map_to_aux(domain: &Domain, aux: &Domain, set: &PointSet) -> Result<PointSet> {
    let inside = points_in_hull(domain, aux.points(), set)?;
    Ok(inside
        .into_iter()
        .enumerate()
        .filter(|(_, b)| *b)
        .map(|(v, _)| v)
        .collect())
}

/// What one engine step produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EngineStep {
    /// One message was appended to the transcript.
    Sent(Message),
    Decided(u8),
}

enum EngineState {
    NeedRound,
    Emitting {
        queue: VecDeque<Message>,
        /// Index into the family entries of the winning container, with
        /// the winning party; `None` means this is the final (both
        /// parties stuck) round.
        apply: Option<(Party, PointSet)>,
    },
    Done(u8),
}

/// The promise-protocol engine, advanced one message at a time.
///
/// Round structure: both parties deterministically build the same
/// epsilon = 1/4 container family over the current domain; each searches
/// for the first container (in canonical code order) that covers its set
/// and has at most 3/4 of the current points; Alice's find takes
/// priority. Two control bits per round, plus the winning container code.
pub struct PromiseCsdEngine<'r> {
    runner: &'r ProtocolRunner,
    orig: Domain,
    /// Original-domain indices still alive, in order.
    sub: Vec<usize>,
    x_bits: BitSet,
    y_bits: BitSet,
    labels: Vec<Option<i8>>,
    transcript: Transcript,
    rounds: Vec<RoundInfo>,
    state: EngineState,
}

impl<'r> PromiseCsdEngine<'r> {
    pub fn new(
        domain: &Domain,
        x: &PointSet,
        y: &PointSet,
        runner: &'r ProtocolRunner,
    ) -> Result<Self> {
        x.validate(domain)?;
        y.validate(domain)?;
        let n = domain.len();
        Ok(PromiseCsdEngine {
            runner,
            orig: domain.clone(),
            sub: (0..n).collect(),
            x_bits: BitSet::from_point_set(n, x),
            y_bits: BitSet::from_point_set(n, y),
            labels: vec![None; n],
            transcript: Transcript::default(),
            rounds: Vec::new(),
            state: EngineState::NeedRound,
        })
    }

    /// Advances by one message (or by the terminal decision).
    pub fn step(&mut self) -> Result<EngineStep> {
        loop {
            match &mut self.state {
                EngineState::Done(d) => return Ok(EngineStep::Decided(*d)),
                EngineState::Emitting { queue, apply } => {
                    if let Some(msg) = queue.pop_front() {
                        self.transcript.messages.push(msg.clone());
                        return Ok(EngineStep::Sent(msg));
                    }
                    let apply = apply.take();
                    if let Some((finder, container)) = apply {
                        self.apply_round(finder, &container);
                        self.state = EngineState::NeedRound;
                    } else {
                        self.state = EngineState::Done(0);
                    }
                }
                EngineState::NeedRound => {
                    if self.sub.is_empty() {
                        self.state = EngineState::Done(1);
                        continue;
                    }
                    self.prepare_round()?;
                }
            }
        }
    }

    fn prepare_round(&mut self) -> Result<()> {
        let sub_set = PointSet::new(self.sub.clone());
        let cur = self
            .orig
            .restrict(&sub_set)
            .expect("alive set is nonempty");
        let fam_rc = self.runner.cache.borrow_mut().family_for_subset(
            &self.orig,
            &sub_set,
            &cur,
            &self.runner.config.epsilon,
            &self.runner.config.net_mode,
        )?;
        let mut fam = fam_rc.borrow_mut();

        let cur_x = self.reindexed(&self.x_bits);
        let cur_y = self.reindexed(&self.y_bits);
        let a_choice = fam.first_qualifying(&cur_x);
        let b_choice = fam.first_qualifying(&cur_y);

        let mut queue = VecDeque::new();
        queue.push_back(Message {
            sender: Party::Alice,
            bits: vec![a_choice.is_some()],
            tag: MessageTag::FoundFlag,
        });
        queue.push_back(Message {
            sender: Party::Bob,
            bits: vec![b_choice.is_some()],
            tag: MessageTag::FoundFlag,
        });

        let xy = self.x_bits.intersect(&self.y_bits).count();
        let family_size = fam.len();
        let (finder, entry_idx) = match (a_choice, b_choice) {
            (Some(i), _) => (Party::Alice, i),
            (None, Some(j)) => (Party::Bob, j),
            (None, None) => {
                self.rounds.push(RoundInfo {
                    domain_size: self.sub.len(),
                    finder: None,
                    bits: 2,
                    xy_intersection: xy,
                    family_size,
                });
                self.state = EngineState::Emitting {
                    queue,
                    apply: None,
                };
                return Ok(());
            }
        };

        let code = fam.code_for(entry_idx)?;
        // The receiver's independent decode is checked against the
        // stored container once, when the code is materialized inside
        // `code_for`; afterwards the entry's container is authoritative.
        let container = fam.entries()[entry_idx].container.clone();
        let bits = code.to_bits();
        self.rounds.push(RoundInfo {
            domain_size: self.sub.len(),
            finder: Some(finder),
            bits: 2 + bits.len(),
            xy_intersection: xy,
            family_size,
        });
        queue.push_back(Message {
            sender: finder,
            bits,
            tag: MessageTag::ContainerCode,
        });
        self.state = EngineState::Emitting {
            queue,
            apply: Some((finder, container)),
        };
        Ok(())
    }

    /// Membership bitset of the alive subset, reindexed to the current
    /// (restricted) domain.
    fn reindexed(&self, orig_bits: &BitSet) -> BitSet {
        let mut b = BitSet::new(self.sub.len());
        for (pos, &orig) in self.sub.iter().enumerate() {
            if orig_bits.contains(orig) {
                b.insert(pos);
            }
        }
        b
    }

    fn apply_round(&mut self, finder: Party, container: &PointSet) {
        // Removed points get +1 when Alice's container (covering X) won,
        // -1 when Bob's (covering Y) won: a party's own points are never
        // outside its own container, so the labels land on the other side.
        let removed_label = match finder {
            Party::Alice => 1i8,
            Party::Bob => -1i8,
        };
        let mut next_sub = Vec::with_capacity(container.len());
        for (pos, &orig) in self.sub.iter().enumerate() {
            if container.contains(pos) {
                next_sub.push(orig);
            } else {
                self.labels[orig] = Some(removed_label);
                let mut gone = BitSet::new(self.orig.len());
                gone.insert(orig);
                self.x_bits = self.x_bits.subtract(&gone);
                self.y_bits = self.y_bits.subtract(&gone);
            }
        }
        debug_assert!(4 * next_sub.len() <= 3 * self.sub.len());
        self.sub = next_sub;
    }

    pub fn into_outcome(self) -> ProtocolOutcome {
        match self.state {
            EngineState::Done(decision) => {
                let labeling = if decision == 1 {
                    Some(
                        self.labels
                            .iter()
                            .map(|l| l.unwrap_or(1))
                            .collect::<Vec<i8>>(),
                    )
                } else {
                    None
                };
                ProtocolOutcome {
                    decision,
                    labeling,
                    transcript: self.transcript,
                    rounds: self.rounds,
                }
            }
            _ => panic!("engine not finished"),
        }
    }
}

/// Convenience one-shot run with a fresh cache.
pub fn run_promise_csd(
    domain: &Domain,
    x: &PointSet,
    y: &PointSet,
    config: &ProtocolConfig,
) -> Result<ProtocolOutcome> {
    ProtocolRunner::new(config.clone()).run_promise_csd(domain, x, y)
}

/// Convenience one-shot full-CSD run with a fresh cache.
pub fn run_csd(
    domain: &Domain,
    x: &PointSet,
    y: &PointSet,
    config: &ProtocolConfig,
) -> Result<ProtocolOutcome> {
    ProtocolRunner::new(config.clone()).run_csd(domain, x, y)
}

/// Default cap on the subset-pair enumeration of the auxiliary domain.
pub const DEFAULT_AUX_PAIR_CAP: u64 = 5_000_000;

/// The auxiliary domain of the promise reduction: one canonical witness
/// point for every intersecting pair of subsets with at most `d + 2`
/// points in total. Contains the original points (singleton pairs);
/// size at most `(2n)^{d+2}`.
pub fn build_auxiliary_domain(domain: &Domain) -> Result<Domain> {
    build_auxiliary_domain_capped(domain, DEFAULT_AUX_PAIR_CAP)
}

pub fn build_auxiliary_domain_capped(domain: &Domain, cap: u64) -> Result<Domain> {
    let n = domain.len();
    let d = domain.dim();
    let budget = d + 2;
    // Work bound: number of (S1, S2) pairs.
    let mut pairs = BigInt::from(0);
    for d1 in 1..budget {
        for d2 in 1..=(budget - d1) {
            pairs += binomial_big(n, d1) * binomial_big(n, d2);
        }
    }
    if pairs > BigInt::from(cap) {
        return Err(Error::CapExceeded(format!(
            "auxiliary domain needs {pairs} subset pairs, cap is {cap}"
        )));
    }

    let mut witnesses: BTreeSet<Point> = BTreeSet::new();
    let mut s1_buf = Vec::new();
    let mut s2_buf = Vec::new();
    for d1 in 1..budget {
        enumerate_subsets(n, d1, &mut s1_buf);
        for s1 in &s1_buf {
            let x = PointSet::new(s1.clone());
            for d2 in 1..=(budget - d1) {
                enumerate_subsets(n, d2, &mut s2_buf);
                for s2 in &s2_buf {
                    let y = PointSet::new(s2.clone());
                    if let Some(w) =
                        crate::geom::canonical_intersection_point(domain, &x, &y)?
                    {
                        witnesses.insert(w);
                    }
                }
            }
        }
    }
    let points: Vec<Point> = witnesses.into_iter().collect();
    Domain::new(d, points)
}

fn binomial_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn enumerate_subsets(n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
    out.clear();
    if k > n {
        return;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if cur[i] != i + n - k {
                cur[i] += 1;
                for j in (i + 1)..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

// ---------------------------------------------------------------------
// Learning halfspaces.
// ---------------------------------------------------------------------

/// A labeled sample: `(domain index, label)` with labels in {-1, +1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    examples: Vec<(usize, i8)>,
}

impl Sample {
    pub fn new(mut examples: Vec<(usize, i8)>) -> Result<Self> {
        examples.sort_unstable();
        examples.dedup();
        for &(i, l) in &examples {
            if l != 1 && l != -1 {
                return Err(Error::InvalidInput(format!("label {l} not in {{-1,+1}}")));
            }
            let _ = i;
        }
        for w in examples.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::ContradictorySample(w[0].0));
            }
        }
        Ok(Sample { examples })
    }

    pub fn examples(&self) -> &[(usize, i8)] {
        &self.examples
    }

    pub fn side(&self, label: i8) -> PointSet {
        self.examples
            .iter()
            .filter(|(_, l)| *l == label)
            .map(|(i, _)| *i)
            .collect()
    }
}

/// The learned labeling with its provenance: the two sub-protocol
/// labelings and the two transmitted trace indicators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub labels: Vec<i8>,
    pub f_labels: Vec<i8>,
    pub g_labels: Vec<i8>,
    /// Trace transmitted by Alice for the F+ ∩ G- region (+1 inside).
    pub indicator_pm: PointSet,
    /// Trace transmitted by Bob for the F- ∩ G+ region (+1 inside).
    pub indicator_mp: PointSet,
}

/// Learning-protocol result: a consistent hypothesis, or the protocol's
/// "Error" output when a sub-protocol decided 0 (non-realizable input).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearningResult {
    pub hypothesis: Option<Hypothesis>,
    pub transcript: Transcript,
    /// Bits spent by the two promise sub-protocols.
    pub promise_bits: [usize; 2],
    /// Bits charged for each trace indicator.
    pub indicator_bits: usize,
}

/// Bits to name one halfspace trace of an `n`-point domain in `R^d`:
/// `ceil(log2(2 n^d))`.
pub fn trace_indicator_bits(n: usize, d: usize) -> usize {
    let bound = BigInt::from(2) * BigInt::from(n).pow(d as u32);
    if bound <= BigInt::from(1) {
        0
    } else {
        (bound - 1u8).bits() as usize
    }
}

fn run_learning_impl(
    runner: &ProtocolRunner,
    domain: &Domain,
    sample_a: &Sample,
    sample_b: &Sample,
) -> Result<LearningResult> {
    let n = domain.len();
    let d = domain.dim();
    for &(i, _) in sample_a.examples().iter().chain(sample_b.examples()) {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, size: n });
        }
    }
    let x_minus = sample_a.side(-1);
    let x_plus = sample_a.side(1);
    let y_minus = sample_b.side(-1);
    let y_plus = sample_b.side(1);

    let mut transcript = Transcript::default();
    let ind_bits = trace_indicator_bits(n, d);

    // Sub-protocol 1 on (Alice's negatives, Bob's positives): g labels
    // Alice's negatives -1 and Bob's positives +1.
    let out1 = runner.run_promise_csd(domain, &x_minus, &y_plus)?;
    transcript.extend(&out1.transcript);
    if out1.decision == 0 {
        return Ok(LearningResult {
            hypothesis: None,
            transcript,
            promise_bits: [out1.transcript.total_bits(), 0],
            indicator_bits: ind_bits,
        });
    }
    let g: Vec<i8> = out1.labeling.clone().expect("decision 1 carries labels");

    // Sub-protocol 2 on (Alice's positives, Bob's negatives); f is the
    // negation of its labeling, so f is +1 on Alice's positives and -1
    // on Bob's negatives.
    let out2 = runner.run_promise_csd(domain, &x_plus, &y_minus)?;
    transcript.extend(&out2.transcript);
    if out2.decision == 0 {
        return Ok(LearningResult {
            hypothesis: None,
            transcript,
            promise_bits: [out1.transcript.total_bits(), out2.transcript.total_bits()],
            indicator_bits: ind_bits,
        });
    }
    let f: Vec<i8> = out2
        .labeling
        .clone()
        .expect("decision 1 carries labels")
        .iter()
        .map(|l| -l)
        .collect();

    // Regions known to both parties without communication.
    let region_pm: Vec<usize> = (0..n).filter(|&u| f[u] == 1 && g[u] == -1).collect();
    let region_mp: Vec<usize> = (0..n).filter(|&u| f[u] == -1 && g[u] == 1).collect();

    let traces = enumerate_halfspace_traces(domain)?;
    let pick_indicator = |region: &[usize], sample: &Sample| -> Result<(usize, PointSet)> {
        let pos: Vec<usize> = region
            .iter()
            .copied()
            .filter(|u| sample.examples().contains(&(*u, 1)))
            .collect();
        let neg: Vec<usize> = region
            .iter()
            .copied()
            .filter(|u| sample.examples().contains(&(*u, -1)))
            .collect();
        for (id, e) in traces.entries().iter().enumerate() {
            if pos.iter().all(|&u| e.members.contains(u))
                && neg.iter().all(|&u| !e.members.contains(u))
            {
                return Ok((id, e.members.clone()));
            }
        }
        Err(Error::InvalidInput(
            "no halfspace trace separates the region's examples".into(),
        ))
    };

    // Alice's indicator for her examples inside F+ ∩ G-.
    let (id_pm, ind_pm) = pick_indicator(&region_pm, sample_a)?;
    let mut bits = Vec::with_capacity(ind_bits);
    for k in (0..ind_bits).rev() {
        bits.push(id_pm >> k & 1 == 1);
    }
    transcript.push(Party::Alice, bits, MessageTag::TraceIndicator);

    // Bob's indicator for his examples inside F- ∩ G+.
    let (id_mp, ind_mp) = pick_indicator(&region_mp, sample_b)?;
    let mut bits = Vec::with_capacity(ind_bits);
    for k in (0..ind_bits).rev() {
        bits.push(id_mp >> k & 1 == 1);
    }
    transcript.push(Party::Bob, bits, MessageTag::TraceIndicator);

    let labels: Vec<i8> = (0..n)
        .map(|u| match (f[u], g[u]) {
            (1, 1) => 1,
            (-1, -1) => -1,
            (1, -1) => {
                if ind_pm.contains(u) {
                    1
                } else {
                    -1
                }
            }
            (-1, 1) => {
                if ind_mp.contains(u) {
                    1
                } else {
                    -1
                }
            }
            _ => unreachable!("labels are in {{-1,+1}}"),
        })
        .collect();

    Ok(LearningResult {
        hypothesis: Some(Hypothesis {
            labels,
            f_labels: f,
            g_labels: g,
            indicator_pm: ind_pm,
            indicator_mp: ind_mp,
        }),
        transcript,
        promise_bits: [out1.transcript.total_bits(), out2.transcript.total_bits()],
        indicator_bits: ind_bits,
    })
}

/// Convenience one-shot learning run with a fresh cache.
pub fn run_learning(
    domain: &Domain,
    sample_a: &Sample,
    sample_b: &Sample,
    config: &ProtocolConfig,
) -> Result<LearningResult> {
    ProtocolRunner::new(config.clone()).run_learning(domain, sample_a, sample_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::hulls_intersect_quick;

    fn cfg() -> ProtocolConfig {
        ProtocolConfig::default()
    }

    #[test]
    fn shared_point_decides_zero() {
        let d = Domain::line(&[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        let x = PointSet::new(vec![3]);
        let out = run_promise_csd(&d, &x, &x, &cfg()).unwrap();
        assert_eq!(out.decision, 0);
        assert!(out.labeling.is_none());
    }

    #[test]
    fn separated_sets_decide_one_with_valid_labels() {
        // U = {1..8}, X = {1,2}, Y = {7,8}: decision 1 with h = -1 on X
        // and +1 on Y.
        let d = Domain::line(&[1, 2, 3, 4, 5, 6, 7, 8]).unwrap();
        let x = PointSet::new(vec![0, 1]);
        let y = PointSet::new(vec![6, 7]);
        let out = run_promise_csd(&d, &x, &y, &cfg()).unwrap();
        assert_eq!(out.decision, 1);
        let h = out.labeling.unwrap();
        assert_eq!(h[0], -1);
        assert_eq!(h[1], -1);
        assert_eq!(h[6], 1);
        assert_eq!(h[7], 1);
    }

    #[test]
    fn empty_sides_decide_one() {
        let d = Domain::line(&[0, 1, 2, 3]).unwrap();
        let out = run_promise_csd(&d, &PointSet::empty(), &PointSet::empty(), &cfg()).unwrap();
        assert_eq!(out.decision, 1);
        let out2 = run_promise_csd(&d, &PointSet::empty(), &d.full_set(), &cfg()).unwrap();
        assert_eq!(out2.decision, 1);
        assert!(out2.labeling.unwrap().iter().all(|&l| l == 1));
    }

    #[test]
    fn structure_invariants_hold() {
        let d = Domain::parabola(8).unwrap();
        let x = PointSet::new(vec![0, 1, 2]);
        let y = PointSet::new(vec![5, 6, 7]);
        let out = run_promise_csd(&d, &x, &y, &cfg()).unwrap();
        assert_eq!(out.decision, 1);
        // Shrinkage and round count.
        for w in out.rounds.windows(2) {
            assert!(4 * w[1].domain_size <= 3 * w[0].domain_size);
        }
        let max_rounds = (8f64.ln() / (4f64 / 3f64).ln()).ceil() as usize + 1;
        assert!(out.rounds.len() <= max_rounds);
        // Accounting: transcript equals the per-round sums.
        let total: usize = out.rounds.iter().map(|r| r.bits).sum();
        assert_eq!(total, out.transcript.total_bits());
        // Intersection is invariant across rounds.
        let first = out.rounds.first().unwrap().xy_intersection;
        assert!(out.rounds.iter().all(|r| r.xy_intersection == first));
    }

    #[test]
    fn exhaustive_promise_pairs_on_six_points() {
        // All promise pairs on 6 collinear points: decision matches the
        // oracle on both promise branches.
        let d = Domain::line(&[0, 1, 2, 3, 4, 5]).unwrap();
        let runner = ProtocolRunner::new(cfg());
        let sets: Vec<PointSet> = (1u32..64)
            .map(|m| PointSet::new((0..6).filter(|i| m >> i & 1 == 1).collect()))
            .collect();
        let mut checked = 0;
        for x in &sets {
            for y in &sets {
                let shared = !x.intersection(y).is_empty();
                let disjoint_hulls = !hulls_intersect_quick(&d, x, y).unwrap();
                if !(shared || disjoint_hulls) {
                    continue; // outside the promise
                }
                let out = runner.run_promise_csd(&d, x, y).unwrap();
                let expect = u8::from(disjoint_hulls);
                assert_eq!(out.decision, expect, "x={x:?} y={y:?}");
                if out.decision == 1 {
                    let h = out.labeling.unwrap();
                    assert!(x.iter().all(|i| h[i] == -1), "x={x:?} y={y:?}");
                    assert!(y.iter().all(|i| h[i] == 1), "x={x:?} y={y:?}");
                }
                checked += 1;
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn auxiliary_domain_line() {
        // In one dimension every short intersecting pair meets in a
        // domain point, so the auxiliary domain is the domain itself.
        let d = Domain::line(&[0, 1, 2]).unwrap();
        let aux = build_auxiliary_domain(&d).unwrap();
        assert_eq!(aux.len(), 3);
        let single = Domain::line(&[7]).unwrap();
        let aux1 = build_auxiliary_domain(&single).unwrap();
        assert_eq!(aux1.len(), 1);
    }

    #[test]
    fn auxiliary_domain_bound_planar() {
        let d = Domain::parabola(6).unwrap();
        let aux = build_auxiliary_domain(&d).unwrap();
        let bound = BigInt::from(12).pow(4);
        assert!(BigInt::from(aux.len()) <= bound);
        // Original points are present (singleton pairs).
        for i in 0..6 {
            assert!(aux.points().contains(d.point(i)));
        }
    }

    #[test]
    fn aux_cap_guard() {
        let d = Domain::parabola(6).unwrap();
        assert!(matches!(
            build_auxiliary_domain_capped(&d, 10),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn run_csd_matches_oracle_on_line() {
        let d = Domain::line(&[0, 1, 2]).unwrap();
        let runner = ProtocolRunner::new(cfg());
        // X = {0,2}, Y = {1}: hulls intersect, decision 0.
        let out = runner
            .run_csd(&d, &PointSet::new(vec![0, 2]), &PointSet::new(vec![1]))
            .unwrap();
        assert_eq!(out.decision, 0);
        // X = {0}, Y = {2}: separable, decision 1.
        let out = runner
            .run_csd(&d, &PointSet::new(vec![0]), &PointSet::new(vec![2]))
            .unwrap();
        assert_eq!(out.decision, 1);
    }

    #[test]
    fn learning_all_positive_is_constant() {
        let d = Domain::line(&[0, 1, 2, 3]).unwrap();
        let sa = Sample::new(vec![(0, 1), (1, 1)]).unwrap();
        let sb = Sample::new(vec![(2, 1)]).unwrap();
        let res = run_learning(&d, &sa, &sb, &cfg()).unwrap();
        let h = res.hypothesis.unwrap();
        for &(u, l) in sa.examples().iter().chain(sb.examples()) {
            assert_eq!(h.labels[u], l);
        }
    }

    #[test]
    fn learning_one_dimensional_consistency() {
        // S_a = {(1,-1),(5,+1)}, S_b = {(2,-1),(6,+1)} over {1,2,5,6,...}.
        let d = Domain::line(&[1, 2, 5, 6, 0, 7]).unwrap();
        let sa = Sample::new(vec![(0, -1), (2, 1)]).unwrap();
        let sb = Sample::new(vec![(1, -1), (3, 1)]).unwrap();
        let res = run_learning(&d, &sa, &sb, &cfg()).unwrap();
        let h = res.hypothesis.unwrap();
        for &(u, l) in sa.examples().iter().chain(sb.examples()) {
            assert_eq!(h.labels[u], l, "point {u}");
        }
        // Accounting identity.
        assert_eq!(
            res.transcript.total_bits(),
            res.promise_bits[0] + res.promise_bits[1] + 2 * res.indicator_bits
        );
    }

    #[test]
    fn learning_pairwise_separable_but_not_globally() {
        // XOR positions: positives {(0,0),(1,1)}, negatives {(1,0),(0,1)},
        // split so that every cross pair is separable while no single
        // halfspace separates all positives from all negatives.
        let d = Domain::new(
            2,
            vec![
                Point::from_ints(&[0, 0]),
                Point::from_ints(&[1, 1]),
                Point::from_ints(&[1, 0]),
                Point::from_ints(&[0, 1]),
            ],
        )
        .unwrap();
        let sa = Sample::new(vec![(0, 1), (3, -1)]).unwrap();
        let sb = Sample::new(vec![(1, 1), (2, -1)]).unwrap();
        let res = run_learning(&d, &sa, &sb, &cfg()).unwrap();
        let h = res.hypothesis.unwrap();
        for &(u, l) in sa.examples().iter().chain(sb.examples()) {
            assert_eq!(h.labels[u], l, "point {u}");
        }
    }

    #[test]
    fn learning_error_on_cross_conflict() {
        // Alice holds (u,+1), Bob holds (u,-1): sub-protocol 2 sees a
        // shared point and the protocol reports its error output.
        let d = Domain::line(&[0, 1, 2, 3]).unwrap();
        let sa = Sample::new(vec![(1, 1)]).unwrap();
        let sb = Sample::new(vec![(1, -1)]).unwrap();
        let res = run_learning(&d, &sa, &sb, &cfg()).unwrap();
        assert!(res.hypothesis.is_none());
    }

    #[test]
    fn sample_rejects_contradictions() {
        assert_eq!(
            Sample::new(vec![(3, 1), (3, -1)]).unwrap_err(),
            Error::ContradictorySample(3)
        );
        assert!(Sample::new(vec![(3, 2)]).is_err());
    }

    #[test]
    fn step_interface_emits_messages_one_at_a_time() {
        let d = Domain::line(&[0, 1, 2, 3]).unwrap();
        let runner = ProtocolRunner::new(cfg());
        let x = PointSet::new(vec![0]);
        let y = PointSet::new(vec![3]);
        let mut engine = PromiseCsdEngine::new(&d, &x, &y, &runner).unwrap();
        let mut messages = 0usize;
        let decision = loop {
            match engine.step().unwrap() {
                EngineStep::Sent(_) => messages += 1,
                EngineStep::Decided(dec) => break dec,
            }
        };
        assert_eq!(decision, 1);
        let out = engine.into_outcome();
        assert_eq!(out.transcript.messages.len(), messages);
        assert_eq!(transcript_bits(&out), out.transcript.total_bits());
    }

    #[test]
    fn deterministic_transcripts() {
        let d = Domain::parabola(7).unwrap();
        let x = PointSet::new(vec![0, 1]);
        let y = PointSet::new(vec![4, 6]);
        let a = run_promise_csd(&d, &x, &y, &cfg()).unwrap();
        let b = run_promise_csd(&d, &x, &y, &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_transcript_costs_zero() {
        let t = Transcript::default();
        assert_eq!(t.total_bits(), 0);
    }
}
