//! Task runners: instance acquisition, protocol execution, oracle
//! verification, and record assembly.

use crate::records::RunRecord;
use crate::{DomainShape, ExperimentConfig, InstanceSource, Task};
use anyhow::{bail, Context};
use csd_core::caratheodory::{BvtContext, BvtSequence};
use csd_core::containers::{verify_container, ContainerFamily};
use csd_core::formats::InstanceFile;
use csd_core::geom::{
    enumerate_halfspace_traces, hulls_intersect_quick, separate, Domain, Point, PointSet,
    Polytope,
};
use csd_core::hardness::{disj_to_csd_full, disj_to_promise_csd, DisjInstance};
use csd_core::protocols::{ProtocolConfig, ProtocolOutcome, ProtocolRunner, Sample};
use csd_core::scalar::Scalar;
use csd_core::Error as CoreError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::time::Instant;

/// All records of one experiment plus the failure count.
#[derive(Debug)]
pub struct ExperimentReport {
    pub records: Vec<RunRecord>,
    pub failures: usize,
}

/// A canonical domain of `n` points in dimension `d`.
pub fn canonical_domain(shape: DomainShape, d: usize, n: usize) -> anyhow::Result<Domain> {
    let dom = match shape {
        DomainShape::Line => {
            if d != 1 {
                bail!("line shape needs d = 1");
            }
            Domain::line(&(0..n as i64).collect::<Vec<_>>())?
        }
        DomainShape::Parabola => {
            if d != 2 {
                bail!("parabola shape needs d = 2");
            }
            Domain::parabola(n)?
        }
        DomainShape::Grid => {
            if d != 2 {
                bail!("grid shape needs d = 2");
            }
            let k = (n as f64).sqrt().floor() as usize;
            if k * k != n {
                bail!("grid shape needs a square n, got {n}");
            }
            Domain::grid(k)?
        }
        DomainShape::Moment => {
            let pts: Vec<Point> = (0..n as i64)
                .map(|t| {
                    let mut coords = Vec::with_capacity(d);
                    let mut acc = Scalar::one();
                    for _ in 0..d {
                        acc = acc * Scalar::from_int(t);
                        coords.push(acc.clone());
                    }
                    Point::new(coords)
                })
                .collect();
            Domain::new(d, pts)?
        }
    };
    Ok(dom)
}

pub fn default_shape(d: usize) -> DomainShape {
    match d {
        1 => DomainShape::Line,
        2 => DomainShape::Parabola,
        _ => DomainShape::Moment,
    }
}

/// A random nonempty subset pair; `force_shared` plants a common point,
/// `force_separated` draws both sides of a projection threshold.
pub fn random_set_pair(
    rng: &mut ChaCha8Rng,
    domain: &Domain,
    kind: PairKind,
) -> (PointSet, PointSet) {
    let n = domain.len();
    match kind {
        PairKind::Free => {
            let mut x: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.35)).collect();
            let mut y: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.35)).collect();
            if x.is_empty() {
                x.push(rng.gen_range(0..n));
            }
            if y.is_empty() {
                y.push(rng.gen_range(0..n));
            }
            (PointSet::new(x), PointSet::new(y))
        }
        PairKind::Shared => {
            let (mut x, mut y) = random_set_pair(rng, domain, PairKind::Free);
            let shared = rng.gen_range(0..n);
            x = x.union(&PointSet::new(vec![shared]));
            y = y.union(&PointSet::new(vec![shared]));
            (x, y)
        }
        PairKind::Separated => {
            // Order the points along a random direction and split at a
            // random gap; subsets of the two sides have disjoint hulls.
            let d = domain.dim();
            loop {
                let dir: Vec<Scalar> = (0..d)
                    .map(|_| Scalar::from_int(rng.gen_range(-5i64..=5)))
                    .collect();
                if dir.iter().all(|c| c.is_zero()) {
                    continue;
                }
                let mut keyed: Vec<(Scalar, usize)> = (0..n)
                    .map(|i| {
                        (
                            csd_core::scalar::dot(&dir, &domain.point(i).coords),
                            i,
                        )
                    })
                    .collect();
                keyed.sort();
                // Find a strict gap to split at.
                let cut = rng.gen_range(1..n);
                if keyed[cut - 1].0 == keyed[cut].0 {
                    continue;
                }
                let lo: Vec<usize> = keyed[..cut]
                    .iter()
                    .map(|(_, i)| *i)
                    .filter(|_| rng.gen_bool(0.6))
                    .collect();
                let hi: Vec<usize> = keyed[cut..]
                    .iter()
                    .map(|(_, i)| *i)
                    .filter(|_| rng.gen_bool(0.6))
                    .collect();
                let mut x = lo;
                if x.is_empty() {
                    x.push(keyed[0].1);
                }
                let mut y = hi;
                if y.is_empty() {
                    y.push(keyed[n - 1].1);
                }
                return (PointSet::new(x), PointSet::new(y));
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    Free,
    Shared,
    Separated,
}

/// A seeded realizable sample pair: labels come from a random halfspace,
/// examples are split between the parties.
pub fn random_realizable_samples(
    rng: &mut ChaCha8Rng,
    domain: &Domain,
) -> (Sample, Sample) {
    let n = domain.len();
    let d = domain.dim();
    loop {
        let dir: Vec<Scalar> = (0..d)
            .map(|_| Scalar::from_int(rng.gen_range(-5i64..=5)))
            .collect();
        if dir.iter().all(|c| c.is_zero()) {
            continue;
        }
        let mut vals: Vec<Scalar> = (0..n)
            .map(|i| csd_core::scalar::dot(&dir, &domain.point(i).coords))
            .collect();
        let mut sorted = vals.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() < 2 {
            continue;
        }
        let cut = rng.gen_range(1..sorted.len());
        let threshold = (&sorted[cut - 1] + &sorted[cut]) / Scalar::from_int(2);
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..n {
            let label: i8 = if vals[i] < threshold { -1 } else { 1 };
            match rng.gen_range(0..3u8) {
                0 => a.push((i, label)),
                1 => b.push((i, label)),
                _ => {}
            }
        }
        vals.clear();
        if a.is_empty() && b.is_empty() {
            continue;
        }
        return (
            Sample::new(a).expect("labels are consistent"),
            Sample::new(b).expect("labels are consistent"),
        );
    }
}

struct SetInstance {
    id: String,
    domain: Domain,
    x: PointSet,
    y: PointSet,
}

fn acquire_set_instances(config: &ExperimentConfig) -> anyhow::Result<Vec<SetInstance>> {
    match &config.source {
        InstanceSource::File(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let inst: InstanceFile = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            let (x, y) = inst.sets()?;
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "instance".into());
            Ok(vec![SetInstance {
                id,
                domain: inst.domain,
                x,
                y,
            }])
        }
        InstanceSource::Generated { shape, n, d, count } => {
            check_caps(config, *n, *d)?;
            let domain = canonical_domain(*shape, *d, *n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut out = Vec::with_capacity(*count);
            for i in 0..*count {
                let kind = match (config.task, i % 3) {
                    (Task::PromiseCsd, 0) => PairKind::Shared,
                    (Task::PromiseCsd, _) => PairKind::Separated,
                    (_, 0) => PairKind::Shared,
                    (_, 1) => PairKind::Separated,
                    _ => PairKind::Free,
                };
                let (x, y) = random_set_pair(&mut rng, &domain, kind);
                out.push(SetInstance {
                    id: format!("{:?}-{n}x{d}-{i:04}", config.task).to_lowercase(),
                    domain: domain.clone(),
                    x,
                    y,
                });
            }
            Ok(out)
        }
    }
}

fn check_caps(config: &ExperimentConfig, n: usize, d: usize) -> anyhow::Result<()> {
    if n > config.caps.max_n {
        bail!("n = {n} exceeds cap {}", config.caps.max_n);
    }
    if d > config.caps.max_d {
        bail!("d = {d} exceeds cap {}", config.caps.max_d);
    }
    Ok(())
}

fn protocol_config(config: &ExperimentConfig) -> ProtocolConfig {
    ProtocolConfig {
        epsilon: Scalar::ratio(1, 4),
        net_mode: config.net.to_mode(config.seed, &config.caps),
        ..Default::default()
    }
}

fn outcome_record(
    config: &ExperimentConfig,
    id: String,
    domain: &Domain,
    out: &ProtocolOutcome,
    oracle: Option<u8>,
    detail: impl Fn() -> String,
    elapsed_ms: u128,
) -> RunRecord {
    let flagged = config.verify && oracle.is_some() && Some(out.decision) != oracle;
    RunRecord {
        instance_id: id,
        n: domain.len(),
        d: domain.dim(),
        eps: config.epsilon.clone(),
        decision: Some(out.decision),
        oracle,
        bits: out.transcript.total_bits(),
        rounds: out.rounds.len(),
        family_sizes: out.rounds.iter().map(|r| r.family_size).collect(),
        time_ms: if config.timing { elapsed_ms } else { 0 },
        flagged,
        detail: flagged.then(detail),
    }
}

/// Runs the configured experiment. Records come back sorted by id; the
/// failure count is the number of flagged records.
pub fn run_experiment(config: &ExperimentConfig) -> anyhow::Result<ExperimentReport> {
    let mut records = match config.task {
        Task::PromiseCsd | Task::Csd => run_set_task(config)?,
        Task::Learn => run_learn_task(config)?,
        Task::Containers => run_containers_task(config)?,
        Task::HardnessSweep => run_hardness_task(config)?,
        Task::BvtCheck => run_bvt_task(config)?,
    };
    records.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
    let failures = records.iter().filter(|r| r.flagged).count();
    Ok(ExperimentReport { records, failures })
}

fn run_set_task(config: &ExperimentConfig) -> anyhow::Result<Vec<RunRecord>> {
    let instances = acquire_set_instances(config)?;
    let runner = ProtocolRunner::new(protocol_config(config));
    let mut records = Vec::with_capacity(instances.len());
    for inst in instances {
        let t0 = Instant::now();
        let (out, oracle) = match config.task {
            Task::PromiseCsd => {
                let out = runner.run_promise_csd(&inst.domain, &inst.x, &inst.y)?;
                let oracle = if config.verify {
                    promise_oracle(&inst.domain, &inst.x, &inst.y)?
                } else {
                    None
                };
                (out, oracle)
            }
            Task::Csd => {
                let out = runner.run_csd(&inst.domain, &inst.x, &inst.y)?;
                let oracle = if config.verify {
                    Some(u8::from(!hulls_intersect_quick(
                        &inst.domain,
                        &inst.x,
                        &inst.y,
                    )?))
                } else {
                    None
                };
                (out, oracle)
            }
            _ => unreachable!(),
        };
        let elapsed = t0.elapsed().as_millis();
        let detail = {
            let inst_file = InstanceFile {
                domain: inst.domain.clone(),
                alice_set: Some(inst.x.iter().collect()),
                bob_set: Some(inst.y.iter().collect()),
                alice_sample: None,
                bob_sample: None,
                epsilon: config.epsilon.clone(),
                seed: config.seed,
            };
            move || serde_json::to_string(&inst_file).unwrap_or_default()
        };
        records.push(outcome_record(
            config,
            inst.id,
            &inst.domain,
            &out,
            oracle,
            detail,
            elapsed,
        ));
    }
    Ok(records)
}

/// The promised value when the pair satisfies the promise, else `None`.
fn promise_oracle(
    domain: &Domain,
    x: &PointSet,
    y: &PointSet,
) -> anyhow::Result<Option<u8>> {
    if !x.intersection(y).is_empty() {
        return Ok(Some(0));
    }
    if x.is_empty() || y.is_empty() {
        return Ok(Some(1));
    }
    if !hulls_intersect_quick(domain, x, y)? {
        return Ok(Some(1));
    }
    Ok(None)
}

fn run_learn_task(config: &ExperimentConfig) -> anyhow::Result<Vec<RunRecord>> {
    let (domain, samples, base_id) = match &config.source {
        InstanceSource::File(path) => {
            let text = std::fs::read_to_string(path)?;
            let inst: InstanceFile = serde_json::from_str(&text)?;
            let pair = inst.samples()?;
            (
                inst.domain,
                vec![pair],
                path.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "learn".into()),
            )
        }
        InstanceSource::Generated { shape, n, d, count } => {
            check_caps(config, *n, *d)?;
            let domain = canonical_domain(*shape, *d, *n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let samples: Vec<(Sample, Sample)> = (0..*count)
                .map(|_| random_realizable_samples(&mut rng, &domain))
                .collect();
            (domain, samples, format!("learn-{n}x{d}"))
        }
    };
    let runner = ProtocolRunner::new(protocol_config(config));
    let mut records = Vec::new();
    for (i, (sa, sb)) in samples.iter().enumerate() {
        let t0 = Instant::now();
        let res = runner.run_learning(&domain, sa, sb)?;
        let elapsed = t0.elapsed().as_millis();
        // Realizability oracle: the union's positives and negatives are
        // separable.
        let mut pos = sa.side(1).union(&sb.side(1));
        let mut neg = sa.side(-1).union(&sb.side(-1));
        let realizable = if pos.is_empty() || neg.is_empty() {
            true
        } else {
            separate(&domain, &neg, &pos)?.is_some()
        };
        let consistent = res.hypothesis.as_ref().is_some_and(|h| {
            sa.examples()
                .iter()
                .chain(sb.examples())
                .all(|&(u, l)| h.labels[u] == l)
        });
        let bits_ok = res.transcript.total_bits()
            == res.promise_bits[0] + res.promise_bits[1] + 2 * res.indicator_bits;
        let decision = u8::from(consistent);
        let oracle = u8::from(realizable);
        let flagged = config.verify && (decision != oracle || (consistent && !bits_ok));
        pos = PointSet::empty();
        neg = PointSet::empty();
        let _ = (pos, neg);
        records.push(RunRecord {
            instance_id: format!("{base_id}-{i:04}"),
            n: domain.len(),
            d: domain.dim(),
            eps: config.epsilon.clone(),
            decision: Some(decision),
            oracle: Some(oracle),
            bits: res.transcript.total_bits(),
            rounds: 0,
            family_sizes: Vec::new(),
            time_ms: if config.timing { elapsed } else { 0 },
            flagged,
            detail: flagged.then(|| {
                serde_json::to_string(&InstanceFile {
                    domain: domain.clone(),
                    alice_set: None,
                    bob_set: None,
                    alice_sample: Some(sa.examples().to_vec()),
                    bob_sample: Some(sb.examples().to_vec()),
                    epsilon: config.epsilon.clone(),
                    seed: config.seed,
                })
                .unwrap_or_default()
            }),
        });
    }
    Ok(records)
}

fn run_containers_task(config: &ExperimentConfig) -> anyhow::Result<Vec<RunRecord>> {
    let (domain, id) = match &config.source {
        InstanceSource::File(path) => {
            let text = std::fs::read_to_string(path)?;
            let inst: InstanceFile = serde_json::from_str(&text)?;
            (
                inst.domain,
                path.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "containers".into()),
            )
        }
        InstanceSource::Generated { shape, n, d, .. } => {
            check_caps(config, *n, *d)?;
            (
                canonical_domain(*shape, *d, *n)?,
                format!("containers-{n}x{d}"),
            )
        }
    };
    let t0 = Instant::now();
    let mode = config.net.to_mode(config.seed, &config.caps);
    let fam = ContainerFamily::build(&domain, &config.epsilon, &mode)?;
    if fam.len() > config.caps.max_family {
        bail!(
            "family of {} containers exceeds cap {}",
            fam.len(),
            config.caps.max_family
        );
    }
    let elapsed = t0.elapsed().as_millis();
    let covered = if config.verify {
        let traces = enumerate_halfspace_traces(&domain)?;
        traces.entries().iter().all(|e| {
            fam.entries().iter().any(|fe| {
                verify_container(&fe.container, &e.members, &config.epsilon, domain.len())
            })
        })
    } else {
        true
    };
    Ok(vec![RunRecord {
        instance_id: format!("{id}-eps{}", config.epsilon).replace('/', "_"),
        n: domain.len(),
        d: domain.dim(),
        eps: config.epsilon.clone(),
        decision: Some(u8::from(covered)),
        oracle: Some(1),
        bits: fam.code_bit_length(),
        rounds: 0,
        family_sizes: vec![fam.len()],
        time_ms: if config.timing { elapsed } else { 0 },
        flagged: config.verify && !covered,
        detail: None,
    }])
}

fn run_hardness_task(config: &ExperimentConfig) -> anyhow::Result<Vec<RunRecord>> {
    let k = config.k.unwrap_or(3);
    let c = config.c.unwrap_or(1);
    if c * k > 16 {
        bail!("hardness sweep limited to c*k <= 16 bits, got {}", c * k);
    }
    let runner = ProtocolRunner::new(protocol_config(config));
    let width = c * k;
    let mut records = Vec::new();
    for xv in 0u64..(1 << width) {
        for yv in 0u64..(1 << width) {
            let bits = |v: u64| (0..width).map(|i| v >> i & 1 == 1).collect::<Vec<bool>>();
            let inst = DisjInstance::new(bits(xv), bits(yv))?;
            let oracle = inst.value();
            let red = if c == 1 {
                disj_to_promise_csd(&inst)?
            } else {
                disj_to_csd_full(&inst, c, k)?
            };
            let t0 = Instant::now();
            let (decision, out_bits, rounds, fams) = if red.bob.is_empty() {
                // Empty mapped side: hulls are trivially disjoint.
                (1u8, 0usize, 0usize, Vec::new())
            } else {
                let out = runner.run_promise_csd(&red.domain, &red.alice, &red.bob)?;
                (
                    out.decision,
                    out.transcript.total_bits(),
                    out.rounds.len(),
                    out.rounds.iter().map(|r| r.family_size).collect(),
                )
            };
            let elapsed = t0.elapsed().as_millis();
            let flagged = config.verify && decision != oracle;
            records.push(RunRecord {
                instance_id: format!("disj-c{c}k{k}-x{xv:0w$b}-y{yv:0w$b}", w = width),
                n: red.domain.len(),
                d: red.domain.dim(),
                eps: config.epsilon.clone(),
                decision: Some(decision),
                oracle: Some(oracle),
                bits: out_bits,
                rounds,
                family_sizes: fams,
                time_ms: if config.timing { elapsed } else { 0 },
                flagged,
                detail: flagged.then(|| format!("x={xv:0w$b} y={yv:0w$b}", w = width)),
            });
        }
    }
    Ok(records)
}

/// A seeded bounded nonempty polytope with `m` constraints in `R^d`;
/// retries deterministically until bounded and nonempty.
pub fn random_bounded_polytope(rng: &mut ChaCha8Rng, d: usize, m: usize) -> Polytope {
    loop {
        let rows: Vec<(Vec<Scalar>, Scalar)> = (0..m)
            .map(|_| {
                let normal: Vec<Scalar> = (0..d)
                    .map(|_| Scalar::from_int(rng.gen_range(-3i64..=3)))
                    .collect();
                let bound = Scalar::from_int(rng.gen_range(1i64..=6));
                (normal, bound)
            })
            .collect();
        if rows
            .iter()
            .any(|(w, _)| w.iter().all(|x| x.is_zero()))
        {
            continue;
        }
        let poly = Polytope::new(d, rows).expect("well-formed rows");
        // The origin satisfies every row (positive bounds), so only
        // boundedness can fail.
        match BvtContext::new(&poly) {
            Ok(_) => return poly,
            Err(CoreError::UnboundedPolytope) => continue,
            Err(e) => unreachable!("origin-feasible polytope: {e}"),
        }
    }
}

/// Interior rational points as positive convex combinations of all
/// vertices, with seeded weights.
pub fn interior_points(
    rng: &mut ChaCha8Rng,
    vertices: &[Vec<Scalar>],
    count: usize,
) -> Vec<Point> {
    let d = vertices[0].len();
    (0..count)
        .map(|_| {
            let weights: Vec<Scalar> = vertices
                .iter()
                .map(|_| Scalar::from_int(rng.gen_range(1i64..=9)))
                .collect();
            let total = weights
                .iter()
                .fold(Scalar::zero(), |acc, w| acc + w.clone());
            let mut coords = vec![Scalar::zero(); d];
            for (v, w) in vertices.iter().zip(&weights) {
                for kk in 0..d {
                    coords[kk] += &(&(w / &total) * &v[kk]);
                }
            }
            Point::new(coords)
        })
        .collect()
}

fn run_bvt_task(config: &ExperimentConfig) -> anyhow::Result<Vec<RunRecord>> {
    let (d, count) = match &config.source {
        InstanceSource::Generated { d, count, .. } => (*d, *count),
        InstanceSource::File(_) => bail!("bvt-check runs on generated polytopes"),
    };
    check_caps(config, 0, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut records = Vec::new();
    for i in 0..count {
        let m = match d {
            2 => rng.gen_range(5..=8),
            3 => rng.gen_range(6..=10),
            _ => rng.gen_range(d + 2..=d + 6),
        };
        let poly = random_bounded_polytope(&mut rng, d, m);
        let t0 = Instant::now();
        let mut ctx = BvtContext::new(&poly)?;
        let verts = csd_core::caratheodory::enumerate_vertices(&poly)?;
        let points = interior_points(&mut rng, &verts, 100);
        let mut ok = true;
        let mut sequences: HashSet<BvtSequence> = HashSet::new();
        for p in &points {
            let seq = ctx.encode(&p.coords)?;
            let decoded = ctx.decode(&seq)?;
            let simplex = csd_core::caratheodory::Simplex {
                vertices: decoded.into_iter().map(Point::new).collect(),
            };
            if !simplex.contains(p) {
                ok = false;
            }
            sequences.insert(seq);
        }
        let bound = poly.num_inequalities().pow(ctx.full_dim() as u32);
        if sequences.len() > bound {
            ok = false;
        }
        let elapsed = t0.elapsed().as_millis();
        records.push(RunRecord {
            instance_id: format!("bvt-d{d}-{i:03}"),
            n: poly.num_inequalities(),
            d,
            eps: config.epsilon.clone(),
            decision: Some(u8::from(ok)),
            oracle: Some(1),
            bits: 0,
            rounds: 0,
            family_sizes: vec![sequences.len()],
            time_ms: if config.timing { elapsed } else { 0 },
            flagged: config.verify && !ok,
            detail: None,
        });
    }
    Ok(records)
}
