//! Bits-versus-size measurement: runs the promise protocol over a grid
//! of `(d, n)` sizes and fits the single constant `c` in
//! `bits <= c * d * log2(d+1) * log2(n)`.

use crate::records::RunRecord;
use crate::runner::{canonical_domain, default_shape, random_set_pair, PairKind};
use crate::{Caps, NetChoice, Task};
use anyhow::bail;
use csd_core::protocols::{ProtocolConfig, ProtocolRunner};
use csd_core::scalar::Scalar;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Fitted summary of a scaling sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingSummary {
    /// `(d, max ratio over the sweep at this d)`.
    pub fitted_per_d: Vec<(usize, f64)>,
    /// The single fitted constant: the maximum ratio anywhere.
    pub fitted_c: f64,
    pub c_max: f64,
    pub within_bound: bool,
    /// Mean bits per n are nondecreasing in n for every d.
    pub monotone_in_n: bool,
}

#[derive(Debug)]
pub struct ScalingReport {
    pub records: Vec<RunRecord>,
    pub summary: ScalingSummary,
}

fn normalizer(d: usize, n: usize) -> f64 {
    d as f64 * ((d + 1) as f64).log2() * (n as f64).log2()
}

/// Runs the sweep. `n` walks powers of two from `n_min` to `n_max`
/// inclusive; each size runs `samples` separated-hull instances and one
/// shared-point instance through the promise protocol.
#[allow(clippy::too_many_arguments)]
pub fn bits_scaling_report(
    task: Task,
    n_range: (usize, usize),
    d_range: (usize, usize),
    seed: u64,
    samples: usize,
    c_max: f64,
    net: NetChoice,
    caps: &Caps,
) -> anyhow::Result<ScalingReport> {
    if task != Task::PromiseCsd && task != Task::Csd {
        bail!("scaling report supports promise-csd and csd tasks");
    }
    let (n_min, n_max) = n_range;
    let (d_min, d_max) = d_range;
    if n_min < 2 || n_min > n_max || d_min < 1 || d_min > d_max {
        bail!("empty or invalid sweep ranges");
    }
    let mut records = Vec::new();
    let mut fitted_per_d = Vec::new();
    let mut monotone = true;
    for d in d_min..=d_max {
        if d > caps.max_d {
            bail!("d = {d} exceeds cap {}", caps.max_d);
        }
        let mut best = 0f64;
        let mut prev_mean: Option<f64> = None;
        let mut n = n_min;
        while n <= n_max {
            if n > caps.max_n {
                bail!("n = {n} exceeds cap {}", caps.max_n);
            }
            let domain = canonical_domain(default_shape(d), d, n)?;
            let runner = ProtocolRunner::new(ProtocolConfig {
                net_mode: net.to_mode(seed, caps),
                ..Default::default()
            });
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (d as u64) << 32 ^ n as u64);
            let mut bits_here = Vec::new();
            for s in 0..samples.max(1) + 1 {
                let kind = if s == 0 {
                    PairKind::Shared
                } else {
                    PairKind::Separated
                };
                let (x, y) = random_set_pair(&mut rng, &domain, kind);
                let out = match task {
                    Task::PromiseCsd => runner.run_promise_csd(&domain, &x, &y)?,
                    Task::Csd => runner.run_csd(&domain, &x, &y)?,
                    _ => unreachable!(),
                };
                let bits = out.transcript.total_bits();
                bits_here.push(bits as f64);
                let ratio = bits as f64 / normalizer(d, n);
                if ratio > best {
                    best = ratio;
                }
                records.push(RunRecord {
                    instance_id: format!("scale-d{d}-n{n:04}-{s}"),
                    n,
                    d,
                    eps: Scalar::ratio(1, 4),
                    decision: Some(out.decision),
                    oracle: None,
                    bits,
                    rounds: out.rounds.len(),
                    family_sizes: out.rounds.iter().map(|r| r.family_size).collect(),
                    time_ms: 0,
                    flagged: false,
                    detail: None,
                });
            }
            let mean = bits_here.iter().sum::<f64>() / bits_here.len() as f64;
            if let Some(p) = prev_mean {
                if mean + 1e-9 < p {
                    monotone = false;
                }
            }
            prev_mean = Some(mean);
            n *= 2;
        }
        fitted_per_d.push((d, best));
    }
    let fitted_c = fitted_per_d.iter().map(|(_, c)| *c).fold(0f64, f64::max);
    Ok(ScalingReport {
        records,
        summary: ScalingSummary {
            fitted_per_d,
            fitted_c,
            c_max,
            within_bound: fitted_c <= c_max,
            monotone_in_n: monotone,
        },
    })
}
