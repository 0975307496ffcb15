//! Instance generators behind the `gen` subcommand: hardness reductions
//! and random set/sample instances, emitted in the standard instance
//! JSON.

use crate::runner::{canonical_domain, random_realizable_samples, random_set_pair, PairKind};
use crate::{DomainShape, Task};
use anyhow::bail;
use csd_core::formats::InstanceFile;
use csd_core::hardness::{disj_to_csd_full, disj_to_promise_csd, DisjInstance};
use csd_core::scalar::Scalar;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What to generate.
#[derive(Clone, Debug)]
pub struct GenSpec {
    pub task: Task,
    pub shape: DomainShape,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub epsilon: Scalar,
    /// Hardness parameters.
    pub k: Option<usize>,
    pub c: Option<usize>,
    /// Hardness inputs as bit-packed integers (little-endian bits).
    pub x_bits: Option<u64>,
    pub y_bits: Option<u64>,
}

/// Produces one instance file.
pub fn generate_instance(spec: &GenSpec) -> anyhow::Result<InstanceFile> {
    match spec.task {
        Task::HardnessSweep => {
            let k = spec.k.unwrap_or(3);
            let c = spec.c.unwrap_or(1);
            let width = c * k;
            if width == 0 || width > 16 {
                bail!("need 1 <= c*k <= 16");
            }
            let xv = spec.x_bits.unwrap_or(spec.seed & ((1 << width) - 1));
            let yv = spec
                .y_bits
                .unwrap_or((spec.seed >> 16) & ((1 << width) - 1));
            let bits = |v: u64| (0..width).map(|i| v >> i & 1 == 1).collect::<Vec<bool>>();
            let inst = DisjInstance::new(bits(xv), bits(yv))?;
            let red = if c == 1 {
                disj_to_promise_csd(&inst)?
            } else {
                disj_to_csd_full(&inst, c, k)?
            };
            Ok(InstanceFile {
                domain: red.domain,
                alice_set: Some(red.alice.iter().collect()),
                bob_set: Some(red.bob.iter().collect()),
                alice_sample: None,
                bob_sample: None,
                epsilon: spec.epsilon.clone(),
                seed: spec.seed,
            })
        }
        Task::Containers => {
            let domain = canonical_domain(spec.shape, spec.d, spec.n)?;
            Ok(InstanceFile {
                domain,
                alice_set: None,
                bob_set: None,
                alice_sample: None,
                bob_sample: None,
                epsilon: spec.epsilon.clone(),
                seed: spec.seed,
            })
        }
        Task::Learn => {
            let domain = canonical_domain(spec.shape, spec.d, spec.n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let (sa, sb) = random_realizable_samples(&mut rng, &domain);
            Ok(InstanceFile {
                alice_sample: Some(sa.examples().to_vec()),
                bob_sample: Some(sb.examples().to_vec()),
                domain,
                alice_set: None,
                bob_set: None,
                epsilon: spec.epsilon.clone(),
                seed: spec.seed,
            })
        }
        Task::PromiseCsd | Task::Csd => {
            let domain = canonical_domain(spec.shape, spec.d, spec.n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let kind = if spec.task == Task::PromiseCsd {
                if spec.seed % 2 == 0 {
                    PairKind::Separated
                } else {
                    PairKind::Shared
                }
            } else {
                PairKind::Free
            };
            let (x, y) = random_set_pair(&mut rng, &domain, kind);
            Ok(InstanceFile {
                domain,
                alice_set: Some(x.iter().collect()),
                bob_set: Some(y.iter().collect()),
                alice_sample: None,
                bob_sample: None,
                epsilon: spec.epsilon.clone(),
                seed: spec.seed,
            })
        }
        Task::BvtCheck => bail!("bvt-check does not use instance files"),
    }
}
