//! Experiment harness: runs protocol instances and sweeps, verifies
//! decisions against brute-force oracles, and emits machine-readable
//! tables (fixed-column CSV or JSON).

mod generate;
mod records;
mod runner;
mod scaling;

pub use generate::{generate_instance, GenSpec};
pub use records::{write_records, OutputFormat, RunRecord, CSV_HEADER};
pub use runner::{run_experiment, ExperimentReport};
pub use scaling::{bits_scaling_report, ScalingReport, ScalingSummary};

use csd_core::containers::NetMode;
use csd_core::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// What an experiment runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    PromiseCsd,
    Csd,
    Learn,
    Containers,
    HardnessSweep,
    BvtCheck,
}

/// Canonical generated-domain shapes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DomainShape {
    /// Collinear integer points (d = 1).
    Line,
    /// The planar parabola (d = 2).
    Parabola,
    /// The k x k integer grid (d = 2, n rounded down to a square).
    Grid,
    /// The moment curve (t, t^2, .., t^d) for d >= 3.
    Moment,
}

/// Resource caps; overridable through `CSD_MAX_N`, `CSD_MAX_D`,
/// `CSD_MAX_FAMILY`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub max_n: usize,
    pub max_d: usize,
    pub max_family: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_n: 512,
            max_d: 8,
            max_family: 1_000_000,
        }
    }
}

impl Caps {
    pub fn from_env() -> Self {
        let mut caps = Caps::default();
        if let Some(v) = env_usize("CSD_MAX_N") {
            caps.max_n = v;
        }
        if let Some(v) = env_usize("CSD_MAX_D") {
            caps.max_d = v;
        }
        if let Some(v) = env_usize("CSD_MAX_FAMILY") {
            caps.max_family = v;
        }
        caps
    }
}

fn env_usize(key: &str) -> Option<usize> {
    std::env::var(key).ok().and_then(|v| v.parse().ok())
}

/// Which net construction the protocol config uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum NetChoice {
    Full,
    Sampled,
    Exact,
}

impl NetChoice {
    pub fn to_mode(self, seed: u64, caps: &Caps) -> NetMode {
        match self {
            NetChoice::Full => NetMode::Full,
            NetChoice::Sampled => NetMode::Sampled { c0: 1, seed },
            NetChoice::Exact => NetMode::Exact { cap: caps.max_n },
        }
    }
}

/// Where instances come from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceSource {
    /// One instance JSON file.
    File(PathBuf),
    /// Seeded generation on a canonical domain.
    Generated {
        shape: DomainShape,
        n: usize,
        d: usize,
        count: usize,
    },
}

/// Full experiment configuration; a fixed seed makes the run (and its
/// output bytes) reproducible.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub task: Task,
    pub source: InstanceSource,
    pub epsilon: Scalar,
    pub seed: u64,
    pub caps: Caps,
    pub net: NetChoice,
    pub verify: bool,
    /// Record wall time; off by default so outputs stay byte-identical.
    pub timing: bool,
    /// Block length for the hardness sweep.
    pub k: Option<usize>,
    /// Block count for the hardness sweep.
    pub c: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(task: Task, source: InstanceSource) -> Self {
        ExperimentConfig {
            task,
            source,
            epsilon: Scalar::ratio(1, 4),
            seed: 0,
            caps: Caps::from_env(),
            net: NetChoice::Full,
            verify: true,
            timing: false,
            k: None,
            c: None,
        }
    }
}
