//! Run records and their fixed-format outputs.

use csd_core::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// The fixed CSV schema.
pub const CSV_HEADER: &str = "instance_id,n,d,eps,decision,oracle,bits,rounds,time_ms";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// One instance's outcome. `decision`/`oracle` are task-dependent bits
/// (absent when not applicable); `flagged` marks an oracle disagreement
/// or a failed internal check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub n: usize,
    pub d: usize,
    pub eps: Scalar,
    pub decision: Option<u8>,
    pub oracle: Option<u8>,
    pub bits: usize,
    pub rounds: usize,
    /// Container-family sizes per protocol round (or the single family
    /// size for container builds).
    pub family_sizes: Vec<usize>,
    pub time_ms: u128,
    pub flagged: bool,
    /// The offending instance, serialized, when flagged.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl RunRecord {
    pub fn csv_row(&self) -> String {
        let opt = |v: &Option<u8>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.instance_id,
            self.n,
            self.d,
            self.eps,
            opt(&self.decision),
            opt(&self.oracle),
            self.bits,
            self.rounds,
            self.time_ms
        )
    }
}

/// Writes records (sorted by instance id) in the chosen format; `None`
/// path means stdout.
pub fn write_records(
    records: &[RunRecord],
    format: OutputFormat,
    path: Option<&Path>,
) -> std::io::Result<()> {
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
    let body = match format {
        OutputFormat::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for r in &sorted {
                s.push_str(&r.csv_row());
                s.push('\n');
            }
            s
        }
        OutputFormat::Json => {
            let owned: Vec<&RunRecord> = sorted;
            let mut s = serde_json::to_string_pretty(&owned).expect("serializable records");
            s.push('\n');
            s
        }
    };
    match path {
        Some(p) => std::fs::write(p, body),
        None => std::io::stdout().write_all(body.as_bytes()),
    }
}
