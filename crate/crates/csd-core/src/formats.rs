//! Wire formats: the instance and outcome JSON schemas used by the CLI
//! and by anything that wants to drive the protocols from files.
//!
//! Scalars serialize as lowest-terms `"p/q"` strings, points as flat
//! coordinate arrays, point sets as index arrays, so files are bit-exact
//! and diff-stable.

use crate::geom::{Domain, PointSet};
use crate::protocols::{ProtocolOutcome, Sample};
use crate::scalar::Scalar;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// An instance file: a domain plus either plain sets (disjointness
/// tasks) or labeled samples (learning), with the protocol parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub domain: Domain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alice_set: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bob_set: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alice_sample: Option<Vec<(usize, i8)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bob_sample: Option<Vec<(usize, i8)>>,
    #[serde(default = "default_epsilon")]
    pub epsilon: Scalar,
    #[serde(default)]
    pub seed: u64,
}

fn default_epsilon() -> Scalar {
    Scalar::ratio(1, 4)
}

impl InstanceFile {
    pub fn sets(&self) -> Result<(PointSet, PointSet)> {
        let a = self
            .alice_set
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("instance lacks alice_set".into()))?;
        let b = self
            .bob_set
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("instance lacks bob_set".into()))?;
        let a = PointSet::new(a.clone());
        let b = PointSet::new(b.clone());
        a.validate(&self.domain)?;
        b.validate(&self.domain)?;
        Ok((a, b))
    }

    pub fn samples(&self) -> Result<(Sample, Sample)> {
        let a = self
            .alice_sample
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("instance lacks alice_sample".into()))?;
        let b = self
            .bob_sample
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("instance lacks bob_sample".into()))?;
        Ok((Sample::new(a.clone())?, Sample::new(b.clone())?))
    }
}

/// An outcome file: the decision, the optional labeling, and the exact
/// communication accounting.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OutcomeFile {
    pub decision: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<i8>>,
    pub bits: usize,
    pub rounds: usize,
    pub round_payload_bits: Vec<usize>,
}

impl OutcomeFile {
    pub fn from_outcome(out: &ProtocolOutcome) -> Self {
        OutcomeFile {
            decision: out.decision,
            h: out.labeling.clone(),
            bits: out.transcript.total_bits(),
            rounds: out.rounds.len(),
            round_payload_bits: out.rounds.iter().map(|r| r.bits).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{run_promise_csd, ProtocolConfig};

    #[test]
    fn instance_round_trip() {
        let inst = InstanceFile {
            domain: Domain::parabola(4).unwrap(),
            alice_set: Some(vec![0, 1]),
            bob_set: Some(vec![3]),
            alice_sample: None,
            bob_sample: None,
            epsilon: Scalar::ratio(1, 4),
            seed: 7,
        };
        let js = serde_json::to_string_pretty(&inst).unwrap();
        let back: InstanceFile = serde_json::from_str(&js).unwrap();
        assert_eq!(back.domain, inst.domain);
        assert_eq!(back.sets().unwrap(), inst.sets().unwrap());
        // Points are flat arrays of strings.
        assert!(js.contains("\"9\""));
    }

    #[test]
    fn malformed_domain_rejected() {
        // A duplicate point fails validation during deserialization.
        let js = r#"{"domain":{"dim":1,"points":[["0"],["0"]]},"alice_set":[0],"bob_set":[1]}"#;
        assert!(serde_json::from_str::<InstanceFile>(js).is_err());
    }

    #[test]
    fn outcome_capture() {
        let d = Domain::line(&[0, 1, 2, 3]).unwrap();
        let out = run_promise_csd(
            &d,
            &PointSet::new(vec![0]),
            &PointSet::new(vec![3]),
            &ProtocolConfig::default(),
        )
        .unwrap();
        let f = OutcomeFile::from_outcome(&out);
        assert_eq!(f.decision, 1);
        assert_eq!(f.bits, out.transcript.total_bits());
        assert_eq!(f.rounds, f.round_payload_bits.len());
        let js = serde_json::to_string(&f).unwrap();
        let back: OutcomeFile = serde_json::from_str(&js).unwrap();
        assert_eq!(back, f);
    }
}
