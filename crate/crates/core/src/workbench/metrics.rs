use std::collections::BTreeSet;
use std::io::Write;

use crate::error::{Error, Result};
use crate::model::{CandidateSet, Pair};

/// Known true-match pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub pairs: BTreeSet<Pair>,
}

impl GroundTruth {
    pub fn new(pairs: impl IntoIterator<Item = Pair>) -> Self {
        GroundTruth {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Same `id1,id2` format as candidate files.
    pub fn parse(text: &str) -> Result<Self> {
        Ok(GroundTruth {
            pairs: CandidateSet::parse_pairs(text)?,
        })
    }

    pub fn write<W: Write>(&self, w: W) -> std::io::Result<()> {
        CandidateSet::unscored(self.pairs.iter().copied()).write_pairs(w)
    }
}

fn hits(candidates: &CandidateSet, truth: &GroundTruth) -> usize {
    candidates.pairs.iter().filter(|p| truth.pairs.contains(p)).count()
}

/// Pairs completeness as |Γ ∩ truth| / |Γ|.
pub fn pairs_completeness(candidates: &CandidateSet, truth: &GroundTruth) -> Result<f64> {
    if candidates.is_empty() {
        return Err(Error::UndefinedMetric(
            "pairs completeness of an empty candidate set".into(),
        ));
    }
    Ok(hits(candidates, truth) as f64 / candidates.len() as f64)
}

/// |Γ ∩ truth| / |truth|, the usual blocking recall.
pub fn recall(candidates: &CandidateSet, truth: &GroundTruth) -> Result<f64> {
    if truth.is_empty() {
        return Err(Error::UndefinedMetric("recall against an empty ground truth".into()));
    }
    Ok(hits(candidates, truth) as f64 / truth.len() as f64)
}
