//! Shared domain types: records, blocking keys, scoring heuristics, the
//! block index and candidate sets.

mod block;
mod candidates;
mod heuristic;
mod key;
mod record;

pub use block::{Block, BlockIndex};
pub use candidates::{CandidateSet, Pair};
pub use heuristic::{HeuristicKind, Locality, LookupTable, ScoringHeuristic};
pub use key::BlockingKeySpec;
pub use record::{tokens, Dataset, Record, RecordId};

use crate::Result;

/// Applies `spec` to one record. Thin wrapper kept for symmetry with the
/// other free-function entry points.
pub fn apply_blocking_key(record: &Record, spec: &BlockingKeySpec) -> Result<String> {
    spec.apply(record)
}

pub fn score_pair(f: &ScoringHeuristic, r: &Record, s: &Record) -> Result<f64> {
    f.score(r, s)
}

pub fn localize(f: &ScoringHeuristic, key: &BlockingKeySpec) -> ScoringHeuristic {
    f.localize(key)
}

pub fn build_block_index(records: &[Record], spec: &BlockingKeySpec) -> Result<BlockIndex> {
    BlockIndex::build(records, spec)
}
