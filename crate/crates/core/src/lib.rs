//! Blocking for record linkage built around Sorted Neighborhood (SN) and
//! traditional blocking.
//!
//! Each block is ordered so that the window merge step collects the highest
//! total heuristic score ("maximum-score 2-ordering"). Ordering a block
//! exactly is NP-complete, so the pipelines reduce it to max tour-TSP and
//! run either an exact Held-Karp oracle or a greedy 1/2-approximation.
//!
//! Module map:
//!
//! * [`model`]: records, blocking keys, scoring heuristics, block index, candidate sets
//! * [`merge`]: the sliding-window merge step and w-score
//! * [`tsp`]: max tour-TSP solvers and the records/graph/tour conversions
//! * [`ordering`]: single-block 2-ordering (brute force, decision, TSP route)
//! * [`pipeline`]: single-pass, multi-pass and global-heuristic SN
//! * [`mapreduce`]: traditional blocking and the simulated map/shuffle/reduce run
//! * [`reductions`]: executable Karp reductions and their brute-force verifiers
//! * [`workbench`]: synthetic data, metrics, config/report files and benchmarks

// dense symmetric matrices read best with explicit (i, j) loops
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod exec;
pub mod mapreduce;
pub mod merge;
pub mod model;
pub mod ordering;
pub mod pipeline;
pub mod reductions;
pub mod tsp;
pub mod workbench;

pub use error::{Error, Result};
pub use exec::Parallelism;
pub use merge::{candidate_size, sn_merge, w_score, WindowConfig};
pub use model::{
    BlockIndex, BlockingKeySpec, CandidateSet, Dataset, Locality, Pair, Record, RecordId, ScoringHeuristic,
};
pub use ordering::OrderingResult;
pub use tsp::{ApproxProfile, AutoSolver, ExactSolver, GreedySolver, Tour, TourSolver, TspGraph};
