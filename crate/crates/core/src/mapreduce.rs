//! Traditional blocking: each block is ordered and merged in isolation.
//!
//! [`run_mapreduce_blocking`] simulates the map/shuffle/reduce dataflow
//! in-process. Mappers compute BKVs over seeded shards, the shuffle groups
//! by BKV, and one logical reducer instance per BKV runs on a pool of
//! `num_reducers` workers. Output is canonically sorted, so it does not
//! depend on the configuration.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, try_map_indexed, with_workers, Parallelism};
use crate::merge::{candidate_size, sn_merge_pairs, WindowConfig};
use crate::model::{BlockIndex, BlockingKeySpec, CandidateSet, Dataset, Pair, Record, RecordId, ScoringHeuristic};
use crate::ordering::order_block_in_index;
use crate::tsp::{ApproxProfile, TourSolver};

/// The merge step run on one block's list alone.
pub fn block_merge(block_list: &[RecordId], w: WindowConfig) -> Result<Vec<Pair>> {
    sn_merge_pairs(block_list, w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredPair {
    pub score: f64,
    pub pair: Pair,
}

/// Score descending, then pair ascending.
pub fn canonical_cmp(a: &ScoredPair, b: &ScoredPair) -> Ordering {
    b.score.total_cmp(&a.score).then(a.pair.cmp(&b.pair))
}

/// Writes `score,id1,id2` lines.
pub fn write_scored_pairs<W: Write>(mut w: W, pairs: &[ScoredPair]) -> std::io::Result<()> {
    for p in pairs {
        writeln!(w, "{},{},{}", p.score, p.pair.lo(), p.pair.hi())?;
    }
    Ok(())
}

pub fn to_candidate_set(pairs: &[ScoredPair]) -> CandidateSet {
    let mut cs = CandidateSet::unscored(pairs.iter().map(|p| p.pair));
    cs.score = pairs.iter().map(|p| p.score).sum();
    cs
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapReduceConfig {
    /// h_m
    pub num_mappers: usize,
    pub num_reducers: usize,
    /// Shard assignment seed.
    pub seed: u64,
    pub parallelism: Parallelism,
}

impl MapReduceConfig {
    pub fn new(num_mappers: usize, num_reducers: usize, seed: u64) -> Result<Self> {
        let c = MapReduceConfig {
            num_mappers,
            num_reducers,
            seed,
            parallelism: Parallelism::default(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_mappers == 0 || self.num_reducers == 0 {
            return Err(Error::config("num_mappers and num_reducers must be at least 1"));
        }
        Ok(())
    }
}

/// One reducer instance, i.e. one block.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducerStat {
    pub bkv: String,
    pub size: usize,
    pub pairs: usize,
    /// Simulated cost, see [`reduce_cost`].
    pub cost: f64,
    /// 2-score of the ordered block.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapReduceOutput {
    /// Canonically sorted.
    pub pairs: Vec<ScoredPair>,
    /// In BKV order.
    pub reducers: Vec<ReducerStat>,
    pub mapper_loads: Vec<usize>,
    /// Simulated load of each worker after LPT scheduling.
    pub worker_loads: Vec<f64>,
    /// Largest mapper shard plus the most loaded reduce worker.
    pub critical_path: f64,
}

/// Abstract cost of one reducer: graph construction (s²), the tour solver
/// (s^q, or s²·2^s for exact solvers) and the merge (s).
pub fn reduce_cost(size: usize, profile: ApproxProfile) -> f64 {
    let s = size as f64;
    let solve = match profile.exponent {
        Some(q) => s.powi(q as i32),
        None => s * s * 2f64.powf(s),
    };
    s * s + solve + s
}

/// Longest-processing-time-first assignment; returns per-worker loads.
pub fn lpt_schedule(costs: &[f64], workers: usize) -> Vec<f64> {
    let mut order: Vec<usize> = (0..costs.len()).collect();
    order.sort_by(|&a, &b| costs[b].total_cmp(&costs[a]).then(a.cmp(&b)));
    let mut loads: Vec<f64> = vec![0.0; workers.max(1)];
    for i in order {
        let (w, _) = loads
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
            .expect("at least one worker");
        loads[w] += costs[i];
    }
    loads
}

struct Reduced {
    pairs: Vec<ScoredPair>,
    score: f64,
}

fn reduce_block(ds: &Dataset, ids: &[RecordId], f: &ScoringHeuristic, solver: &dyn TourSolver) -> Result<Reduced> {
    let recs: Vec<&Record> = ds.resolve(ids)?;
    let ordered = order_block_in_index(&recs, f, solver)?;
    let w = WindowConfig::new(2).expect("2 is a valid window");
    let mut pairs = Vec::new();
    for p in block_merge(&ordered.list, w)? {
        let (a, b) = (
            ds.get(p.lo()).expect("id in block"),
            ds.get(p.hi()).expect("id in block"),
        );
        pairs.push(ScoredPair {
            score: f.score_same_block(a, b)?,
            pair: p,
        });
    }
    Ok(Reduced {
        pairs,
        score: ordered.score,
    })
}

fn finish(mut pairs: Vec<ScoredPair>) -> Vec<ScoredPair> {
    pairs.sort_by(canonical_cmp);
    pairs
}

/// Serial traditional blocking: order each block in BKV order, block-merge
/// with w=2 and score the pairs. Cross-block pairs never appear, so the
/// result does not depend on whether `f` is local or global.
pub fn traditional_blocking(
    ds: &Dataset,
    key: &BlockingKeySpec,
    f: &ScoringHeuristic,
    solver: &dyn TourSolver,
) -> Result<Vec<ScoredPair>> {
    let index = BlockIndex::build(ds.records(), key)?;
    let mut all = Vec::new();
    for b in index.blocks() {
        all.extend(reduce_block(ds, &b.ids, f, solver)?.pairs);
    }
    Ok(finish(all))
}

/// Expected number of pairs from traditional blocking with w=2.
pub fn traditional_candidate_count(sizes: &[usize]) -> usize {
    sizes.iter().map(|&s| candidate_size(s, 2)).sum()
}

pub fn run_mapreduce_blocking(
    ds: &Dataset,
    key: &BlockingKeySpec,
    f: &ScoringHeuristic,
    config: &MapReduceConfig,
    solver: &dyn TourSolver,
) -> Result<MapReduceOutput> {
    config.validate()?;
    if ds.is_empty() {
        return Err(Error::contract("cannot block an empty dataset"));
    }
    let par = config.parallelism;

    // map: seeded shards, each emitting (BKV, id)
    let mut order: Vec<usize> = (0..ds.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let h = config.num_mappers;
    let shards: Vec<Vec<usize>> = (0..h)
        .map(|k| order.iter().copied().skip(k).step_by(h).collect())
        .collect();
    let mapper_loads: Vec<usize> = shards.iter().map(Vec::len).collect();
    let emitted = try_map_indexed(par, &shards, |_, shard| {
        shard
            .iter()
            .map(|&i| {
                let r = &ds.records()[i];
                key.apply(r).map(|bkv| (bkv, r.id))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    // shuffle
    let mut groups: BTreeMap<String, Vec<RecordId>> = BTreeMap::new();
    for (bkv, id) in emitted.into_iter().flatten() {
        groups.entry(bkv).or_default().push(id);
    }
    let groups: Vec<(String, Vec<RecordId>)> = groups
        .into_iter()
        .map(|(k, mut v)| {
            v.sort_unstable();
            (k, v)
        })
        .collect();

    // reduce
    let reduced = with_workers(par, config.num_reducers, || {
        map_indexed(par, &groups, |_, (_, ids)| reduce_block(ds, ids, f, solver))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let profile = solver.profile();
    let reducers: Vec<ReducerStat> = groups
        .iter()
        .zip(&reduced)
        .map(|((bkv, ids), r)| ReducerStat {
            bkv: bkv.clone(),
            size: ids.len(),
            pairs: r.pairs.len(),
            cost: reduce_cost(ids.len(), profile),
            score: r.score,
        })
        .collect();
    let costs: Vec<f64> = reducers.iter().map(|r| r.cost).collect();
    let worker_loads = lpt_schedule(&costs, config.num_reducers);
    let map_cost = mapper_loads.iter().copied().max().unwrap_or(0) as f64;
    let critical_path = map_cost + worker_loads.iter().copied().fold(0.0, f64::max);

    let pairs = finish(reduced.into_iter().flat_map(|r| r.pairs).collect());
    Ok(MapReduceOutput {
        pairs,
        reducers,
        mapper_loads,
        worker_loads,
        critical_path,
    })
}
