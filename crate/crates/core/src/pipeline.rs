//! Sorted Neighborhood pipelines with per-block TSP ordering.
//!
//! * [`single_pass_local`]: block, order each block, concatenate, merge with w=2
//! * [`multi_pass`]: union of single passes over several (key, heuristic) pairs
//! * [`single_pass_global`]: polarity-aware ordering plus greedy adjacent
//!   swapping (GAS), keeping the best of the three resulting lists

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::exec::{try_map_indexed, Parallelism};
use crate::merge::{sn_merge, WindowConfig};
use crate::model::{
    BlockIndex, BlockingKeySpec, CandidateSet, Dataset, Locality, Pair, Record, RecordId, ScoringHeuristic,
};
use crate::ordering::{order_block_in_index, two_score};
use crate::tsp::TourSolver;

/// An SN list together with its block structure.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedRunTrace {
    pub list: Vec<RecordId>,
    /// `bounds[i]..bounds[i + 1]` is block `i`; `bounds.len() == u + 1`.
    pub bounds: Vec<usize>,
    pub bkvs: Vec<String>,
    /// Swaps applied by GAS, in order.
    pub swaps: Vec<GasSwap>,
}

impl OrderedRunTrace {
    pub fn num_blocks(&self) -> usize {
        self.bounds.len().saturating_sub(1)
    }

    pub fn block(&self, i: usize) -> &[RecordId] {
        &self.list[self.bounds[i]..self.bounds[i + 1]]
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.bounds.windows(2).map(|w| w[1] - w[0]).collect()
    }

    fn from_blocks(bkvs: Vec<String>, blocks: Vec<Vec<RecordId>>) -> Self {
        let mut bounds = vec![0];
        let mut list = Vec::with_capacity(blocks.iter().map(Vec::len).sum());
        for b in blocks {
            list.extend(b);
            bounds.push(list.len());
        }
        OrderedRunTrace {
            list,
            bounds,
            bkvs,
            swaps: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasSwap {
    pub block: usize,
    /// Boundary record before the swap.
    pub boundary: RecordId,
    /// Record moved to the boundary.
    pub promoted: RecordId,
    pub gain: f64,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnOutput {
    pub candidates: CandidateSet,
    pub trace: OrderedRunTrace,
    /// True when every block was ordered by an exact solver.
    pub all_blocks_optimal: bool,
}

fn w2() -> WindowConfig {
    WindowConfig::new(2).expect("2 is a valid window")
}

fn resolve<'a>(ds: &'a Dataset, ids: &[RecordId]) -> Result<Vec<&'a Record>> {
    ds.resolve(ids)
}

/// Candidate set of `list` under merge with w=2, scored with `f`.
fn merge_and_score(ds: &Dataset, list: &[RecordId], f: &ScoringHeuristic) -> Result<CandidateSet> {
    let mut cs = sn_merge(list, w2())?;
    cs.score = two_score(&resolve(ds, list)?, f)?;
    Ok(cs)
}

/// Orders every block with the TSP route. Returns canonical-polarity lists.
fn order_blocks(
    ds: &Dataset,
    index: &BlockIndex,
    f: &ScoringHeuristic,
    solver: &dyn TourSolver,
    par: Parallelism,
) -> Result<(Vec<Vec<RecordId>>, bool)> {
    let ordered = try_map_indexed(par, index.blocks(), |_, b| {
        let recs = resolve(ds, &b.ids)?;
        order_block_in_index(&recs, f, solver)
    })?;
    let optimal = ordered.iter().all(|o| o.optimal);
    Ok((ordered.into_iter().map(|o| o.list).collect(), optimal))
}

/// Single-pass SN for a local heuristic.
pub fn single_pass_local(
    ds: &Dataset,
    key: &BlockingKeySpec,
    f: &ScoringHeuristic,
    solver: &dyn TourSolver,
    par: Parallelism,
) -> Result<SnOutput> {
    if f.locality() != Locality::Local {
        return Err(Error::contract("single_pass_local requires a local scoring heuristic"));
    }
    let index = BlockIndex::build(ds.records(), key)?;
    let (lists, optimal) = order_blocks(ds, &index, f, solver, par)?;
    let bkvs = index.blocks().iter().map(|b| b.bkv.clone()).collect();
    let trace = OrderedRunTrace::from_blocks(bkvs, lists);
    Ok(SnOutput {
        candidates: merge_and_score(ds, &trace.list, f)?,
        trace,
        all_blocks_optimal: optimal,
    })
}

/// The `c` (key, heuristic) pairs of a multi-pass run. Pairs must be
/// distinct; keys or heuristics alone may repeat.
#[derive(Debug, Clone)]
pub struct PassSpec {
    passes: Vec<(BlockingKeySpec, ScoringHeuristic)>,
}

impl PassSpec {
    pub fn new(passes: Vec<(BlockingKeySpec, ScoringHeuristic)>) -> Result<Self> {
        if passes.is_empty() {
            return Err(Error::contract("multi-pass needs at least one pass"));
        }
        for (i, a) in passes.iter().enumerate() {
            if passes[..i].iter().any(|b| b == a) {
                return Err(Error::contract(format!(
                    "pass {i} repeats an earlier (key, heuristic) pair"
                )));
            }
        }
        Ok(PassSpec { passes })
    }

    pub fn passes(&self) -> &[(BlockingKeySpec, ScoringHeuristic)] {
        &self.passes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiPassOutput {
    /// Union of all passes; each pair maps to the passes that produced it.
    pub pairs: BTreeMap<Pair, BTreeSet<usize>>,
    pub per_pass: Vec<SnOutput>,
}

impl MultiPassOutput {
    pub fn candidates(&self) -> CandidateSet {
        CandidateSet::unscored(self.pairs.keys().copied())
    }
}

/// Multi-pass SN: one local single pass per (key, heuristic), unioned.
/// Scores are kept per pass and not summed across heuristics.
pub fn multi_pass(
    ds: &Dataset,
    passes: &PassSpec,
    solver: &dyn TourSolver,
    par: Parallelism,
) -> Result<MultiPassOutput> {
    let per_pass = try_map_indexed(par, passes.passes(), |_, (key, f)| {
        single_pass_local(ds, key, f, solver, par)
    })?;
    let mut pairs: BTreeMap<Pair, BTreeSet<usize>> = BTreeMap::new();
    for (i, out) in per_pass.iter().enumerate() {
        for p in &out.candidates.pairs {
            pairs.entry(*p).or_default().insert(i);
        }
    }
    Ok(MultiPassOutput { pairs, per_pass })
}

/// Chooses the reading of a block's cycle given the record `prev_tail` that
/// ends the previous block. `list` runs from endpoint `s1` to `s2`: it is
/// kept iff `f(s1, r) > f(s2, r)`, otherwise reversed. Without a previous
/// block the lower-id endpoint goes first.
pub fn select_polarity(prev_tail: Option<&Record>, list: &[&Record], f: &ScoringHeuristic) -> Result<Vec<RecordId>> {
    let mut ids: Vec<RecordId> = list.iter().map(|r| r.id).collect();
    if ids.len() < 2 {
        return Ok(ids);
    }
    let (s1, s2) = (list[0], list[list.len() - 1]);
    let keep = match prev_tail {
        None => s1.id < s2.id,
        Some(r) => f.score(s1, r)? > f.score(s2, r)?,
    };
    if !keep {
        ids.reverse();
    }
    Ok(ids)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GasDirection {
    /// Blocks 1..u-1 swap their last record toward the next block.
    Forward,
    /// Blocks u..2 swap their first record toward the previous block.
    Backward,
}

/// Memo of pair scores shared across GAS evaluations.
#[derive(Debug, Default)]
pub struct ScoreCache {
    memo: HashMap<Pair, f64>,
}

impl ScoreCache {
    pub fn score(&mut self, f: &ScoringHeuristic, a: &Record, b: &Record) -> Result<f64> {
        let key = Pair::new(a.id, b.id);
        if let Some(&s) = self.memo.get(&key) {
            return Ok(s);
        }
        let s = f.score(a, b)?;
        self.memo.insert(key, s);
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }
}

fn block_two_score(recs: &[&Record], f: &ScoringHeuristic, cache: &mut ScoreCache) -> Result<f64> {
    let mut s = 0.0;
    for e in recs.windows(2) {
        s += cache.score(f, e[0], e[1])?;
    }
    Ok(s)
}

/// One greedy adjacent swapping pass.
///
/// At each boundary, the record `r'` of the current block that scores
/// highest against the neighbouring block's boundary record `s` is swapped
/// into the boundary slot when `f(r',s) - f(r,s)` strictly exceeds the drop
/// in the block's own 2-score. Ties for `r'` keep `r` in place, otherwise
/// the earliest record in list order wins. Later steps see earlier swaps.
pub fn gas_pass(
    ds: &Dataset,
    trace: &OrderedRunTrace,
    f: &ScoringHeuristic,
    direction: GasDirection,
    cache: &mut ScoreCache,
) -> Result<OrderedRunTrace> {
    let mut out = trace.clone();
    let u = trace.num_blocks();
    if u < 2 {
        return Ok(out);
    }
    let steps: Vec<(usize, usize)> = match direction {
        GasDirection::Forward => (0..u - 1).map(|i| (i, i + 1)).collect(),
        GasDirection::Backward => (1..u).rev().map(|i| (i, i - 1)).collect(),
    };
    for (cur, nb) in steps {
        let (lo, hi) = (out.bounds[cur], out.bounds[cur + 1]);
        let slot = match direction {
            GasDirection::Forward => hi - 1,
            GasDirection::Backward => lo,
        };
        let s_id = match direction {
            GasDirection::Forward => out.list[out.bounds[nb]],
            GasDirection::Backward => out.list[out.bounds[nb + 1] - 1],
        };
        let block = resolve(ds, &out.list[lo..hi])?;
        let s = ds.get(s_id).expect("trace ids come from the dataset");
        let r = block[slot - lo];
        let base = cache.score(f, r, s)?;
        let mut best_pos = slot - lo;
        let mut best = base;
        for (p, cand) in block.iter().enumerate() {
            if p == slot - lo {
                continue;
            }
            let v = cache.score(f, cand, s)?;
            if v > best {
                best = v;
                best_pos = p;
            }
        }
        if best_pos == slot - lo {
            continue;
        }
        let mut swapped = block.clone();
        swapped.swap(best_pos, slot - lo);
        let loss = block_two_score(&block, f, cache)? - block_two_score(&swapped, f, cache)?;
        let gain = best - base;
        if gain > loss {
            out.swaps.push(GasSwap {
                block: cur,
                boundary: r.id,
                promoted: block[best_pos].id,
                gain,
                loss,
            });
            out.list.swap(lo + best_pos, slot);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalOutput {
    /// The highest-scoring of the three candidate sets.
    pub candidates: CandidateSet,
    /// 1, 2 or 3: which of Γ₁ (polarity list), Γ₂ (forward GAS),
    /// Γ₃ (backward GAS) was returned.
    pub chosen: u8,
    pub scores: [f64; 3],
    pub base: OrderedRunTrace,
    pub forward: OrderedRunTrace,
    pub backward: OrderedRunTrace,
    pub all_blocks_optimal: bool,
}

/// Single-pass SN for a global heuristic (w = 2).
pub fn single_pass_global(
    ds: &Dataset,
    key: &BlockingKeySpec,
    f: &ScoringHeuristic,
    solver: &dyn TourSolver,
    par: Parallelism,
) -> Result<GlobalOutput> {
    let index = BlockIndex::build(ds.records(), key)?;
    let (lists, optimal) = order_blocks(ds, &index, f, solver, par)?;
    let mut oriented = Vec::with_capacity(lists.len());
    let mut tail: Option<RecordId> = None;
    for l in &lists {
        let recs = resolve(ds, l)?;
        let prev = tail.map(|id| ds.get(id).expect("id from dataset"));
        let o = select_polarity(prev, &recs, f)?;
        tail = o.last().copied();
        oriented.push(o);
    }
    let bkvs = index.blocks().iter().map(|b| b.bkv.clone()).collect();
    let base = OrderedRunTrace::from_blocks(bkvs, oriented);
    let mut cache = ScoreCache::default();
    let forward = gas_pass(ds, &base, f, GasDirection::Forward, &mut cache)?;
    let backward = gas_pass(ds, &base, f, GasDirection::Backward, &mut cache)?;
    let sets = [
        merge_and_score(ds, &base.list, f)?,
        merge_and_score(ds, &forward.list, f)?,
        merge_and_score(ds, &backward.list, f)?,
    ];
    let scores = [sets[0].score, sets[1].score, sets[2].score];
    let mut chosen = 0;
    for i in 1..3 {
        if scores[i] > scores[chosen] {
            chosen = i;
        }
    }
    let [g1, g2, g3] = sets;
    let candidates = match chosen {
        0 => g1,
        1 => g2,
        _ => g3,
    };
    Ok(GlobalOutput {
        candidates,
        chosen: chosen as u8 + 1,
        scores,
        base,
        forward,
        backward,
        all_blocks_optimal: optimal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LookupTable;
    use crate::tsp::ExactSolver;

    fn table(entries: &[(u64, u64, f64)]) -> ScoringHeuristic {
        ScoringHeuristic::lookup(LookupTable::from_entries(entries.iter().copied()).unwrap())
    }

    fn ids(v: &[u64]) -> Vec<RecordId> {
        v.iter().map(|&i| RecordId(i)).collect()
    }

    #[test]
    fn polarity_rule() {
        let f = table(&[(1, 10, 3.0), (3, 10, 1.0)]);
        let (a, b, c, r) = (Record::bare(1), Record::bare(2), Record::bare(3), Record::bare(10));
        assert_eq!(select_polarity(Some(&r), &[&a, &b, &c], &f).unwrap(), ids(&[1, 2, 3]));
        assert_eq!(select_polarity(Some(&r), &[&c, &b, &a], &f).unwrap(), ids(&[1, 2, 3]));
        let even = table(&[(1, 10, 2.0), (3, 10, 2.0)]);
        assert_eq!(
            select_polarity(Some(&r), &[&a, &b, &c], &even).unwrap(),
            ids(&[3, 2, 1])
        );
        assert_eq!(select_polarity(None, &[&c, &b, &a], &f).unwrap(), ids(&[1, 2, 3]));
    }

    fn two_block_ds() -> Dataset {
        // attribute 0 is the BKV
        Dataset::new(vec![
            Record::new(1, ["a"]),
            Record::new(2, ["a"]),
            Record::new(3, ["a"]),
            Record::new(4, ["b"]),
            Record::new(5, ["b"]),
        ])
        .unwrap()
    }

    #[test]
    fn gas_is_identity_without_cross_scores() {
        let ds = two_block_ds();
        let f = table(&[(1, 2, 1.0), (2, 3, 2.0), (4, 5, 1.0)]);
        let key = BlockingKeySpec::Verbatim { attr: 0 };
        let out = single_pass_global(&ds, &key, &f, &ExactSolver::default(), Parallelism::Sequential).unwrap();
        assert_eq!(out.forward.list, out.base.list);
        assert_eq!(out.backward.list, out.base.list);
        assert_eq!(out.chosen, 1);
        let local = single_pass_local(
            &ds,
            &key,
            &f.clone().tagged(Locality::Local),
            &ExactSolver::default(),
            Parallelism::Sequential,
        )
        .unwrap();
        assert_eq!(out.candidates.score, local.candidates.score);
    }

    #[test]
    fn gas_keeps_boundary_when_already_best() {
        let ds = two_block_ds();
        // block a ordered 1-2-3 (or reverse); record 3 already the best partner of 4
        let f = table(&[(1, 2, 5.0), (2, 3, 5.0), (3, 4, 2.0), (1, 4, 1.0), (4, 5, 1.0)]);
        let trace = OrderedRunTrace::from_blocks(vec!["a".into(), "b".into()], vec![ids(&[1, 2, 3]), ids(&[4, 5])]);
        let mut cache = ScoreCache::default();
        let out = gas_pass(&ds, &trace, &f, GasDirection::Forward, &mut cache).unwrap();
        assert!(out.swaps.is_empty());
        assert_eq!(out.list, trace.list);
        assert!(!cache.is_empty());
    }

    #[test]
    fn gas_swaps_on_strict_gain_only() {
        let ds = two_block_ds();
        // swapping 1 and 3 in block a: local loss 0 (symmetric), gain 4-1=3
        let f = table(&[(1, 2, 2.0), (2, 3, 2.0), (1, 4, 4.0), (3, 4, 1.0)]);
        let trace = OrderedRunTrace::from_blocks(vec!["a".into(), "b".into()], vec![ids(&[1, 2, 3]), ids(&[4, 5])]);
        let mut cache = ScoreCache::default();
        let out = gas_pass(&ds, &trace, &f, GasDirection::Forward, &mut cache).unwrap();
        assert_eq!(out.list, ids(&[3, 2, 1, 4, 5]));
        assert_eq!(out.swaps.len(), 1);
        assert_eq!((out.swaps[0].gain, out.swaps[0].loss), (3.0, 0.0));
        // backward pass looks at block b's first record against record 3
        let back = gas_pass(&ds, &trace, &f, GasDirection::Backward, &mut cache).unwrap();
        assert_eq!(back.list, trace.list);
    }

    #[test]
    fn pass_spec_rejects_duplicates_and_empty() {
        let k = BlockingKeySpec::initials();
        let f = ScoringHeuristic::token_jaccard().localize(&k);
        assert!(PassSpec::new(vec![]).is_err());
        assert!(PassSpec::new(vec![(k.clone(), f.clone()), (k.clone(), f.clone())]).is_err());
        let g = ScoringHeuristic::cosine_tf().localize(&k);
        assert!(PassSpec::new(vec![(k.clone(), f), (k, g)]).is_ok());
    }

    #[test]
    fn local_pass_requires_local_heuristic() {
        let ds = two_block_ds();
        let err = single_pass_local(
            &ds,
            &BlockingKeySpec::Verbatim { attr: 0 },
            &ScoringHeuristic::token_jaccard(),
            &ExactSolver::default(),
            Parallelism::Sequential,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }
}
