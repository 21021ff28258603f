//! The SN merge step: slide a window of `w` records over an ordered list and
//! pair co-windowed records.
//!
//! The final window is special-cased: every record in it is paired with
//! every other, so the candidate count is exactly
//! `(n - w)(w - 1) + w(w - 1)/2` for `n > w`.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::model::{CandidateSet, Pair, Record, RecordId, ScoringHeuristic};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowConfig {
    w: usize,
}

impl WindowConfig {
    pub fn new(w: usize) -> Result<Self> {
        if w < 2 {
            return Err(Error::config(format!("window size must be at least 2, got {w}")));
        }
        Ok(WindowConfig { w })
    }

    pub fn size(self) -> usize {
        self.w
    }
}

/// Position pairs `(i, j)`, `i < j`, emitted by the merge step on a list of
/// length `n`, in emission order.
pub fn window_positions(n: usize, w: usize) -> impl Iterator<Item = (usize, usize)> {
    debug_assert!(w >= 2);
    let all_pairs = n <= w;
    let steps = if all_pairs { 0 } else { n - w + 1 };
    let sliding = (0..steps).flat_map(move |i| ((i + 1)..(i + w)).map(move |j| (i, j)));
    // final window tail (or the whole list when n <= w)
    let tail_start = if all_pairs { 0 } else { n - w + 1 };
    let tail = (tail_start..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)));
    sliding.chain(tail)
}

/// Runs the merge step on an ordered id list and returns the pairs in
/// emission order.
pub fn sn_merge_pairs(list: &[RecordId], w: WindowConfig) -> Result<Vec<Pair>> {
    let mut seen = HashSet::with_capacity(list.len());
    if let Some(dup) = list.iter().find(|id| !seen.insert(**id)) {
        return Err(Error::contract(format!("record {dup} appears twice in the list")));
    }
    Ok(window_positions(list.len(), w.size())
        .map(|(i, j)| Pair::new(list[i], list[j]))
        .collect())
}

/// Merge step returning an unscored candidate set.
pub fn sn_merge(list: &[RecordId], w: WindowConfig) -> Result<CandidateSet> {
    Ok(CandidateSet::unscored(sn_merge_pairs(list, w)?))
}

/// Sum of `f` over the pairs the merge step emits from `list`.
pub fn w_score(list: &[&Record], w: WindowConfig, f: &ScoringHeuristic) -> Result<f64> {
    let scores = window_positions(list.len(), w.size())
        .map(|(i, j)| f.score(list[i], list[j]))
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&scores))
}

/// Like [`w_score`] over a dense score matrix indexed by list entries.
pub fn w_score_indexed<S>(list: &[usize], w: usize, score: impl Fn(usize, usize) -> S) -> S
where
    S: Copy + Default + std::ops::Add<Output = S>,
{
    window_positions(list.len(), w).fold(S::default(), |acc, (i, j)| acc + score(list[i], list[j]))
}

/// `|Γ|` for a list of `n` records and window `w`.
pub fn candidate_size(n: usize, w: usize) -> usize {
    if n <= w {
        n * n.saturating_sub(1) / 2
    } else {
        (n - w) * (w - 1) + w * (w - 1) / 2
    }
}

/// Recursive pairwise summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LookupTable;
    use proptest::prelude::*;

    fn ids(v: &[u64]) -> Vec<RecordId> {
        v.iter().map(|&i| RecordId(i)).collect()
    }

    #[test]
    fn seven_records_window_three_and_two() {
        let list = ids(&[1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(sn_merge(&list, WindowConfig::new(3).unwrap()).unwrap().len(), 11);
        let two = sn_merge_pairs(&list, WindowConfig::new(2).unwrap()).unwrap();
        let expect: Vec<Pair> = (1..7).map(|i| Pair::new(RecordId(i), RecordId(i + 1))).collect();
        assert_eq!(two, expect);
    }

    #[test]
    fn short_list_pairs_everything() {
        let list = ids(&[9, 4]);
        let cs = sn_merge(&list, WindowConfig::new(5).unwrap()).unwrap();
        assert_eq!(
            cs.pairs.into_iter().collect::<Vec<_>>(),
            vec![Pair::new(RecordId(4), RecordId(9))]
        );
        assert!(sn_merge(&ids(&[1]), WindowConfig::new(2).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn window_below_two_is_rejected() {
        assert!(matches!(WindowConfig::new(1), Err(Error::Config(_))));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        assert!(sn_merge(&ids(&[1, 2, 1]), WindowConfig::new(2).unwrap()).is_err());
    }

    #[test]
    fn size_formula_values() {
        assert_eq!(candidate_size(7, 3), 11);
        assert_eq!(candidate_size(7, 2), 6);
        for w in 2..10 {
            assert_eq!(candidate_size(w, w), w * (w - 1) / 2);
        }
        assert_eq!(candidate_size(1, 2), 0);
    }

    #[test]
    fn w_score_trivial_cases() {
        let f = ScoringHeuristic::lookup(LookupTable::from_entries([(1u64, 2u64, 0.75)]).unwrap());
        let (a, b) = (Record::bare(1), Record::bare(2));
        let w2 = WindowConfig::new(2).unwrap();
        assert_eq!(w_score(&[&a], w2, &f).unwrap(), 0.0);
        assert_eq!(w_score(&[&a, &b], w2, &f).unwrap(), 0.75);
        assert_eq!(w_score(&[&b, &a], WindowConfig::new(6).unwrap(), &f).unwrap(), 0.75);
    }

    #[test]
    fn w_score_matches_adjacent_resummation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut table = LookupTable::new();
        for i in 0..6u64 {
            for j in (i + 1)..6 {
                table.insert(i, j, rng.gen_range(0..40) as f64 / 4.0).unwrap();
            }
        }
        let recs: Vec<Record> = [3u64, 0, 5, 1, 4, 2].iter().map(|&i| Record::bare(i)).collect();
        let list: Vec<&Record> = recs.iter().collect();
        let mut oracle = 0.0;
        for k in 0..5 {
            oracle += table.get(recs[k].id, recs[k + 1].id);
        }
        let f = ScoringHeuristic::lookup(table);
        assert_eq!(w_score(&list, WindowConfig::new(2).unwrap(), &f).unwrap(), oracle);
    }

    proptest! {
        #[test]
        fn merge_size_matches_formula(n in 1usize..=60, w in 2usize..=8) {
            let list: Vec<RecordId> = (0..n as u64).map(RecordId).collect();
            let pairs = sn_merge_pairs(&list, WindowConfig::new(w).unwrap()).unwrap();
            let set: HashSet<Pair> = pairs.iter().copied().collect();
            prop_assert_eq!(set.len(), pairs.len());
            prop_assert_eq!(pairs.len(), candidate_size(n, w));
        }

        #[test]
        fn every_pair_shares_a_window(n in 1usize..=40, w in 2usize..=8) {
            for (i, j) in window_positions(n, w) {
                prop_assert!(j - i < w);
                prop_assert!(i < j && j < n);
            }
        }

        #[test]
        fn two_score_is_reversal_invariant(scores in proptest::collection::vec(0u32..50, 28)) {
            // dense 8x8 upper triangle
            let mut table = LookupTable::new();
            let mut k = 0;
            for i in 0..8u64 { for j in (i+1)..8 { table.insert(i, j, scores[k] as f64).unwrap(); k += 1; } }
            let f = ScoringHeuristic::lookup(table);
            let recs: Vec<Record> = (0..8).map(Record::bare).collect();
            let fwd: Vec<&Record> = recs.iter().collect();
            let rev: Vec<&Record> = recs.iter().rev().collect();
            let w2 = WindowConfig::new(2).unwrap();
            prop_assert_eq!(w_score(&fwd, w2, &f).unwrap(), w_score(&rev, w2, &f).unwrap());
        }
    }
}
