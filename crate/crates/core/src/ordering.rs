//! Maximum-score 2-ordering of one block.

use crate::error::{Error, Result};
use crate::merge::{w_score, WindowConfig};
use crate::model::{Record, RecordId, ScoringHeuristic};
use crate::tsp::{block_to_graph, records_to_graph, tour_to_list, Polarity, TourSolver, TspGraph};

/// Largest block the exhaustive oracle accepts (9!/2 lists).
pub const BRUTE_FORCE_BUDGET: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingResult {
    pub list: Vec<RecordId>,
    /// 2-score of `list`.
    pub score: f64,
    /// True when produced by exhaustive search or an exact solver.
    pub optimal: bool,
}

pub fn two_score(list: &[&Record], f: &ScoringHeuristic) -> Result<f64> {
    w_score(list, WindowConfig::new(2).expect("2 is a valid window"), f)
}

/// Exhaustive search over all orderings of `block`. Among optimal lists the
/// lexicographically smallest id sequence wins.
pub fn brute_force_best_2_ordering(block: &[&Record], f: &ScoringHeuristic) -> Result<OrderingResult> {
    let m = block.len();
    if m > BRUTE_FORCE_BUDGET {
        return Err(Error::Capacity {
            what: "brute-force 2-ordering block",
            size: m,
            budget: BRUTE_FORCE_BUDGET,
        });
    }
    if m == 0 {
        return Err(Error::contract("cannot order an empty block"));
    }
    let mut sorted: Vec<&Record> = block.to_vec();
    sorted.sort_by_key(|r| r.id);
    let mut score = vec![0.0; m * m];
    for i in 0..m {
        for j in (i + 1)..m {
            let s = f.score(sorted[i], sorted[j])?;
            score[i * m + j] = s;
            score[j * m + i] = s;
        }
    }
    let mut perm: Vec<usize> = (0..m).collect();
    let mut best_perm = perm.clone();
    let mut best = f64::NEG_INFINITY;
    loop {
        // a list and its reverse score the same; keep the one starting lower
        if perm[0] <= perm[m - 1] {
            let s: f64 = perm.windows(2).map(|e| score[e[0] * m + e[1]]).sum();
            if s > best {
                best = s;
                best_perm.clone_from(&perm);
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let list: Vec<&Record> = best_perm.iter().map(|&i| sorted[i]).collect();
    Ok(OrderingResult {
        score: two_score(&list, f)?,
        list: list.iter().map(|r| r.id).collect(),
        optimal: true,
    })
}

/// True iff some ordering of `block` has 2-score at least `k`.
pub fn decide_2_ordering(block: &[&Record], f: &ScoringHeuristic, k: f64) -> Result<bool> {
    Ok(brute_force_best_2_ordering(block, f)?.score >= k)
}

/// Orders a block through the dummy-vertex max tour-TSP construction.
pub fn order_block_tsp(block: &[&Record], f: &ScoringHeuristic, solver: &dyn TourSolver) -> Result<OrderingResult> {
    let g = records_to_graph(block, f, true)?;
    finish_ordering(block, f, solver, &g)
}

/// [`order_block_tsp`] for a block whose records share one BKV.
pub(crate) fn order_block_in_index(
    block: &[&Record],
    f: &ScoringHeuristic,
    solver: &dyn TourSolver,
) -> Result<OrderingResult> {
    let g = block_to_graph(block, f)?;
    finish_ordering(block, f, solver, &g)
}

fn finish_ordering(
    block: &[&Record],
    f: &ScoringHeuristic,
    solver: &dyn TourSolver,
    g: &TspGraph,
) -> Result<OrderingResult> {
    let tour = solver.solve(g)?;
    let list = tour_to_list(&tour, g, Polarity::Canonical)?;
    let by_id = |id: RecordId| *block.iter().find(|r| r.id == id).expect("id came from this block");
    let records: Vec<&Record> = list.iter().map(|&id| by_id(id)).collect();
    Ok(OrderingResult {
        score: two_score(&records, f)?,
        list,
        optimal: solver.is_exact_for(g),
    })
}

/// Rearranges `v` into the next lexicographic permutation; false at the last.
pub(crate) fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
