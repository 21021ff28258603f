//! Max tour-TSP as a black box for block ordering.
//!
//! A block becomes a complete graph (one vertex per record plus a
//! zero-weight dummy vertex), a solver returns a heavy Hamiltonian cycle,
//! and cutting the cycle at the dummy yields a record list whose 2-score
//! equals the tour weight.

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::model::{Record, RecordId, ScoringHeuristic};

/// Complete undirected graph with symmetric non-negative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TspGraph {
    n: usize,
    weights: Vec<f64>,
    dummy: Option<usize>,
    vertex_to_record: Option<Vec<RecordId>>,
}

impl TspGraph {
    /// Builds a graph from a full symmetric matrix.
    pub fn from_matrix(m: &[Vec<f64>]) -> Result<Self> {
        let n = m.len();
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            if m[i].len() != n {
                return Err(Error::contract("weight matrix must be square"));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let w = m[i][j];
                if w != m[j][i] {
                    return Err(Error::contract(format!("weights not symmetric at ({i},{j})")));
                }
                if !(w >= 0.0 && w.is_finite()) {
                    return Err(Error::contract(format!(
                        "weight ({i},{j}) must be finite and non-negative"
                    )));
                }
                weights[i * n + j] = w;
            }
        }
        Ok(TspGraph {
            n,
            weights,
            dummy: None,
            vertex_to_record: None,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn dummy(&self) -> Option<usize> {
        self.dummy
    }

    /// Number of vertices that stand for records.
    pub fn num_records(&self) -> usize {
        self.n - usize::from(self.dummy.is_some())
    }

    pub fn record_of(&self, v: usize) -> Option<RecordId> {
        self.vertex_to_record.as_ref().and_then(|m| m.get(v).copied())
    }

    /// First triangle `(i, j, k)` with `w(i,j) > w(i,k) + w(k,j)`, if any.
    pub fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                for k in 0..self.n {
                    if k != i && k != j && self.weight(i, j) > self.weight(i, k) + self.weight(k, j) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// Parses `i j weight` lines over vertices `0..n`. Missing edges weigh
    /// 0; `#` starts a comment line.
    pub fn read_edges(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut n = 0;
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: k + 1, msg };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(err(format!("expected `i j weight`, got `{line}`")));
            }
            let i: usize = f[0].parse().map_err(|e| err(format!("{e}")))?;
            let j: usize = f[1].parse().map_err(|e| err(format!("{e}")))?;
            let w: f64 = f[2].parse().map_err(|e| err(format!("{e}")))?;
            if i == j {
                return Err(err(format!("self-loop on vertex {i}")));
            }
            n = n.max(i + 1).max(j + 1);
            edges.push((k + 1, i, j, w));
        }
        let mut m = vec![vec![0.0; n]; n];
        let mut seen = vec![vec![false; n]; n];
        for (line, i, j, w) in edges {
            if seen[i][j] && m[i][j] != w {
                return Err(Error::Parse {
                    line,
                    msg: format!("conflicting weights for edge ({i},{j})"),
                });
            }
            seen[i][j] = true;
            seen[j][i] = true;
            m[i][j] = w;
            m[j][i] = w;
        }
        TspGraph::from_matrix(&m)
    }

    /// `i j weight` per undirected edge.
    pub fn write_edges<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                writeln!(w, "{i} {j} {}", self.weight(i, j))?;
            }
        }
        Ok(())
    }
}

/// Vertex `i` is `block[i]`; with `with_dummy` an extra last vertex with
/// all-zero edges is appended.
pub fn records_to_graph(block: &[&Record], f: &ScoringHeuristic, with_dummy: bool) -> Result<TspGraph> {
    build_graph(block, with_dummy, |a, b| f.score(a, b))
}

/// Same as [`records_to_graph`] for records known to share one BKV.
pub(crate) fn block_to_graph(block: &[&Record], f: &ScoringHeuristic) -> Result<TspGraph> {
    build_graph(block, true, |a, b| f.score_same_block(a, b))
}

fn build_graph(
    block: &[&Record],
    with_dummy: bool,
    score: impl Fn(&Record, &Record) -> Result<f64>,
) -> Result<TspGraph> {
    if block.is_empty() {
        return Err(Error::contract("cannot build a graph from an empty block"));
    }
    let m = block.len();
    let n = m + usize::from(with_dummy);
    let mut weights = vec![0.0; n * n];
    for i in 0..m {
        for j in (i + 1)..m {
            let s = score(block[i], block[j])?;
            weights[i * n + j] = s;
            weights[j * n + i] = s;
        }
    }
    Ok(TspGraph {
        n,
        weights,
        dummy: with_dummy.then_some(m),
        vertex_to_record: Some(block.iter().map(|r| r.id).collect()),
    })
}

/// A Hamiltonian cycle given as a vertex sequence; the closing edge is
/// implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour {
    pub order: Vec<usize>,
}

impl Tour {
    pub fn weight(&self, g: &TspGraph) -> f64 {
        let k = self.order.len();
        if k < 2 {
            return 0.0;
        }
        let closing = if k > 2 {
            g.weight(self.order[k - 1], self.order[0])
        } else {
            0.0
        };
        self.order.windows(2).map(|e| g.weight(e[0], e[1])).sum::<f64>() + closing
    }

    pub fn is_hamiltonian(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        self.order.len() == n
            && self
                .order
                .iter()
                .all(|&v| v < n && !std::mem::replace(&mut seen[v], true))
    }

    pub fn reversed(&self) -> Tour {
        Tour {
            order: self.order.iter().rev().copied().collect(),
        }
    }
}

/// Declared quality of a solver: weight ≥ ratio · optimum, run time
/// O(n^exponent). `exponent` is `None` for exponential-time solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApproxProfile {
    pub ratio_num: u32,
    pub ratio_den: u32,
    pub exponent: Option<u32>,
}

impl ApproxProfile {
    pub fn ratio(&self) -> f64 {
        f64::from(self.ratio_num) / f64::from(self.ratio_den)
    }

    pub fn is_exact(&self) -> bool {
        self.ratio_num == self.ratio_den
    }
}

impl fmt::Display for ApproxProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rho={}/{}", self.ratio_num, self.ratio_den)?;
        match self.exponent {
            Some(q) => write!(f, " q={q}"),
            None => write!(f, " q=exp"),
        }
    }
}

/// Any max tour-TSP routine with a declared approximation profile.
pub trait TourSolver: Sync + Send {
    fn name(&self) -> &'static str;
    fn profile(&self) -> ApproxProfile;
    fn solve(&self, g: &TspGraph) -> Result<Tour>;

    /// Whether the tour returned for `g` is guaranteed optimal.
    fn is_exact_for(&self, _g: &TspGraph) -> bool {
        self.profile().is_exact()
    }
}

/// Held-Karp dynamic program, maximising instead of minimising.
#[derive(Debug, Clone, Copy)]
pub struct ExactSolver {
    pub max_vertices: usize,
}

impl Default for ExactSolver {
    fn default() -> Self {
        ExactSolver { max_vertices: 18 }
    }
}

impl TourSolver for ExactSolver {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn profile(&self) -> ApproxProfile {
        ApproxProfile {
            ratio_num: 1,
            ratio_den: 1,
            exponent: None,
        }
    }

    fn solve(&self, g: &TspGraph) -> Result<Tour> {
        let n = g.len();
        if n > self.max_vertices {
            return Err(Error::Capacity {
                what: "exact max tour-TSP graph",
                size: n,
                budget: self.max_vertices,
            });
        }
        if n <= 3 {
            return Ok(Tour {
                order: (0..n).collect(),
            });
        }
        Ok(Tour {
            order: held_karp_max(g),
        })
    }
}

fn held_karp_max(g: &TspGraph) -> Vec<usize> {
    // Paths start at vertex 0; bit k of a mask stands for vertex k + 1.
    let n = g.len();
    let k = n - 1;
    let full = (1usize << k) - 1;
    let mut best = vec![f64::NEG_INFINITY; (1 << k) * k];
    let mut parent = vec![u8::MAX; (1 << k) * k];
    for v in 0..k {
        best[(1 << v) * k + v] = g.weight(0, v + 1);
    }
    for mask in 1..=full {
        for last in 0..k {
            if mask & (1 << last) == 0 {
                continue;
            }
            let cur = best[mask * k + last];
            if cur == f64::NEG_INFINITY {
                continue;
            }
            for next in 0..k {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let nm = mask | (1 << next);
                let cand = cur + g.weight(last + 1, next + 1);
                if cand > best[nm * k + next] {
                    best[nm * k + next] = cand;
                    parent[nm * k + next] = last as u8;
                }
            }
        }
    }
    let mut end = 0;
    let mut top = f64::NEG_INFINITY;
    for last in 0..k {
        let total = best[full * k + last] + g.weight(last + 1, 0);
        if total > top {
            top = total;
            end = last;
        }
    }
    let mut rev = Vec::with_capacity(n);
    let mut mask = full;
    let mut v = end;
    loop {
        rev.push(v + 1);
        let p = parent[mask * k + v];
        mask &= !(1 << v);
        if p == u8::MAX {
            break;
        }
        v = p as usize;
    }
    rev.push(0);
    rev.reverse();
    rev
}

/// Greedy edge selection: heaviest edges first, ties by `(i, j)`, skipping
/// any edge that would give a vertex degree 3 or close a short cycle.
/// The resulting Hamiltonian path is closed into a tour. Ratio 1/2.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedySolver;

impl TourSolver for GreedySolver {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn profile(&self) -> ApproxProfile {
        ApproxProfile {
            ratio_num: 1,
            ratio_den: 2,
            exponent: Some(3),
        }
    }

    fn solve(&self, g: &TspGraph) -> Result<Tour> {
        let n = g.len();
        if n <= 3 {
            return Ok(Tour {
                order: (0..n).collect(),
            });
        }
        let mut edges: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        edges.sort_by(|a, b| g.weight(b.0, b.1).total_cmp(&g.weight(a.0, a.1)).then(a.cmp(b)));
        let mut uf: Vec<usize> = (0..n).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        let mut degree = vec![0u8; n];
        let mut adj = vec![Vec::with_capacity(2); n];
        let mut taken = 0;
        for (i, j) in edges {
            if taken == n - 1 {
                break;
            }
            if degree[i] >= 2 || degree[j] >= 2 {
                continue;
            }
            let (ri, rj) = (find(&mut uf, i), find(&mut uf, j));
            if ri == rj {
                continue;
            }
            uf[ri] = rj;
            degree[i] += 1;
            degree[j] += 1;
            adj[i].push(j);
            adj[j].push(i);
            taken += 1;
        }
        // walk the Hamiltonian path from its lower-index endpoint
        let start = (0..n).find(|&v| degree[v] == 1).unwrap_or(0);
        let mut order = Vec::with_capacity(n);
        let (mut prev, mut cur) = (usize::MAX, start);
        loop {
            order.push(cur);
            match adj[cur].iter().copied().find(|&x| x != prev) {
                Some(next) if order.len() < n => {
                    prev = cur;
                    cur = next;
                }
                _ => break,
            }
        }
        debug_assert_eq!(order.len(), n);
        Ok(Tour { order })
    }
}

/// Exact for blocks up to `exact_max_records`, greedy above.
#[derive(Debug, Clone, Copy)]
pub struct AutoSolver {
    pub exact_max_records: usize,
}

impl Default for AutoSolver {
    fn default() -> Self {
        AutoSolver { exact_max_records: 12 }
    }
}

impl AutoSolver {
    fn use_exact(&self, g: &TspGraph) -> bool {
        g.num_records() <= self.exact_max_records
    }
}

impl TourSolver for AutoSolver {
    fn name(&self) -> &'static str {
        "auto"
    }

    fn profile(&self) -> ApproxProfile {
        GreedySolver.profile()
    }

    fn solve(&self, g: &TspGraph) -> Result<Tour> {
        if self.use_exact(g) {
            ExactSolver {
                max_vertices: self.exact_max_records + 1,
            }
            .solve(g)
        } else {
            GreedySolver.solve(g)
        }
    }

    fn is_exact_for(&self, g: &TspGraph) -> bool {
        self.use_exact(g)
    }
}

/// Which of the two list readings of a cycle to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    /// Lower id first (compares the two endpoint ids).
    Canonical,
    /// The direction the cycle was toured in, starting after the dummy.
    AsToured,
}

/// Cuts the tour at the dummy vertex and returns the record ids.
pub fn tour_to_list(t: &Tour, g: &TspGraph, polarity: Polarity) -> Result<Vec<RecordId>> {
    let vertices = tour_to_path(t, g)?;
    let mut ids = vertices
        .into_iter()
        .map(|v| {
            g.record_of(v)
                .ok_or_else(|| Error::contract(format!("vertex {v} has no record")))
        })
        .collect::<Result<Vec<_>>>()?;
    if polarity == Polarity::Canonical && ids.len() > 1 && ids[0] > ids[ids.len() - 1] {
        ids.reverse();
    }
    Ok(ids)
}

/// Vertex path obtained by rotating the dummy to the front and dropping it.
pub fn tour_to_path(t: &Tour, g: &TspGraph) -> Result<Vec<usize>> {
    let dummy = g
        .dummy()
        .ok_or_else(|| Error::contract("tour_to_list needs a graph with a dummy vertex"))?;
    if !t.is_hamiltonian(g.len()) {
        return Err(Error::contract("tour does not visit every vertex exactly once"));
    }
    let at = t
        .order
        .iter()
        .position(|&v| v == dummy)
        .expect("hamiltonian tour contains dummy");
    Ok(t.order[at + 1..].iter().chain(&t.order[..at]).copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LookupTable;
    use rand::{Rng, SeedableRng};

    #[test]
    fn edge_dump_roundtrip() {
        let g = TspGraph::from_matrix(&[vec![0.0, 1.5, 2.0], vec![1.5, 0.0, 0.25], vec![2.0, 0.25, 0.0]]).unwrap();
        let mut out = Vec::new();
        g.write_edges(&mut out).unwrap();
        assert_eq!(TspGraph::read_edges(std::str::from_utf8(&out).unwrap()).unwrap(), g);
        assert!(TspGraph::read_edges("0 1 2\n1 0 3\n").is_err());
        assert!(TspGraph::read_edges("0 1 -2\n").is_err());
    }

    fn random_graph(rng: &mut impl Rng, n: usize) -> TspGraph {
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let w = rng.gen_range(0..40) as f64 / 4.0;
                m[i][j] = w;
                m[j][i] = w;
            }
        }
        TspGraph::from_matrix(&m).unwrap()
    }

    // Independent oracle: every cycle through vertex 0, by recursion.
    fn enumerate_max(g: &TspGraph) -> f64 {
        fn rec(g: &TspGraph, path: &mut Vec<usize>, used: &mut [bool], best: &mut f64) {
            if path.len() == g.len() {
                let w = Tour { order: path.clone() }.weight(g);
                if w > *best {
                    *best = w;
                }
                return;
            }
            for v in 1..g.len() {
                if !used[v] {
                    used[v] = true;
                    path.push(v);
                    rec(g, path, used, best);
                    path.pop();
                    used[v] = false;
                }
            }
        }
        let mut used = vec![false; g.len()];
        used[0] = true;
        let mut best = f64::NEG_INFINITY;
        rec(g, &mut vec![0], &mut used, &mut best);
        best
    }

    #[test]
    fn exact_matches_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for seed in 0..200 {
            let n = 3 + seed % 6;
            let g = random_graph(&mut rng, n);
            let t = ExactSolver::default().solve(&g).unwrap();
            assert!(t.is_hamiltonian(n));
            assert_eq!(t.weight(&g), enumerate_max(&g), "seed {seed}");
        }
    }

    #[test]
    fn triangle_and_uniform_graphs() {
        let g = TspGraph::from_matrix(&[vec![0., 1., 2.], vec![1., 0., 4.], vec![2., 4., 0.]]).unwrap();
        assert_eq!(ExactSolver::default().solve(&g).unwrap().weight(&g), 7.0);
        assert_eq!(GreedySolver.solve(&g).unwrap().weight(&g), 7.0);
        let n = 7;
        let m: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 2.5 }).collect())
            .collect();
        let g = TspGraph::from_matrix(&m).unwrap();
        assert_eq!(ExactSolver::default().solve(&g).unwrap().weight(&g), 2.5 * n as f64);
        assert_eq!(GreedySolver.solve(&g).unwrap().weight(&g), 2.5 * n as f64);
    }

    #[test]
    fn four_vertex_exact_is_best_of_three_tours() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let g = random_graph(&mut rng, 4);
            let tours = [[0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3]];
            let best = tours
                .iter()
                .map(|o| Tour { order: o.to_vec() }.weight(&g))
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(ExactSolver::default().solve(&g).unwrap().weight(&g), best);
        }
    }

    #[test]
    fn greedy_is_half_approximate() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut worst: f64 = 1.0;
        for seed in 0..500 {
            let n = 3 + seed % 6;
            let g = random_graph(&mut rng, n);
            let t = GreedySolver.solve(&g).unwrap();
            assert!(t.is_hamiltonian(n));
            let opt = ExactSolver::default().solve(&g).unwrap().weight(&g);
            let got = t.weight(&g);
            assert!(got >= 0.5 * opt, "seed {seed}: {got} < {opt}/2");
            if opt > 0.0 {
                worst = worst.min(got / opt);
            }
        }
        assert!(worst >= 0.5);
    }

    #[test]
    fn greedy_recovers_a_planted_heavy_cycle() {
        // cycle 0-3-1-4-2-5-0 with weights 20..15, everything else below 10
        let n = 6;
        let cycle = [0, 3, 1, 4, 2, 5];
        let mut m = vec![vec![0.0; n]; n];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for i in 0..n {
            for j in (i + 1)..n {
                let w = rng.gen_range(0..10) as f64;
                m[i][j] = w;
                m[j][i] = w;
            }
        }
        for k in 0..n {
            let (a, b) = (cycle[k], cycle[(k + 1) % n]);
            m[a][b] = 20.0 - k as f64;
            m[b][a] = 20.0 - k as f64;
        }
        let g = TspGraph::from_matrix(&m).unwrap();
        let t = GreedySolver.solve(&g).unwrap();
        assert_eq!(t.weight(&g), (15..=20).sum::<i32>() as f64);
    }

    #[test]
    fn exact_budget_is_enforced() {
        let g = TspGraph::from_matrix(&vec![vec![0.0; 20]; 20]).unwrap();
        assert!(matches!(
            ExactSolver::default().solve(&g),
            Err(Error::Capacity { size: 20, .. })
        ));
    }

    fn table_block(entries: &[(u64, u64, f64)], ids: &[u64]) -> (ScoringHeuristic, Vec<Record>) {
        let f = ScoringHeuristic::lookup(LookupTable::from_entries(entries.iter().copied()).unwrap());
        (f, ids.iter().map(|&i| Record::bare(i)).collect())
    }

    #[test]
    fn dummy_graph_shapes() {
        let (f, recs) = table_block(&[(1, 2, 0.5)], &[1, 2]);
        let refs: Vec<&Record> = recs.iter().collect();
        let g = records_to_graph(&refs, &f, true).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!((g.weight(0, 1), g.weight(0, 2), g.weight(1, 2)), (0.5, 0.0, 0.0));
        assert_eq!(g.triangle_violation(), Some((0, 1, 2)));
        let plain = records_to_graph(&refs, &f, false).unwrap();
        assert_eq!(plain.len(), 2);
        assert_eq!(plain.dummy(), None);

        let single = records_to_graph(&refs[..1], &f, true).unwrap();
        assert_eq!(single.len(), 2);
        assert_eq!(single.weight(0, 1), 0.0);
    }

    #[test]
    fn tour_to_list_cuts_at_dummy() {
        let (f, recs) = table_block(&[(1, 2, 1.0), (1, 3, 2.0), (3, 4, 3.0)], &[1, 2, 3, 4]);
        let refs: Vec<&Record> = recs.iter().collect();
        let g = records_to_graph(&refs, &f, true).unwrap();
        // vertices: 0..4 = records 1..4, dummy = 4; circuit (dummy,2,1,3,4)
        let t = Tour {
            order: vec![4, 1, 0, 2, 3],
        };
        let ids = |v: &[u64]| v.iter().map(|&i| RecordId(i)).collect::<Vec<_>>();
        assert_eq!(tour_to_list(&t, &g, Polarity::AsToured).unwrap(), ids(&[2, 1, 3, 4]));
        let rev = Tour {
            order: vec![4, 3, 2, 0, 1],
        };
        assert_eq!(tour_to_list(&rev, &g, Polarity::AsToured).unwrap(), ids(&[4, 3, 1, 2]));
        assert_eq!(tour_to_list(&rev, &g, Polarity::Canonical).unwrap(), ids(&[2, 1, 3, 4]));
        // dummy edges contribute nothing
        assert_eq!(t.weight(&g), 6.0);

        let no_dummy = records_to_graph(&refs, &f, false).unwrap();
        assert!(tour_to_list(
            &Tour {
                order: vec![0, 1, 2, 3]
            },
            &no_dummy,
            Polarity::Canonical
        )
        .is_err());
    }

    #[test]
    fn edge_dump_format() {
        let g = TspGraph::from_matrix(&[vec![0., 1.5], vec![1.5, 0.]]).unwrap();
        let mut out = Vec::new();
        g.write_edges(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 1 1.5\n");
    }
}
