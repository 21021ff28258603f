//! Executable Karp reductions into maximum-score w-ordering, plus the
//! exhaustive checkers used to validate them on small instances.
//!
//! * min Hamiltonian path (integer weights) → 2-ordering
//! * min Hamiltonian path over a [0,1] metric → 2-ordering (real scores)
//! * 2-ordering → w-ordering for w > 2, by scaling each record into a set
//!   of `w-1` copies
//!
//! Threshold note: a list of `m` records has 2-score `W_E(m-1) - W(path)`,
//! so "path weight ≤ k" holds exactly when "2-score ≥ W_E(m-1) - k". The
//! `+1` sometimes written after that expression would turn the target into
//! "path weight < k"; [`verify_equivalence`] can reproduce that mismatch
//! through its `k_offset` argument.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::{try_map_indexed, Parallelism};
use crate::merge::w_score_indexed;
use crate::model::{LookupTable, Record};
use crate::ordering::next_permutation;

/// Exhaustive search budget (records) for every brute-force side.
pub const ENUMERATION_BUDGET: usize = 8;

/// Tolerance for real-valued thresholds.
pub const BOUNDARY_EPS: f64 = 1e-9;

pub trait Score:
    Copy
    + PartialOrd
    + Default
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + fmt::Debug
    + fmt::Display
{
    fn from_usize(n: usize) -> Self;
    fn to_f64(self) -> f64;
}

impl Score for i64 {
    fn from_usize(n: usize) -> Self {
        n as i64
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Score for f64 {
    fn from_usize(n: usize) -> Self {
        n as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
}

fn check_budget(what: &'static str, size: usize) -> Result<()> {
    if size > ENUMERATION_BUDGET {
        return Err(Error::Capacity {
            what,
            size,
            budget: ENUMERATION_BUDGET,
        });
    }
    Ok(())
}

/// Min Hamiltonian path decision: is there a path of weight at most `k`?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathTspInstance {
    weights: Vec<Vec<i64>>,
    pub k: i64,
}

impl PathTspInstance {
    pub fn new(weights: Vec<Vec<i64>>, k: i64) -> Result<Self> {
        let m = weights.len();
        if m < 2 {
            return Err(Error::contract("a path instance needs at least 2 vertices"));
        }
        if k < 0 {
            return Err(Error::contract("k must be non-negative"));
        }
        for (i, row) in weights.iter().enumerate() {
            if row.len() != m {
                return Err(Error::contract("weight matrix is not square"));
            }
            for j in 0..m {
                if i != j && row[j] < 0 {
                    return Err(Error::contract(format!("negative weight at ({i},{j})")));
                }
                if row[j] != weights[j][i] {
                    return Err(Error::contract(format!("weights not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(PathTspInstance { weights, k })
    }

    /// Accepts real weights that are exact non-negative integers.
    pub fn from_real(weights: &[Vec<f64>], k: f64) -> Result<Self> {
        let int = |x: f64| -> Result<i64> {
            if x.fract() != 0.0 || !x.is_finite() || x < 0.0 {
                return Err(Error::contract(format!("{x} is not a non-negative integer")));
            }
            Ok(x as i64)
        };
        let w = weights
            .iter()
            .map(|row| row.iter().map(|&x| int(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        PathTspInstance::new(w, int(k)?)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, i: usize, j: usize) -> i64 {
        self.weights[i][j]
    }

    /// W_E: the sum of all edge weights.
    pub fn total_weight(&self) -> i64 {
        let m = self.len();
        (0..m)
            .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
            .map(|(i, j)| self.weights[i][j])
            .sum()
    }
}

/// Maximum-score w-ordering decision over records `0..m`: is there a list
/// with w-score at least `k`?
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingInstance<S> {
    m: usize,
    f: Vec<S>,
    pub k: S,
    pub w: usize,
}

impl<S: Score> OrderingInstance<S> {
    /// `f` is a dense symmetric matrix; the diagonal is ignored.
    pub fn new(f: Vec<Vec<S>>, k: S, w: usize) -> Result<Self> {
        let m = f.len();
        if w < 2 {
            return Err(Error::contract("window must be at least 2"));
        }
        let mut flat = vec![S::default(); m * m];
        for i in 0..m {
            if f[i].len() != m {
                return Err(Error::contract("score matrix is not square"));
            }
            for j in 0..m {
                if i == j {
                    continue;
                }
                if f[i][j] != f[j][i] {
                    return Err(Error::contract(format!("scores not symmetric at ({i},{j})")));
                }
                if f[i][j] < S::default() {
                    return Err(Error::contract(format!("negative score at ({i},{j})")));
                }
                flat[i * m + j] = f[i][j];
            }
        }
        Ok(OrderingInstance { m, f: flat, k, w })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn score(&self, i: usize, j: usize) -> S {
        if i == j {
            S::default()
        } else {
            self.f[i * self.m + j]
        }
    }

    pub fn w_score(&self, list: &[usize]) -> S {
        w_score_indexed(list, self.w, |a, b| self.score(a, b))
    }

    /// Records `1..=m` (id = index + 1) and the matching lookup table.
    pub fn to_records(&self) -> Result<(Vec<Record>, LookupTable)> {
        let records = (0..self.m).map(|i| Record::bare(i as u64 + 1)).collect();
        let mut t = LookupTable::new();
        for i in 0..self.m {
            for j in (i + 1)..self.m {
                let s = self.score(i, j).to_f64();
                if s != 0.0 {
                    t.insert(i as u64 + 1, j as u64 + 1, s)?;
                }
            }
        }
        Ok((records, t))
    }
}

/// Builds `f(i,j) = W_E - W(i,j)` and `k' = W_E(m-1) - k`, with w = 2.
pub fn reduce_pathtsp_to_2ordering(inst: &PathTspInstance) -> Result<OrderingInstance<i64>> {
    let m = inst.len();
    let we = inst.total_weight();
    let f = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { 0 } else { we - inst.weight(i, j) })
                .collect()
        })
        .collect();
    OrderingInstance::new(f, we * (m as i64 - 1) - inst.k, 2)
}

/// Checks that `d` is a metric with values in [0,1]. Returns the first
/// violated triangle `(i, j, l)` with `d(i,l) > d(i,j) + d(j,l)`.
pub fn metric_violation(d: &[Vec<f64>]) -> Result<Option<(usize, usize, usize)>> {
    let m = d.len();
    for (i, row) in d.iter().enumerate() {
        if row.len() != m {
            return Err(Error::contract("distance matrix is not square"));
        }
        for j in 0..m {
            let x = row[j];
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::contract(format!("distance at ({i},{j}) outside [0,1]")));
            }
            if x != d[j][i] {
                return Err(Error::contract(format!("distances not symmetric at ({i},{j})")));
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            for l in 0..m {
                if i != j && j != l && i != l && d[i][l] > d[i][j] + d[j][l] + 1e-12 {
                    return Ok(Some((i, j, l)));
                }
            }
        }
    }
    Ok(None)
}

/// Builds `f = 1 - d` and `k' = (m-1) - k`, with w = 2.
pub fn reduce_metric_to_2ordering(d: &[Vec<f64>], k: f64) -> Result<OrderingInstance<f64>> {
    let m = d.len();
    if m < 2 {
        return Err(Error::contract("a path instance needs at least 2 vertices"));
    }
    if let Some((i, j, l)) = metric_violation(d)? {
        return Err(Error::contract(format!("triangle inequality fails for ({i},{j},{l})")));
    }
    let f = (0..m)
        .map(|i| (0..m).map(|j| if i == j { 0.0 } else { 1.0 - d[i][j] }).collect())
        .collect();
    OrderingInstance::new(f, (m - 1) as f64 - k, 2)
}

/// A 2-ordering instance blown up to window `w`. Source record `i` becomes
/// the set `S_i` of `w-1` records; scaled index `i*(w-1) + c` is the copy
/// with internal id `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledInstance<S> {
    pub instance: OrderingInstance<S>,
    pub m: usize,
    /// Sum of the source scores over unordered pairs.
    pub total: S,
    pub t1: S,
    pub t2: S,
}

impl<S: Score> ScaledInstance<S> {
    pub fn w(&self) -> usize {
        self.instance.w
    }

    pub fn set_size(&self) -> usize {
        self.instance.w - 1
    }

    /// (set id, internal id) of a scaled record.
    pub fn locate(&self, idx: usize) -> (usize, usize) {
        (idx / self.set_size(), idx % self.set_size())
    }

    /// Stacks the sets in `order`, each in internal-id order.
    pub fn stacked_aligned(&self, order: &[usize]) -> Vec<usize> {
        let q = self.set_size();
        order.iter().flat_map(|&i| (0..q).map(move |c| i * q + c)).collect()
    }
}

/// Scales a 2-ordering instance to window `w > 2`:
/// same set, different copy scores `F` (the source total); same copy in
/// different sets scores the source pair; everything else scores 0.
/// The threshold is `T1 + T2` with `T1 = m·C(w-1,2)·F` and `T2 = k(w-1)`.
pub fn scale_2_to_w<S: Score>(src: &OrderingInstance<S>, w: usize) -> Result<ScaledInstance<S>> {
    if w <= 2 {
        return Err(Error::contract("scaling needs a window larger than 2"));
    }
    let m = src.len();
    let q = w - 1;
    let mut total = S::default();
    for i in 0..m {
        for j in (i + 1)..m {
            total = total + src.score(i, j);
        }
    }
    let n = m * q;
    let mut f = vec![vec![S::default(); n]; n];
    for a in 0..n {
        for b in 0..n {
            let ((i, c), (j, d)) = ((a / q, a % q), (b / q, b % q));
            f[a][b] = if a == b {
                S::default()
            } else if i == j {
                total
            } else if c == d {
                src.score(i, j)
            } else {
                S::default()
            };
        }
    }
    let t1 = S::from_usize(m * q * (q - 1) / 2) * total;
    let t2 = src.k * S::from_usize(q);
    Ok(ScaledInstance {
        instance: OrderingInstance::new(f, t1 + t2, w)?,
        m,
        total,
        t1,
        t2,
    })
}

/// Min-weight Hamiltonian path by enumeration: (weight, vertex order).
pub fn brute_force_min_path(inst: &PathTspInstance) -> Result<(i64, Vec<usize>)> {
    brute_force_min_path_by(inst.len(), |i, j| inst.weight(i, j))
}

fn brute_force_min_path_by<S: Score>(m: usize, w: impl Fn(usize, usize) -> S) -> Result<(S, Vec<usize>)> {
    check_budget("brute-force path", m)?;
    let mut perm: Vec<usize> = (0..m).collect();
    let mut best: Option<(S, Vec<usize>)> = None;
    loop {
        if m < 2 || perm[0] < perm[m - 1] {
            let mut s = S::default();
            for e in perm.windows(2) {
                s = s + w(e[0], e[1]);
            }
            if best.as_ref().is_none_or(|(b, _)| s < *b) {
                best = Some((s, perm.clone()));
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(best.expect("at least one permutation"))
}

/// Best w-ordering by enumeration: (w-score, list). The lexicographically
/// smallest optimal list wins.
pub fn brute_force_best_ordering<S: Score>(inst: &OrderingInstance<S>) -> Result<(S, Vec<usize>)> {
    let m = inst.len();
    check_budget("brute-force ordering", m)?;
    let mut perm: Vec<usize> = (0..m).collect();
    let mut best: Option<(S, Vec<usize>)> = None;
    loop {
        // w-scores are invariant under reversal
        if m < 2 || perm[0] < perm[m - 1] {
            let s = inst.w_score(&perm);
            if best.as_ref().is_none_or(|(b, _)| s > *b) {
                best = Some((s, perm.clone()));
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(best.expect("at least one permutation"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    /// Integer min path → 2-ordering.
    PathTsp,
    /// [0,1] metric min path → 2-ordering.
    Metric,
    /// 2-ordering → w-ordering.
    Scaling,
}

impl std::str::FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(Theorem::PathTsp),
            "cor1" => Ok(Theorem::Metric),
            "3" => Ok(Theorem::Scaling),
            other => Err(Error::config(format!(
                "unknown theorem '{other}' (expected 2, cor1 or 3)"
            ))),
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::PathTsp => "2",
            Theorem::Metric => "cor1",
            Theorem::Scaling => "3",
        })
    }
}

/// One (instance, threshold) decision pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceCase {
    pub seed: u64,
    pub m: usize,
    pub k: f64,
    pub k_prime: f64,
    pub source: bool,
    pub target: bool,
    /// Best source value (min path weight or best 2-score) and its witness.
    pub source_value: f64,
    pub source_witness: Vec<usize>,
    /// Best target score and its witness.
    pub target_value: f64,
    pub target_witness: Vec<usize>,
    /// Within [`BOUNDARY_EPS`] of a threshold; excluded from counting.
    pub boundary: bool,
}

impl EquivalenceCase {
    pub fn agrees(&self) -> bool {
        self.source == self.target
    }
}

impl fmt::Display for EquivalenceCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "seed={} m={} k={} k'={} source={} ({} via {:?}) target={} ({} via {:?})",
            self.seed,
            self.m,
            self.k,
            self.k_prime,
            self.source,
            self.source_value,
            self.source_witness,
            self.target,
            self.target_value,
            self.target_witness
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub theorem: Theorem,
    pub seeds: u64,
    pub first_seed: u64,
    /// Upper bound on the source size m. The scaling check uses exactly
    /// this size, since its target grows as m(w-1).
    pub max_m: usize,
    /// Target window, used by the scaling reduction only.
    pub w: usize,
    /// Added to every constructed threshold; non-zero values are mutations.
    pub k_offset: i64,
    pub parallelism: Parallelism,
}

impl VerifyOptions {
    pub fn new(theorem: Theorem, seeds: u64) -> Self {
        VerifyOptions {
            theorem,
            seeds,
            first_seed: 0,
            max_m: match theorem {
                Theorem::Scaling => 3,
                _ => 7,
            },
            w: 3,
            k_offset: 0,
            parallelism: Parallelism::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub theorem: Theorem,
    pub instances: usize,
    pub cases: usize,
    pub agreements: usize,
    pub boundary_excluded: usize,
    /// First disagreement in seed order.
    pub counterexample: Option<EquivalenceCase>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none() && self.cases > 0
    }

    pub fn disagreements(&self) -> usize {
        self.cases - self.agreements
    }
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theorem = {}", self.theorem)?;
        writeln!(f, "result = {}", if self.passed() { "PASS" } else { "FAIL" })?;
        writeln!(f, "instances = {}", self.instances)?;
        writeln!(f, "cases = {}", self.cases)?;
        writeln!(f, "agreements = {}", self.agreements)?;
        writeln!(f, "boundary_excluded = {}", self.boundary_excluded)?;
        if let Some(c) = &self.counterexample {
            writeln!(f, "counterexample = {c}")?;
        }
        Ok(())
    }
}

fn sizes_for(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    if hi <= lo {
        hi
    } else {
        rng.gen_range(lo..=hi)
    }
}

fn random_int_matrix(rng: &mut ChaCha8Rng, m: usize, max: i64) -> Vec<Vec<i64>> {
    let mut w = vec![vec![0; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let x = rng.gen_range(0..=max);
            w[i][j] = x;
            w[j][i] = x;
        }
    }
    w
}

/// Random points in the unit square; distances scaled into [0,1]. Every
/// fourth instance is the unit-distance clique.
pub fn random_metric(rng: &mut ChaCha8Rng, m: usize, seed: u64) -> Vec<Vec<f64>> {
    if seed % 4 == 3 {
        return (0..m)
            .map(|i| (0..m).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
    }
    let pts: Vec<(f64, f64)> = (0..m).map(|_| (rng.gen(), rng.gen())).collect();
    let mut d = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
            let x = (dx * dx + dy * dy).sqrt() / std::f64::consts::SQRT_2;
            d[i][j] = x;
            d[j][i] = x;
        }
    }
    d
}

fn verify_pathtsp_seed(seed: u64, opts: &VerifyOptions) -> Result<Vec<EquivalenceCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = sizes_for(&mut rng, 4.min(opts.max_m), opts.max_m);
    let weights = random_int_matrix(&mut rng, m, 9);
    let probe = PathTspInstance::new(weights.clone(), 0)?;
    let (min_path, path) = brute_force_min_path(&probe)?;
    let random_k = rng.gen_range(0..=9 * (m as i64 - 1));
    let ks: BTreeSet<i64> = [min_path - 1, min_path, min_path + 1, random_k]
        .into_iter()
        .filter(|&k| k >= 0)
        .collect();
    // the target's best list does not depend on k
    let base = reduce_pathtsp_to_2ordering(&probe)?;
    let (best, list) = brute_force_best_ordering(&base)?;
    ks.into_iter()
        .map(|k| {
            let inst = PathTspInstance::new(weights.clone(), k)?;
            let target = reduce_pathtsp_to_2ordering(&inst)?;
            let k_prime = target.k + opts.k_offset;
            Ok(EquivalenceCase {
                seed,
                m,
                k: k as f64,
                k_prime: k_prime as f64,
                source: min_path <= k,
                target: best >= k_prime,
                source_value: min_path as f64,
                source_witness: path.clone(),
                target_value: best as f64,
                target_witness: list.clone(),
                boundary: false,
            })
        })
        .collect()
}

fn verify_metric_seed(seed: u64, opts: &VerifyOptions) -> Result<Vec<EquivalenceCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = sizes_for(&mut rng, 2.min(opts.max_m), opts.max_m);
    let d = random_metric(&mut rng, m, seed);
    let (min_path, path) = brute_force_min_path_by(m, |i, j| d[i][j])?;
    let ks = [
        min_path,
        rng.gen_range(0.0..=(m - 1) as f64),
        min_path + 0.05,
        (min_path - 0.05).max(0.0),
    ];
    let base = reduce_metric_to_2ordering(&d, 0.0)?;
    let (best, list) = brute_force_best_ordering(&base)?;
    ks.into_iter()
        .map(|k| {
            let target = reduce_metric_to_2ordering(&d, k)?;
            let k_prime = target.k + opts.k_offset as f64;
            Ok(EquivalenceCase {
                seed,
                m,
                k,
                k_prime,
                source: min_path <= k,
                target: best >= k_prime,
                source_value: min_path,
                source_witness: path.clone(),
                target_value: best,
                target_witness: list.clone(),
                boundary: (min_path - k).abs() < BOUNDARY_EPS || (best - k_prime).abs() < BOUNDARY_EPS,
            })
        })
        .collect()
}

fn verify_scaling_seed(seed: u64, opts: &VerifyOptions) -> Result<Vec<EquivalenceCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = opts.max_m;
    let f = random_int_matrix(&mut rng, m, 5);
    let src = OrderingInstance::new(f.clone(), 0, 2)?;
    let (best_src, src_list) = brute_force_best_ordering(&src)?;
    // every achievable 2-score, and one past each
    let mut ks = BTreeSet::new();
    let mut perm: Vec<usize> = (0..m).collect();
    loop {
        let s = src.w_score(&perm);
        ks.insert(s);
        ks.insert(s + 1);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let scaled0 = scale_2_to_w(&src, opts.w)?;
    let (best_tgt, tgt_list) = brute_force_best_ordering(&scaled0.instance)?;
    ks.into_iter()
        .map(|k| {
            let scaled = scale_2_to_w(&OrderingInstance::new(f.clone(), k, 2)?, opts.w)?;
            let k_prime = scaled.instance.k + opts.k_offset;
            Ok(EquivalenceCase {
                seed,
                m,
                k: k as f64,
                k_prime: k_prime as f64,
                source: best_src >= k,
                target: best_tgt >= k_prime,
                source_value: best_src as f64,
                source_witness: src_list.clone(),
                target_value: best_tgt as f64,
                target_witness: tgt_list.clone(),
                boundary: false,
            })
        })
        .collect()
}

/// Generates seeded random instances and compares both sides' decisions
/// exhaustively. Seeds run concurrently.
pub fn verify_equivalence(opts: &VerifyOptions) -> Result<EquivalenceReport> {
    match opts.theorem {
        Theorem::Scaling => {
            if opts.w <= 2 {
                return Err(Error::contract("scaling needs --w larger than 2"));
            }
            check_budget("scaled instance", opts.max_m * (opts.w - 1))?;
        }
        _ => check_budget("path instance", opts.max_m)?,
    }
    if opts.max_m < 2 {
        return Err(Error::contract("max m must be at least 2"));
    }
    let seeds: Vec<u64> = (opts.first_seed..opts.first_seed + opts.seeds).collect();
    let per_seed = try_map_indexed(opts.parallelism, &seeds, |_, &seed| match opts.theorem {
        Theorem::PathTsp => verify_pathtsp_seed(seed, opts),
        Theorem::Metric => verify_metric_seed(seed, opts),
        Theorem::Scaling => verify_scaling_seed(seed, opts),
    })?;
    let mut report = EquivalenceReport {
        theorem: opts.theorem,
        instances: seeds.len(),
        cases: 0,
        agreements: 0,
        boundary_excluded: 0,
        counterexample: None,
    };
    for case in per_seed.into_iter().flatten() {
        if case.boundary {
            report.boundary_excluded += 1;
            continue;
        }
        report.cases += 1;
        if case.agrees() {
            report.agreements += 1;
        } else if report.counterexample.is_none() {
            report.counterexample = Some(case);
        }
    }
    Ok(report)
}

/// Classification of one scaled list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListShape {
    /// Some set is not contiguous.
    Interleaved,
    /// Sets contiguous, all with the same internal order.
    StackedAligned,
    StackedUnaligned,
}

/// Shape of `list` (scaled indices) for sets of size `q`.
pub fn classify(list: &[usize], q: usize) -> ListShape {
    if q == 0 || !list.len().is_multiple_of(q) {
        return ListShape::Interleaved;
    }
    let chunks: Vec<&[usize]> = list.chunks(q).collect();
    if chunks.iter().any(|c| c.iter().any(|&x| x / q != c[0] / q)) {
        return ListShape::Interleaved;
    }
    let internal = |c: &[usize]| c.iter().map(|&x| x % q).collect::<Vec<_>>();
    let first = internal(chunks[0]);
    if chunks.iter().all(|c| internal(c) == first) {
        ListShape::StackedAligned
    } else {
        ListShape::StackedUnaligned
    }
}

/// The aligned lists obtained by imposing each sub-list's internal order on
/// every sub-list, keeping the set order. Deduplicated, in pivot order.
pub fn alignment_set(list: &[usize], q: usize) -> Vec<Vec<usize>> {
    let chunks: Vec<&[usize]> = list.chunks(q).collect();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for pivot in &chunks {
        let order: Vec<usize> = pivot.iter().map(|&x| x % q).collect();
        let aligned: Vec<usize> = chunks
            .iter()
            .flat_map(|c| {
                let set = c[0] / q;
                order.iter().map(move |&o| set * q + o)
            })
            .collect();
        if !out.contains(&aligned) {
            out.push(aligned);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct StackingReport {
    pub permutations: usize,
    pub interleaved: usize,
    pub stacked_aligned: usize,
    pub stacked_unaligned: usize,
    pub max_interleaved: f64,
    pub min_stacked: f64,
    pub max_stacked: f64,
    pub max_aligned: f64,
    /// Interleaved lists scoring above some stacked list.
    pub interleaved_violations: usize,
    /// First such pair: (interleaved list, its score, stacked list, its score).
    pub interleaved_witness: Option<(Vec<usize>, f64, Vec<usize>, f64)>,
    /// Unaligned lists scoring above every list of their alignment set.
    pub unaligned_violations: usize,
    pub unaligned_witness: Option<(Vec<usize>, f64)>,
}

impl StackingReport {
    /// Every interleaved list scores at most every stacked list.
    pub fn interleaved_property_holds(&self) -> bool {
        self.interleaved_violations == 0
    }

    /// Weaker form: the best interleaved list does not beat the best
    /// stacked-aligned list.
    pub fn weak_interleaved_property_holds(&self) -> bool {
        self.interleaved == 0 || self.max_interleaved <= self.max_aligned
    }

    pub fn alignment_property_holds(&self) -> bool {
        self.unaligned_violations == 0
    }

    pub fn is_partition(&self) -> bool {
        self.interleaved + self.stacked_aligned + self.stacked_unaligned == self.permutations
    }
}

/// Enumerates every permutation of the scaled records and checks the two
/// stacking properties exhaustively.
pub fn check_stacking_properties<S: Score>(scaled: &ScaledInstance<S>) -> Result<StackingReport> {
    let inst = &scaled.instance;
    let n = inst.len();
    check_budget("stacking enumeration", n)?;
    let q = scaled.set_size();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut r = StackingReport {
        permutations: 0,
        interleaved: 0,
        stacked_aligned: 0,
        stacked_unaligned: 0,
        max_interleaved: f64::NEG_INFINITY,
        min_stacked: f64::INFINITY,
        max_stacked: f64::NEG_INFINITY,
        max_aligned: f64::NEG_INFINITY,
        interleaved_violations: 0,
        interleaved_witness: None,
        unaligned_violations: 0,
        unaligned_witness: None,
    };
    let mut interleaved: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut min_stacked_list = Vec::new();
    loop {
        r.permutations += 1;
        let s = inst.w_score(&perm).to_f64();
        match classify(&perm, q) {
            ListShape::Interleaved => {
                r.interleaved += 1;
                r.max_interleaved = r.max_interleaved.max(s);
                interleaved.push((s, perm.clone()));
            }
            shape => {
                if s < r.min_stacked {
                    r.min_stacked = s;
                    min_stacked_list.clone_from(&perm);
                }
                r.max_stacked = r.max_stacked.max(s);
                if shape == ListShape::StackedAligned {
                    r.stacked_aligned += 1;
                    r.max_aligned = r.max_aligned.max(s);
                } else {
                    r.stacked_unaligned += 1;
                    let best = alignment_set(&perm, q)
                        .iter()
                        .map(|l| inst.w_score(l).to_f64())
                        .fold(f64::NEG_INFINITY, f64::max);
                    if s > best {
                        r.unaligned_violations += 1;
                        if r.unaligned_witness.is_none() {
                            r.unaligned_witness = Some((perm.clone(), s));
                        }
                    }
                }
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    for (s, list) in interleaved {
        if s > r.min_stacked {
            r.interleaved_violations += 1;
            if r.interleaved_witness.is_none() {
                r.interleaved_witness = Some((list, s, min_stacked_list.clone(), r.min_stacked));
            }
        }
    }
    Ok(r)
}
