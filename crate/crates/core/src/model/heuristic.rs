use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Read;
use std::sync::Arc;

use super::candidates::Pair;
use super::key::BlockingKeySpec;
use super::record::{tokens, Record, RecordId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Locality {
    /// Scores are zero for every pair with different BKVs.
    Local,
    Global,
}

/// Explicit symmetric pair scores. Missing entries score 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LookupTable {
    entries: HashMap<Pair, f64>,
}

impl LookupTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: impl Into<RecordId>, b: impl Into<RecordId>, score: f64) -> Result<()> {
        let (a, b) = (a.into(), b.into());
        if a == b {
            return Err(Error::UndefinedEvaluation(a.0));
        }
        if !(score >= 0.0 && score.is_finite()) {
            return Err(Error::contract(format!(
                "score for ({a},{b}) must be finite and non-negative"
            )));
        }
        self.entries.insert(Pair::new(a, b), score);
        Ok(())
    }

    pub fn from_entries<I, A>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, A, f64)>,
        A: Into<RecordId>,
    {
        let mut t = LookupTable::new();
        for (a, b, s) in entries {
            t.insert(a, b, s)?;
        }
        Ok(t)
    }

    /// Builds a table from a dense symmetric matrix over ids `0..n`.
    pub fn from_matrix(m: &[Vec<f64>]) -> Result<Self> {
        let mut t = LookupTable::new();
        for i in 0..m.len() {
            for j in (i + 1)..m.len() {
                if m[i][j] != m[j][i] {
                    return Err(Error::contract(format!("matrix is not symmetric at ({i},{j})")));
                }
                if m[i][j] != 0.0 {
                    t.insert(i as u64, j as u64, m[i][j])?;
                }
            }
        }
        Ok(t)
    }

    pub fn get(&self, a: RecordId, b: RecordId) -> f64 {
        self.entries.get(&Pair::new(a, b)).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses whitespace-delimited `id1 id2 score` lines. Blank lines and
    /// lines starting with `#` are skipped. A pair listed twice must carry
    /// the same score both times.
    pub fn parse<R: Read>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        let mut t = LookupTable::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: n + 1, msg };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(err(format!("expected `id1 id2 score`, got `{line}`")));
            }
            let a: u64 = f[0].parse().map_err(|e| err(format!("{e}")))?;
            let b: u64 = f[1].parse().map_err(|e| err(format!("{e}")))?;
            let s: f64 = f[2].parse().map_err(|e| err(format!("{e}")))?;
            if a == b {
                return Err(err(format!("self-pair ({a},{b})")));
            }
            if let Some(prev) = t.entries.get(&Pair::new(RecordId(a), RecordId(b))) {
                if *prev != s {
                    return Err(err(format!("conflicting scores for ({a},{b})")));
                }
            }
            t.insert(a, b, s).map_err(|e| err(e.to_string()))?;
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HeuristicKind {
    /// |A ∩ B| / |A ∪ B| over lowercased whitespace token sets.
    TokenJaccard,
    /// Cosine similarity of raw term-frequency vectors.
    CosineTf,
    Lookup(Arc<LookupTable>),
}

/// Symmetric, non-negative pair scorer `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoringHeuristic {
    kind: HeuristicKind,
    locality: Locality,
    guard: Option<BlockingKeySpec>,
}

impl ScoringHeuristic {
    pub fn new(kind: HeuristicKind) -> Self {
        ScoringHeuristic {
            kind,
            locality: Locality::Global,
            guard: None,
        }
    }

    pub fn token_jaccard() -> Self {
        Self::new(HeuristicKind::TokenJaccard)
    }

    pub fn cosine_tf() -> Self {
        Self::new(HeuristicKind::CosineTf)
    }

    pub fn lookup(table: LookupTable) -> Self {
        Self::new(HeuristicKind::Lookup(Arc::new(table)))
    }

    pub fn kind(&self) -> &HeuristicKind {
        &self.kind
    }

    pub fn locality(&self) -> Locality {
        self.locality
    }

    /// Re-tags locality without adding a guard. Used when the caller knows
    /// the scores already vanish across blocks (e.g. hand-built tables).
    pub fn tagged(mut self, locality: Locality) -> Self {
        self.locality = locality;
        self
    }

    /// Returns a local heuristic that agrees with `self` on same-BKV pairs
    /// and scores every cross-BKV pair 0.
    pub fn localize(&self, key: &BlockingKeySpec) -> Self {
        ScoringHeuristic {
            kind: self.kind.clone(),
            locality: Locality::Local,
            guard: Some(key.clone()),
        }
    }

    pub fn score(&self, r: &Record, s: &Record) -> Result<f64> {
        if r.id == s.id {
            return Err(Error::UndefinedEvaluation(r.id.0));
        }
        if let Some(key) = &self.guard {
            if key.apply(r)? != key.apply(s)? {
                return Ok(0.0);
            }
        }
        Ok(self.base_score(r, s))
    }

    /// Score of a pair already known to share a BKV, skipping the guard.
    pub(crate) fn score_same_block(&self, r: &Record, s: &Record) -> Result<f64> {
        if r.id == s.id {
            return Err(Error::UndefinedEvaluation(r.id.0));
        }
        Ok(self.base_score(r, s))
    }

    fn base_score(&self, r: &Record, s: &Record) -> f64 {
        match &self.kind {
            HeuristicKind::TokenJaccard => {
                let a: HashSet<String> = tokens(r).collect();
                let b: HashSet<String> = tokens(s).collect();
                let union = a.union(&b).count();
                if union == 0 {
                    0.0
                } else {
                    a.intersection(&b).count() as f64 / union as f64
                }
            }
            HeuristicKind::CosineTf => {
                let tf = |rec: &Record| {
                    let mut m: HashMap<String, f64> = HashMap::new();
                    for t in tokens(rec) {
                        *m.entry(t).or_default() += 1.0;
                    }
                    m
                };
                let (a, b) = (tf(r), tf(s));
                let norm = |m: &HashMap<String, f64>| m.values().map(|v| v * v).sum::<f64>().sqrt();
                let (na, nb) = (norm(&a), norm(&b));
                if na == 0.0 || nb == 0.0 {
                    return 0.0;
                }
                // sum over the sorted intersection so the order is argument-independent
                let mut shared: Vec<&String> = a.keys().filter(|k| b.contains_key(*k)).collect();
                shared.sort();
                let dot: f64 = shared.into_iter().map(|k| a[k] * b[k]).sum();
                (dot / (na * nb)).min(1.0)
            }
            HeuristicKind::Lookup(t) => t.get(r.id, s.id),
        }
    }
}

impl fmt::Display for ScoringHeuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            HeuristicKind::TokenJaccard => "token-jaccard",
            HeuristicKind::CosineTf => "cosine-tf",
            HeuristicKind::Lookup(_) => "lookup-table",
        };
        let loc = match self.locality {
            Locality::Local => "local",
            Locality::Global => "global",
        };
        write!(f, "{kind} ({loc})")
    }
}
