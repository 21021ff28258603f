use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;

use super::record::RecordId;

/// Unordered record pair stored as (min id, max id).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    lo: RecordId,
    hi: RecordId,
}

impl Pair {
    /// Panics on a self-pair; callers never construct one.
    pub fn new(a: RecordId, b: RecordId) -> Self {
        assert_ne!(a, b, "self-pair ({a},{a})");
        if a < b {
            Pair { lo: a, hi: b }
        } else {
            Pair { lo: b, hi: a }
        }
    }

    pub fn lo(&self) -> RecordId {
        self.lo
    }

    pub fn hi(&self) -> RecordId {
        self.hi
    }

    pub fn contains(&self, id: RecordId) -> bool {
        self.lo == id || self.hi == id
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.lo, self.hi)
    }
}

/// Candidate set Γ with its aggregate score.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CandidateSet {
    pub pairs: BTreeSet<Pair>,
    pub score: f64,
}

impl CandidateSet {
    pub fn unscored(pairs: impl IntoIterator<Item = Pair>) -> Self {
        CandidateSet {
            pairs: pairs.into_iter().collect(),
            score: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, p: &Pair) -> bool {
        self.pairs.contains(p)
    }

    /// Writes `id1,id2` lines in ascending pair order.
    pub fn write_pairs<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for p in &self.pairs {
            writeln!(w, "{p}")?;
        }
        Ok(())
    }

    /// Writes `id1,id2,score` lines, scoring each pair with `score`.
    pub fn write_scored<W: Write, E>(&self, mut w: W, mut score: impl FnMut(&Pair) -> Result<f64, E>) -> Result<(), E>
    where
        E: From<std::io::Error>,
    {
        for p in &self.pairs {
            let s = score(p)?;
            writeln!(w, "{p},{s}")?;
        }
        Ok(())
    }

    /// Parses `id1,id2[,score]` lines; any score column is ignored.
    pub fn parse_pairs(text: &str) -> crate::Result<BTreeSet<Pair>> {
        let mut out = BTreeSet::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| crate::Error::Parse {
                line: n + 1,
                msg: msg.to_string(),
            };
            let mut f = line.split(',');
            let a: u64 = f
                .next()
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| err("bad id1"))?;
            let b: u64 = f
                .next()
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| err("bad id2"))?;
            if a == b {
                return Err(err("self-pair"));
            }
            out.insert(Pair::new(RecordId(a), RecordId(b)));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_is_canonical() {
        let p = Pair::new(RecordId(5), RecordId(2));
        assert_eq!((p.lo(), p.hi()), (RecordId(2), RecordId(5)));
        assert_eq!(p, Pair::new(RecordId(2), RecordId(5)));
        assert_eq!(p.to_string(), "2,5");
    }

    #[test]
    fn parse_and_write() {
        let pairs = CandidateSet::parse_pairs("3,1\n1,2,0.5\n\n").unwrap();
        let cs = CandidateSet::unscored(pairs);
        let mut out = Vec::new();
        cs.write_pairs(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "1,2\n1,3\n");
        assert!(CandidateSet::parse_pairs("4,4\n").is_err());
    }
}
