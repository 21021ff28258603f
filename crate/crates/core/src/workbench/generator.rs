//! Synthetic person records with planted blocks.
//!
//! Attributes are `[first, last, zip, city]`. The initials key maps every
//! record of planted block `b` to the same four-character BKV, and BKVs
//! sort in planted order, so block `b` of the index is block `b` of the
//! size model.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::metrics::GroundTruth;
use super::zipf::Distribution;
use crate::error::{Error, Result};
use crate::model::{Dataset, Pair, Record, RecordId};

/// Number of distinct initials BKVs the generator can produce.
pub const MAX_BLOCKS: usize = 26 * 26 * 10 * 26;

pub const ATTRIBUTE_NAMES: [&str; 4] = ["first", "last", "zip", "city"];

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub u: usize,
    pub distribution: Distribution,
    /// Fraction of records that are perturbed copies, in [0,1].
    pub dup_rate: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(n: usize, u: usize, distribution: Distribution, dup_rate: f64, seed: u64) -> Self {
        GeneratorConfig {
            n,
            u,
            distribution,
            dup_rate,
            seed,
        }
    }

    pub fn planted_sizes(&self) -> Result<Vec<usize>> {
        if self.u > MAX_BLOCKS {
            return Err(Error::contract(format!("at most {MAX_BLOCKS} blocks are supported")));
        }
        if !(0.0..=1.0).contains(&self.dup_rate) {
            return Err(Error::contract("dup_rate must lie in [0,1]"));
        }
        self.distribution.block_sizes(self.n, self.u)
    }
}

/// Initial characters of planted block `b`, ascending in `b`.
fn block_initials(b: usize) -> [char; 4] {
    let d3 = b % 26;
    let d2 = (b / 26) % 10;
    let d1 = (b / 260) % 26;
    let d0 = b / (260 * 26);
    let letter = |d: usize| (b'A' + d as u8) as char;
    [letter(d0), letter(d1), (b'0' + d2 as u8) as char, letter(d3)]
}

const SYLLABLES: [&str; 16] = [
    "an", "bel", "car", "do", "el", "fin", "ga", "ha", "ir", "jo", "ka", "len", "mar", "ne", "ro", "sa",
];

fn word(rng: &mut ChaCha8Rng, initial: char) -> String {
    let mut s = String::new();
    s.push(initial);
    for _ in 0..rng.gen_range(1..=3) {
        s.push_str(SYLLABLES[rng.gen_range(0..SYLLABLES.len())]);
    }
    s
}

fn zip(rng: &mut ChaCha8Rng, lead: char) -> String {
    let mut s = String::from(lead);
    for _ in 0..4 {
        s.push((b'0' + rng.gen_range(0..10u8)) as char);
    }
    s
}

/// Applies one perturbation that keeps the first character of every token.
fn perturb(rng: &mut ChaCha8Rng, attrs: &mut [String; 4]) {
    match rng.gen_range(0..3) {
        // abbreviate the first name: "Johan" -> "J."
        0 => {
            let c = attrs[0].chars().next().expect("names are non-empty");
            attrs[0] = format!("{c}.");
        }
        // swap two adjacent characters after the first
        1 => {
            let a = rng.gen_range(0..4);
            let mut cs: Vec<char> = attrs[a].chars().collect();
            if cs.len() >= 3 {
                let i = rng.gen_range(1..cs.len() - 1);
                cs.swap(i, i + 1);
                attrs[a] = cs.into_iter().collect();
            }
        }
        // drop one character after the first
        _ => {
            let a = rng.gen_range(0..4);
            let mut cs: Vec<char> = attrs[a].chars().collect();
            if cs.len() >= 2 {
                cs.remove(rng.gen_range(1..cs.len()));
                attrs[a] = cs.into_iter().collect();
            }
        }
    }
}

/// Deterministic dataset and ground truth for `cfg`.
pub fn generate_dataset(cfg: &GeneratorConfig) -> Result<(Dataset, GroundTruth)> {
    let sizes = cfg.planted_sizes()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ids: Vec<u64> = (1..=cfg.n as u64).collect();
    ids.shuffle(&mut rng);
    let mut next_id = ids.into_iter();

    let mut records = Vec::with_capacity(cfg.n);
    let mut truth = BTreeSet::new();
    for (b, &s) in sizes.iter().enumerate() {
        let [c0, c1, c2, c3] = block_initials(b);
        let dups = ((cfg.dup_rate * s as f64).round() as usize).min(s - 1);
        let mut entities: Vec<(RecordId, [String; 4], Vec<RecordId>)> = Vec::new();
        for _ in 0..s - dups {
            let attrs = [
                word(&mut rng, c0),
                word(&mut rng, c1),
                zip(&mut rng, c2),
                word(&mut rng, c3),
            ];
            let id = RecordId(next_id.next().expect("one id per record"));
            entities.push((id, attrs, Vec::new()));
        }
        for _ in 0..dups {
            let e = rng.gen_range(0..entities.len());
            let mut attrs = entities[e].1.clone();
            perturb(&mut rng, &mut attrs);
            let id = RecordId(next_id.next().expect("one id per record"));
            records.push(Record::new(id.0, attrs));
            entities[e].2.push(id);
        }
        for (id, attrs, copies) in entities {
            let cluster: Vec<RecordId> = std::iter::once(id).chain(copies).collect();
            for i in 0..cluster.len() {
                for j in (i + 1)..cluster.len() {
                    truth.insert(Pair::new(cluster[i], cluster[j]));
                }
            }
            records.push(Record::new(id.0, attrs));
        }
    }
    records.sort_by_key(|r| r.id);
    Ok((Dataset::new(records)?, GroundTruth { pairs: truth }))
}
