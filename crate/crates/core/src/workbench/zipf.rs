use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// H_u = 1 + 1/2 + ... + 1/u.
pub fn harmonic_sum(u: usize) -> Result<f64> {
    if u < 1 {
        return Err(Error::contract("harmonic_sum needs u >= 1"));
    }
    // smallest terms first
    Ok((1..=u).rev().map(|i| 1.0 / i as f64).sum())
}

/// Block sizes where block `m` (1-based) gets about `n / (m·H_u)` records.
///
/// Raw sizes are floored (never below 1) and the leftover records go to
/// the largest fractional parts, ties to the smaller `m`. Blocks that were
/// raised to 1 take no leftovers, which keeps the sizes non-increasing.
pub fn zipf_block_sizes(n: usize, u: usize) -> Result<Vec<usize>> {
    if u < 1 || n < u {
        return Err(Error::contract(format!("need n >= u >= 1, got n={n} u={u}")));
    }
    let h = harmonic_sum(u)?;
    let raw: Vec<f64> = (1..=u).map(|m| n as f64 / (m as f64 * h)).collect();
    let mut sizes: Vec<usize> = raw.iter().map(|&r| ((r + 1e-9).floor() as usize).max(1)).collect();
    let rem: Vec<f64> = raw
        .iter()
        .zip(&sizes)
        .map(|(&r, &s)| {
            if (s as f64) > r {
                f64::NEG_INFINITY
            } else {
                r - s as f64
            }
        })
        .collect();
    let total: usize = sizes.iter().sum();
    if total < n {
        let mut order: Vec<usize> = (0..u).collect();
        order.sort_by(|&a, &b| rem[b].total_cmp(&rem[a]).then(a.cmp(&b)));
        for i in 0..(n - total) {
            sizes[order[i % u]] += 1;
        }
    } else {
        for _ in 0..(total - n) {
            let last = sizes.iter().rposition(|&s| s > 1).expect("n >= u leaves room");
            sizes[last] -= 1;
        }
    }
    Ok(sizes)
}

/// `n / u` per block, the remainder spread over the first blocks.
pub fn uniform_block_sizes(n: usize, u: usize) -> Result<Vec<usize>> {
    if u < 1 || n < u {
        return Err(Error::contract(format!("need n >= u >= 1, got n={n} u={u}")));
    }
    Ok((0..u).map(|i| n / u + usize::from(i < n % u)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distribution {
    Uniform,
    Zipf,
}

impl Distribution {
    pub fn block_sizes(self, n: usize, u: usize) -> Result<Vec<usize>> {
        match self {
            Distribution::Uniform => uniform_block_sizes(n, u),
            Distribution::Zipf => zipf_block_sizes(n, u),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Distribution::Uniform),
            "zipf" => Ok(Distribution::Zipf),
            other => Err(Error::config(format!("unknown distribution '{other}'"))),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distribution::Uniform => "uniform",
            Distribution::Zipf => "zipf",
        })
    }
}
