use std::fmt;
use std::time::Duration;

use super::config::Config;
use crate::error::Result;
use crate::tsp::ApproxProfile;

/// Summary of one blocking run, written as `key = value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub mode: String,
    pub records: usize,
    pub candidates: usize,
    pub score: Option<f64>,
    pub pc: Option<f64>,
    pub recall: Option<f64>,
    pub block_sizes: Vec<usize>,
    pub profile: Option<ApproxProfile>,
    pub stages: Vec<(String, Duration)>,
    /// Mode-specific entries, written after the fixed ones.
    pub extra: Vec<(String, String)>,
}

impl RunReport {
    pub fn new(mode: impl Into<String>) -> Self {
        RunReport {
            mode: mode.into(),
            ..Default::default()
        }
    }

    pub fn stage(&mut self, name: &str, elapsed: Duration) {
        self.stages.push((name.to_string(), elapsed));
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.extra.push((key.into(), value.to_string()));
    }

    /// Parses a written report back into raw entries.
    pub fn parse_entries(text: &str) -> Result<Config> {
        Config::parse(text)
    }
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode = {}", self.mode)?;
        writeln!(f, "records = {}", self.records)?;
        writeln!(f, "candidates = {}", self.candidates)?;
        if let Some(s) = self.score {
            writeln!(f, "score = {s}")?;
        }
        if let Some(pc) = self.pc {
            writeln!(f, "pairs_completeness = {pc}")?;
        }
        if let Some(r) = self.recall {
            writeln!(f, "recall = {r}")?;
        }
        writeln!(f, "blocks = {}", self.block_sizes.len())?;
        writeln!(f, "block_sizes = {}", join(&self.block_sizes))?;
        if let Some(p) = self.profile {
            writeln!(f, "solver_rho = {}", p.ratio())?;
            match p.exponent {
                Some(q) => writeln!(f, "solver_q = {q}")?,
                None => writeln!(f, "solver_q = exp")?,
            }
        }
        for (name, d) in &self.stages {
            writeln!(f, "time_{name}_ms = {:.3}", d.as_secs_f64() * 1e3)?;
        }
        for (k, v) in &self.extra {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}
