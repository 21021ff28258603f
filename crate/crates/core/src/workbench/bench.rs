//! Scenario benchmarks over generated data.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use super::generator::{generate_dataset, GeneratorConfig};
use super::zipf::Distribution;
use crate::error::{Error, Result};
use crate::exec::Parallelism;
use crate::mapreduce::{run_mapreduce_blocking, traditional_blocking, MapReduceConfig};
use crate::model::{BlockingKeySpec, ScoringHeuristic};
use crate::pipeline::single_pass_local;
use crate::tsp::AutoSolver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchModule {
    SnLocal,
    Traditional,
    MapReduce,
}

impl FromStr for BenchModule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sn" | "sn-local" => Ok(BenchModule::SnLocal),
            "traditional" => Ok(BenchModule::Traditional),
            "mapreduce" => Ok(BenchModule::MapReduce),
            other => Err(Error::config(format!("unknown bench module '{other}'"))),
        }
    }
}

impl fmt::Display for BenchModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchModule::SnLocal => "sn-local",
            BenchModule::Traditional => "traditional",
            BenchModule::MapReduce => "mapreduce",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub module: BenchModule,
    pub distributions: Vec<Distribution>,
    pub sizes: Vec<usize>,
    pub u: usize,
    pub dup_rate: f64,
    pub seed: u64,
    /// Reducer workers for the mapreduce module; defaults to `u`.
    pub reducers: Option<usize>,
    pub parallelism: Parallelism,
}

impl Scenario {
    pub fn new(module: BenchModule, sizes: Vec<usize>, u: usize) -> Self {
        Scenario {
            module,
            distributions: vec![Distribution::Uniform, Distribution::Zipf],
            sizes,
            u,
            dup_rate: 0.1,
            seed: 0,
            reducers: None,
            parallelism: Parallelism::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub module: BenchModule,
    pub distribution: Distribution,
    pub n: usize,
    pub u: usize,
    pub largest_block: usize,
    pub candidates: usize,
    /// Simulated, mapreduce only.
    pub critical_path: Option<f64>,
    pub generate: Duration,
    pub block: Duration,
}

/// Runs every (distribution, n) combination of the scenario.
pub fn bench(scenario: &Scenario) -> Result<Vec<BenchRow>> {
    let key = BlockingKeySpec::initials();
    let f = ScoringHeuristic::token_jaccard().localize(&key);
    let solver = AutoSolver::default();
    let mut rows = Vec::new();
    for &dist in &scenario.distributions {
        for &n in &scenario.sizes {
            let cfg = GeneratorConfig::new(n, scenario.u, dist, scenario.dup_rate, scenario.seed);
            let t = Instant::now();
            let (ds, _) = generate_dataset(&cfg)?;
            let generate = t.elapsed();
            let largest_block = cfg.planted_sizes()?.into_iter().max().unwrap_or(0);
            let t = Instant::now();
            let (candidates, critical_path) = match scenario.module {
                BenchModule::SnLocal => (
                    single_pass_local(&ds, &key, &f, &solver, scenario.parallelism)?
                        .candidates
                        .len(),
                    None,
                ),
                BenchModule::Traditional => (traditional_blocking(&ds, &key, &f, &solver)?.len(), None),
                BenchModule::MapReduce => {
                    let mut mr = MapReduceConfig::new(1, scenario.reducers.unwrap_or(scenario.u), scenario.seed)?;
                    mr.parallelism = scenario.parallelism;
                    let out = run_mapreduce_blocking(&ds, &key, &f, &mr, &solver)?;
                    (out.pairs.len(), Some(out.critical_path))
                }
            };
            rows.push(BenchRow {
                module: scenario.module,
                distribution: dist,
                n,
                u: scenario.u,
                largest_block,
                candidates,
                critical_path,
                generate,
                block: t.elapsed(),
            });
        }
    }
    Ok(rows)
}

pub fn write_bench_table<W: Write>(mut w: W, rows: &[BenchRow]) -> std::io::Result<()> {
    writeln!(
        w,
        "module,distribution,n,u,largest_block,candidates,critical_path,generate_ms,block_ms"
    )?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{:.3},{:.3}",
            r.module,
            r.distribution,
            r.n,
            r.u,
            r.largest_block,
            r.candidates,
            r.critical_path.map(|c| c.to_string()).unwrap_or_default(),
            r.generate.as_secs_f64() * 1e3,
            r.block.as_secs_f64() * 1e3
        )?;
    }
    Ok(())
}
