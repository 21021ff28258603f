use std::io::Write;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use snblock::ordering::{brute_force_best_2_ordering, order_block_tsp};
use snblock::reductions::{verify_equivalence, VerifyOptions};
use snblock::tsp::records_to_graph;
use snblock::workbench::{
    self, generate_dataset, pairs_completeness, recall, write_bench_table, Distribution, GeneratorConfig, GroundTruth,
    Scenario, ATTRIBUTE_NAMES,
};
use snblock::{CandidateSet, Error, Parallelism, Record, TspGraph};

use crate::io::{header_flag, heuristic, output, read_dataset, read_text, solver};
use crate::{BenchArgs, GenerateArgs, OrderArgs, PairFormat, ScoreArgs, VerifyArgs};

pub fn generate(a: GenerateArgs) -> Result<ExitCode> {
    let cfg = GeneratorConfig::new(a.n, a.u, a.dist, a.dup_rate, a.seed);
    let (ds, truth) = generate_dataset(&cfg)?;
    let mut header = vec!["id"];
    header.extend(ATTRIBUTE_NAMES);
    let mut w = output(a.out.as_deref())?;
    ds.write_csv(&mut w, Some(&header))?;
    w.flush()?;
    if let Some(p) = &a.truth {
        let mut w = output(Some(p))?;
        truth.write(&mut w)?;
        w.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

pub fn order_block(a: OrderArgs) -> Result<ExitCode> {
    let solver = solver(a.solver);
    let mut out = output(None)?;
    if let Some(p) = &a.graph {
        let g = TspGraph::read_edges(&read_text(p)?)?;
        let tour = solver.solve(&g)?;
        writeln!(out, "solver = {}", solver.name())?;
        writeln!(out, "tour = {}", join(&tour.order))?;
        writeln!(out, "weight = {}", tour.weight(&g))?;
        writeln!(out, "optimal = {}", solver.is_exact_for(&g))?;
        out.flush()?;
        return Ok(ExitCode::SUCCESS);
    }
    let input = a.input.as_ref().expect("clap requires input or graph");
    let ds = read_dataset(input, header_flag(a.header, a.no_header))?;
    let f = heuristic(&a.heuristic)?;
    let block: Vec<&Record> = ds.records().iter().collect();
    if let Some(p) = &a.graph_out {
        let g = records_to_graph(&block, &f, true)?;
        let mut w = output(Some(p))?;
        g.write_edges(&mut w)?;
        w.flush()?;
    }
    let res = if a.brute_force {
        brute_force_best_2_ordering(&block, &f)?
    } else {
        order_block_tsp(&block, &f, solver.as_ref())?
    };
    writeln!(
        out,
        "solver = {}",
        if a.brute_force { "brute-force" } else { solver.name() }
    )?;
    writeln!(out, "list = {}", join(&res.list))?;
    writeln!(out, "score = {}", res.score)?;
    writeln!(out, "optimal = {}", res.optimal)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

pub fn reduce_verify(a: VerifyArgs, par: Parallelism) -> Result<ExitCode> {
    let mut opts = VerifyOptions::new(a.theorem, a.seeds);
    opts.first_seed = a.first_seed;
    if let Some(m) = a.max_m {
        opts.max_m = m;
    }
    opts.w = a.w;
    opts.k_offset = a.k_offset;
    opts.parallelism = par;
    let rep = verify_equivalence(&opts)?;
    let mut out = output(None)?;
    write!(out, "{rep}")?;
    out.flush()?;
    Ok(if rep.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn bench(a: BenchArgs, par: Parallelism) -> Result<ExitCode> {
    let mut s = Scenario::new(a.module, a.sizes, a.u);
    s.distributions = match a.dist.as_str() {
        "both" => vec![Distribution::Uniform, Distribution::Zipf],
        d => vec![d.parse()?],
    };
    s.dup_rate = a.dup_rate;
    s.seed = a.seed;
    s.reducers = a.reducers;
    s.parallelism = par;
    let rows = workbench::bench(&s)?;
    let mut out = output(None)?;
    write_bench_table(&mut out, &rows)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

pub fn score(a: ScoreArgs) -> Result<ExitCode> {
    let text = read_text(&a.candidates)?;
    let text = match a.format {
        PairFormat::Pairs => text,
        PairFormat::Scored => text
            .lines()
            .map(|l| match l.split_once(',') {
                Some((_, ids)) => Ok(ids.to_string()),
                None if l.trim().is_empty() => Ok(String::new()),
                None => Err(anyhow!(Error::Parse {
                    line: 0,
                    msg: format!("expected score,id1,id2, got `{l}`")
                })),
            })
            .collect::<Result<Vec<_>>>()?
            .join("\n"),
    };
    let cs = CandidateSet::unscored(CandidateSet::parse_pairs(&text)?);
    let truth = GroundTruth::parse(&read_text(&a.truth)?)?;
    let mut out = output(None)?;
    writeln!(out, "candidates = {}", cs.len())?;
    writeln!(out, "true_pairs = {}", truth.len())?;
    writeln!(out, "pairs_completeness = {}", pairs_completeness(&cs, &truth)?)?;
    match recall(&cs, &truth) {
        Ok(r) => writeln!(out, "recall = {r}")?,
        Err(_) => writeln!(out, "recall = undefined")?,
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
