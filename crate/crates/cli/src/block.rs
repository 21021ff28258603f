use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::ValueEnum;
use snblock::mapreduce::{
    run_mapreduce_blocking, to_candidate_set, traditional_blocking, write_scored_pairs, MapReduceConfig,
};
use snblock::pipeline::{multi_pass, single_pass_global, single_pass_local, PassSpec};
use snblock::workbench::{pairs_completeness, recall, Config, GroundTruth, RunReport};
use snblock::{BlockIndex, BlockingKeySpec, CandidateSet, Dataset, Error, Parallelism, ScoringHeuristic};

use crate::io::{header_flag, heuristic, output, read_dataset, read_text, solver};
use crate::{BlockArgs, Mode, SolverKind};

const CONFIG_KEYS: &[&str] = &[
    "input",
    "mode",
    "key",
    "heuristic",
    "solver",
    "passes",
    "mappers",
    "reducers",
    "seed",
    "header",
    "out",
    "report",
    "truth",
];

struct Settings {
    input: PathBuf,
    mode: Mode,
    key: BlockingKeySpec,
    heuristic: String,
    solver: SolverKind,
    passes: Vec<String>,
    mappers: usize,
    reducers: usize,
    seed: u64,
    header: Option<bool>,
    out: Option<PathBuf>,
    report: Option<PathBuf>,
    truth: Option<PathBuf>,
}

fn enum_value<T: ValueEnum>(key: &str, v: &str) -> Result<T> {
    T::from_str(v, false).map_err(|_| anyhow!(Error::Config(format!("{key} = {v}: unknown value"))))
}

fn resolve(a: BlockArgs) -> Result<Settings> {
    let cfg = match &a.config {
        Some(p) => {
            let c = Config::parse(&read_text(p)?).with_context(|| format!("in config {}", p.display()))?;
            c.check_keys(CONFIG_KEYS)?;
            c
        }
        None => Config::default(),
    };
    let path = |cli: Option<PathBuf>, key: &str| cli.or_else(|| cfg.get(key).map(PathBuf::from));
    let mode = match a.mode {
        Some(m) => m,
        None => cfg
            .get("mode")
            .map(|v| enum_value("mode", v))
            .transpose()?
            .unwrap_or(Mode::SnLocal),
    };
    let solver = match a.solver {
        Some(s) => s,
        None => cfg
            .get("solver")
            .map(|v| enum_value("solver", v))
            .transpose()?
            .unwrap_or(SolverKind::Auto),
    };
    let key_text = a
        .key
        .or_else(|| cfg.get("key").map(String::from))
        .unwrap_or_else(|| "initials".into());
    let passes = if a.passes.is_empty() {
        cfg.get("passes")
            .map(|v| {
                v.split(';')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            })
            .unwrap_or_default()
    } else {
        a.passes
    };
    let header = match header_flag(a.header, a.no_header) {
        Some(h) => Some(h),
        None => cfg.get_parsed::<bool>("header")?,
    };
    Ok(Settings {
        input: path(a.input, "input").ok_or_else(|| anyhow!(Error::Config("no input file given".into())))?,
        mode,
        key: key_text.parse()?,
        heuristic: a
            .heuristic
            .or_else(|| cfg.get("heuristic").map(String::from))
            .unwrap_or_else(|| "jaccard".into()),
        solver,
        passes,
        mappers: a
            .mappers
            .map_or_else(|| cfg.get_parsed("mappers"), |v| Ok(Some(v)))?
            .unwrap_or(1),
        reducers: a
            .reducers
            .map_or_else(|| cfg.get_parsed("reducers"), |v| Ok(Some(v)))?
            .unwrap_or(4),
        seed: a
            .seed
            .map_or_else(|| cfg.get_parsed("seed"), |v| Ok(Some(v)))?
            .unwrap_or(0),
        header,
        out: path(a.out, "out"),
        report: path(a.report, "report"),
        truth: path(a.truth, "truth"),
    })
}

fn parse_pass(s: &str) -> Result<(BlockingKeySpec, ScoringHeuristic)> {
    let (k, h) = s
        .rsplit_once('@')
        .ok_or_else(|| anyhow!(Error::Config(format!("pass `{s}` is not KEY@HEURISTIC"))))?;
    let key: BlockingKeySpec = k.parse()?;
    let f = heuristic(h)?.localize(&key);
    Ok((key, f))
}

fn write_scored_candidates(out: Option<&Path>, ds: &Dataset, cs: &CandidateSet, f: &ScoringHeuristic) -> Result<()> {
    let mut w = output(out)?;
    cs.write_scored(&mut w, |p| -> Result<f64> {
        let (a, b) = (
            ds.get(p.lo()).expect("pair from dataset"),
            ds.get(p.hi()).expect("pair from dataset"),
        );
        Ok(f.score(a, b)?)
    })?;
    w.flush()?;
    Ok(())
}

pub fn run(args: BlockArgs, par: Parallelism) -> Result<ExitCode> {
    let s = resolve(args)?;
    let t = Instant::now();
    let ds = read_dataset(&s.input, s.header)?;
    s.key.validate(ds.arity())?;
    let mut report = RunReport::new(Mode::to_possible_value(&s.mode).map_or("?".into(), |v| v.get_name().to_string()));
    report.records = ds.len();
    report.stage("read", t.elapsed());
    let solver = solver(s.solver);
    report.profile = Some(solver.profile());
    report.push("solver", solver.name());

    let t = Instant::now();
    let candidates = match s.mode {
        Mode::SnLocal => {
            let f = heuristic(&s.heuristic)?.localize(&s.key);
            let out = single_pass_local(&ds, &s.key, &f, solver.as_ref(), par)?;
            report.stage("block", t.elapsed());
            report.block_sizes = out.trace.block_sizes();
            report.push("all_blocks_optimal", out.all_blocks_optimal);
            write_scored_candidates(s.out.as_deref(), &ds, &out.candidates, &f)?;
            out.candidates
        }
        Mode::SnGlobal => {
            let f = heuristic(&s.heuristic)?;
            let out = single_pass_global(&ds, &s.key, &f, solver.as_ref(), par)?;
            report.stage("block", t.elapsed());
            report.block_sizes = out.base.block_sizes();
            report.push("chosen_list", out.chosen);
            for (i, sc) in out.scores.iter().enumerate() {
                report.push(format!("score_list_{}", i + 1), sc);
            }
            report.push("gas_swaps_forward", out.forward.swaps.len());
            report.push("gas_swaps_backward", out.backward.swaps.len());
            write_scored_candidates(s.out.as_deref(), &ds, &out.candidates, &f)?;
            out.candidates
        }
        Mode::SnMulti => {
            if s.passes.is_empty() {
                return Err(anyhow!(Error::Config(
                    "sn-multi needs at least one --pass KEY@HEURISTIC".into()
                )));
            }
            let passes = s.passes.iter().map(|p| parse_pass(p)).collect::<Result<Vec<_>>>()?;
            for (k, _) in &passes {
                k.validate(ds.arity())?;
            }
            let out = multi_pass(&ds, &PassSpec::new(passes)?, solver.as_ref(), par)?;
            report.stage("block", t.elapsed());
            report.block_sizes = out.per_pass[0].trace.block_sizes();
            report.push("passes", out.per_pass.len());
            for (i, p) in out.per_pass.iter().enumerate() {
                report.push(format!("pass_{}_candidates", i + 1), p.candidates.len());
                report.push(format!("pass_{}_score", i + 1), p.candidates.score);
            }
            let cs = out.candidates();
            let mut w = output(s.out.as_deref())?;
            cs.write_pairs(&mut w)?;
            w.flush()?;
            cs
        }
        Mode::Traditional => {
            let f = heuristic(&s.heuristic)?;
            let pairs = traditional_blocking(&ds, &s.key, &f, solver.as_ref())?;
            report.stage("block", t.elapsed());
            report.block_sizes = BlockIndex::build(ds.records(), &s.key)?.sizes();
            let cs = to_candidate_set(&pairs);
            write_scored_candidates(s.out.as_deref(), &ds, &cs, &f)?;
            cs
        }
        Mode::Mapreduce => {
            let f = heuristic(&s.heuristic)?;
            let mut cfg = MapReduceConfig::new(s.mappers, s.reducers, s.seed)?;
            cfg.parallelism = par;
            let out = run_mapreduce_blocking(&ds, &s.key, &f, &cfg, solver.as_ref())?;
            report.stage("block", t.elapsed());
            report.block_sizes = out.reducers.iter().map(|r| r.size).collect();
            report.push("mappers", s.mappers);
            report.push("reducers", s.reducers);
            report.push("reducer_instances", out.reducers.len());
            report.push("critical_path", out.critical_path);
            let largest = out
                .reducers
                .iter()
                .max_by_key(|r| r.size)
                .map(|r| r.bkv.clone())
                .unwrap_or_default();
            report.push("largest_block", largest);
            let mut w = output(s.out.as_deref())?;
            write_scored_pairs(&mut w, &out.pairs)?;
            w.flush()?;
            to_candidate_set(&out.pairs)
        }
    };
    report.candidates = candidates.len();
    if s.mode != Mode::SnMulti {
        report.score = Some(candidates.score);
    }
    if let Some(p) = &s.truth {
        let truth = GroundTruth::parse(&read_text(p)?)?;
        report.pc = pairs_completeness(&candidates, &truth).ok();
        report.recall = recall(&candidates, &truth).ok();
    }
    if let Some(p) = &s.report {
        let mut w = output(Some(p))?;
        write!(w, "{report}")?;
        w.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}
