use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use snblock::model::LookupTable;
use snblock::{AutoSolver, Dataset, ExactSolver, GreedySolver, ScoringHeuristic, TourSolver};

use crate::SolverKind;

/// A file, or stdout when no path is given.
pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// `header` of `None` means: a header exists iff the first field of the
/// first line is not an integer id.
pub fn read_dataset(path: &Path, header: Option<bool>) -> Result<Dataset> {
    let text = read_text(path)?;
    let has_header = header.unwrap_or_else(|| {
        text.lines()
            .next()
            .and_then(|l| l.split(',').next())
            .is_some_and(|f| f.trim().parse::<u64>().is_err())
    });
    Dataset::read_csv(text.as_bytes(), has_header).with_context(|| format!("reading {}", path.display()))
}

pub fn header_flag(header: bool, no_header: bool) -> Option<bool> {
    match (header, no_header) {
        (true, _) => Some(true),
        (_, true) => Some(false),
        _ => None,
    }
}

pub fn heuristic(spec: &str) -> Result<ScoringHeuristic> {
    Ok(match spec {
        "jaccard" | "token-jaccard" => ScoringHeuristic::token_jaccard(),
        "cosine" | "cosine-tf" => ScoringHeuristic::cosine_tf(),
        s => match s.strip_prefix("lookup:") {
            Some(p) => {
                let path = Path::new(p);
                let table = LookupTable::parse(File::open(path).with_context(|| format!("cannot open {p}"))?)
                    .with_context(|| format!("reading {p}"))?;
                ScoringHeuristic::lookup(table)
            }
            None => bail!(snblock::Error::Config(format!(
                "unknown heuristic `{s}` (expected jaccard, cosine or lookup:PATH)"
            ))),
        },
    })
}

pub fn solver(kind: SolverKind) -> Box<dyn TourSolver> {
    match kind {
        SolverKind::Exact => Box::new(ExactSolver::default()),
        SolverKind::Greedy => Box::new(GreedySolver),
        SolverKind::Auto => Box::new(AutoSolver::default()),
    }
}
