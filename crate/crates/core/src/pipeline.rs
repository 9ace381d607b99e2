//! Query orchestration and result formatting for the command-line tool.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use crate::engine::EngineOptions;
use crate::error::{Error, Result};
use crate::preprocess::PreprocessedDatabase;
use crate::report::GcupsReport;
use crate::scheduler::{run_search, sort_results, SearchResult};
use crate::scoring::{GapPenalties, SubstitutionMatrix};
use crate::sequence::Sequence;

pub const DEFAULT_MATRIX: &str = "blosum62";
pub const DEFAULT_GAP_OPEN: i32 = 10;
pub const DEFAULT_GAP_EXTEND: i32 = 2;
pub const DEFAULT_TOP_K: usize = 10;
pub const TSV_HEADER: &str = "rank\tscore\tdb_id\tdb_length";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Text,
    Tsv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "tsv" => Ok(OutputFormat::Tsv),
            other => Err(Error::argument(format!("unknown output format {other:?}"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Text => "text",
            OutputFormat::Tsv => "tsv",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub query_path: PathBuf,
    pub db_path: Option<PathBuf>,
    /// `blosum62` or a path to a matrix file.
    pub matrix: String,
    pub gap_open: i32,
    pub gap_extend: i32,
    pub threads: usize,
    pub engine: EngineOptions,
    pub top_k: usize,
    pub output: OutputFormat,
    pub db_cache: Option<PathBuf>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            query_path: PathBuf::new(),
            db_path: None,
            matrix: DEFAULT_MATRIX.to_string(),
            gap_open: DEFAULT_GAP_OPEN,
            gap_extend: DEFAULT_GAP_EXTEND,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            engine: EngineOptions::default(),
            top_k: DEFAULT_TOP_K,
            output: OutputFormat::Text,
            db_cache: None,
        }
    }
}

/// Sorted results of one query and the throughput of its search.
#[derive(Clone, Debug)]
pub struct QueryOutcome {
    pub results: Vec<SearchResult>,
    pub report: GcupsReport,
}

/// Searches one query and sorts the scores. The timed window spans the
/// search and the sort; database loading and preprocessing are outside it.
pub fn run_query(
    query: &Sequence,
    pdb: &PreprocessedDatabase,
    sm: &SubstitutionMatrix,
    gp: &GapPenalties,
    opts: &EngineOptions,
    threads: usize,
) -> Result<QueryOutcome> {
    let start = Instant::now();
    let results = sort_results(run_search(query, pdb, sm, gp, opts, threads)?);
    // Guard against a zero reading from a coarse clock on tiny inputs.
    let seconds = start.elapsed().as_secs_f64().max(1e-9);
    let report = GcupsReport::new(query.len() as u64, pdb.total_residues, seconds)?;
    Ok(QueryOutcome { results, report })
}

/// Writes the top `k` results of one query.
pub fn write_results<W: Write>(
    out: &mut W,
    query: &Sequence,
    outcome: &QueryOutcome,
    top_k: usize,
    format: OutputFormat,
) -> std::io::Result<()> {
    let rows = outcome.results.iter().take(top_k).enumerate();
    match format {
        OutputFormat::Text => {
            writeln!(out, "Query: {} ({} residues)", query.id, query.len())?;
            writeln!(
                out,
                "{:>5} {:>8}  {:<24} {:>9}",
                "rank", "score", "db_id", "db_length"
            )?;
            for (rank, r) in rows {
                writeln!(
                    out,
                    "{:>5} {:>8}  {:<24} {:>9}",
                    rank + 1,
                    r.score,
                    r.db_id,
                    r.db_length
                )?;
            }
        }
        OutputFormat::Tsv => {
            writeln!(out, "# query\t{}", query.id)?;
            writeln!(out, "{TSV_HEADER}")?;
            for (rank, r) in rows {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    rank + 1,
                    r.score,
                    r.db_id,
                    r.db_length
                )?;
            }
            writeln!(out, "# gcups {}", outcome.report)?;
        }
    }
    Ok(())
}
