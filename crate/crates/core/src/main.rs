use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use swdb::cache::{load_cache, save_cache};
use swdb::engine::{Backend, EngineOptions, ProfileStrategy};
use swdb::pipeline::{run_query, write_results, OutputFormat, SearchConfig};
use swdb::scoring::load_matrix;
use swdb::sequence::read_fasta_path;
use swdb::{preprocess, Alphabet, ElementWidth, Error, GapPenalties, PreprocessedDatabase};

const EXIT_MISSING_FILE: u8 = 2;
const EXIT_MALFORMED_INPUT: u8 = 3;
const EXIT_BAD_ARGUMENTS: u8 = 4;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProfileArg {
    Qp,
    Sp,
    Auto,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IntWidthArg {
    #[value(name = "8")]
    W8,
    #[value(name = "16")]
    W16,
    #[value(name = "32")]
    W32,
    Auto,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Auto,
    Portable,
    Avx2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputArg {
    Text,
    Tsv,
}

/// Smith-Waterman protein database search.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    /// Query FASTA file; every record is searched in turn.
    #[arg(long, value_name = "PATH")]
    query: PathBuf,

    /// Database FASTA file. May be omitted when --db-cache names an existing cache.
    #[arg(long, value_name = "PATH")]
    db: Option<PathBuf>,

    /// `blosum62` or a substitution matrix file.
    #[arg(long, default_value = "blosum62")]
    matrix: String,

    #[arg(long, default_value_t = 10, value_name = "N")]
    gap_open: i32,

    #[arg(long, default_value_t = 2, value_name = "N")]
    gap_extend: i32,

    /// Worker threads [default: available parallelism].
    #[arg(long, value_name = "N")]
    threads: Option<usize>,

    #[arg(long, value_enum, default_value = "sp")]
    profile: ProfileArg,

    /// Starting integer width; `auto` starts at 8 bits and widens on overflow.
    #[arg(long, value_enum, default_value = "auto")]
    int_width: IntWidthArg,

    /// Database columns per vertical block; 0 processes whole rows.
    #[arg(long, default_value_t = 64, value_name = "N")]
    block_width: usize,

    #[arg(long, default_value_t = 10, value_name = "N")]
    top_k: usize,

    #[arg(long, value_enum, default_value = "text")]
    output: OutputArg,

    /// Preprocessed database cache; read if present, written otherwise.
    #[arg(long, value_name = "PATH")]
    db_cache: Option<PathBuf>,

    /// Vector width in bits: 128, 256 or 512.
    #[arg(long, default_value_t = 256, value_name = "BITS")]
    vector_width: usize,

    #[arg(long, value_enum, default_value = "auto")]
    backend: BackendArg,
}

impl Cli {
    fn into_config(self) -> SearchConfig {
        let defaults = SearchConfig::default();
        let engine = EngineOptions {
            vector_bits: self.vector_width,
            start_width: match self.int_width {
                IntWidthArg::W8 | IntWidthArg::Auto => ElementWidth::W8,
                IntWidthArg::W16 => ElementWidth::W16,
                IntWidthArg::W32 => ElementWidth::W32,
            },
            backend: match self.backend {
                BackendArg::Auto => Backend::Auto,
                BackendArg::Portable => Backend::Portable,
                BackendArg::Avx2 => Backend::Avx2,
            },
            block_width: (self.block_width > 0).then_some(self.block_width),
            profile: match self.profile {
                ProfileArg::Qp => ProfileStrategy::QueryProfile,
                ProfileArg::Sp => ProfileStrategy::ScoreProfile,
                ProfileArg::Auto => ProfileStrategy::Auto,
            },
            ..EngineOptions::default()
        };
        SearchConfig {
            query_path: self.query,
            db_path: self.db,
            matrix: self.matrix,
            gap_open: self.gap_open,
            gap_extend: self.gap_extend,
            threads: self.threads.unwrap_or(defaults.threads),
            engine,
            top_k: self.top_k,
            output: match self.output {
                OutputArg::Text => OutputFormat::Text,
                OutputArg::Tsv => OutputFormat::Tsv,
            },
            db_cache: self.db_cache,
        }
    }
}

/// An error tagged with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn arguments(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_BAD_ARGUMENTS,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(io) if io.kind() == io::ErrorKind::NotFound => EXIT_MISSING_FILE,
            Error::Io(_) => 1,
            Error::Format { .. }
            | Error::MalformedRecord { .. }
            | Error::Validation(_)
            | Error::Range { .. } => EXIT_MALFORMED_INPUT,
            Error::Argument(_) | Error::Config(_) => EXIT_BAD_ARGUMENTS,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn with_path(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

fn load_database(
    config: &SearchConfig,
    alphabet: &Alphabet,
) -> Result<PreprocessedDatabase, Failure> {
    let lanes = config.engine.lane_config()?;
    if let Some(cache) = config.db_cache.as_deref().filter(|p| p.exists()) {
        match load_cache(cache, alphabet, lanes) {
            Ok(pdb) => return Ok(pdb),
            // A cache packed for another lane layout is rebuilt from the FASTA.
            Err(Error::Config(_)) if config.db_path.is_some() => {}
            Err(e) => return Err(with_path(cache)(e)),
        }
    }
    let db_path = config.db_path.as_deref().ok_or_else(|| {
        Failure::arguments("--db is required unless --db-cache names an existing cache")
    })?;
    let db = read_fasta_path(db_path, alphabet).map_err(with_path(db_path))?;
    if db.is_empty() {
        return Err(Failure {
            code: EXIT_MALFORMED_INPUT,
            message: format!("{}: no sequences", db_path.display()),
        });
    }
    let pdb = preprocess(&db, lanes, alphabet)?;
    if let Some(cache) = &config.db_cache {
        save_cache(&pdb, cache).map_err(with_path(cache))?;
    }
    Ok(pdb)
}

fn run(config: SearchConfig) -> Result<(), Failure> {
    if config.threads == 0 {
        return Err(Failure::arguments("--threads must be at least 1"));
    }
    config.engine.validate()?;
    let gaps = GapPenalties::new(config.gap_open, config.gap_extend)
        .map_err(|e| Failure::arguments(e.to_string()))?;
    let alphabet = Alphabet::protein();
    let matrix =
        load_matrix(&config.matrix, &alphabet).map_err(with_path(Path::new(&config.matrix)))?;
    let queries =
        read_fasta_path(&config.query_path, &alphabet).map_err(with_path(&config.query_path))?;
    if queries.is_empty() {
        return Err(Failure {
            code: EXIT_MALFORMED_INPUT,
            message: format!("{}: no query sequences", config.query_path.display()),
        });
    }
    let pdb = load_database(&config, &alphabet)?;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    for query in &queries {
        let outcome = run_query(query, &pdb, &matrix, &gaps, &config.engine, config.threads)?;
        write_results(&mut out, query, &outcome, config.top_k, config.output)
            .map_err(Error::from)?;
        if config.output == OutputFormat::Text {
            eprintln!("{}: {}", query.id, outcome.report);
        }
    }
    out.flush().map_err(Error::from)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_BAD_ARGUMENTS);
        }
    };
    match run(cli.into_config()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("swdb: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
