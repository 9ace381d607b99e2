//! Smith-Waterman protein database search with inter-sequence lane
//! parallelism.
//!
//! The pipeline has three stages:
//!
//! 1. [`preprocess`] sorts the database by length and packs it into
//!    lockstep chunks of `L` sequences.
//! 2. [`scheduler::run_search`] hands chunks to worker threads, which align
//!    the query against every lane of a chunk at once with saturating
//!    narrow integers ([`engine`]) and re-run overflowed lanes at wider
//!    ranges.
//! 3. [`scheduler::sort_results`] orders the scores.
//!
//! [`oracle`] holds the plain scalar recurrences every vector path is
//! tested against.

pub mod alphabet;
pub mod cache;
pub mod engine;
pub mod error;
pub mod lanes;
pub mod oracle;
pub mod pipeline;
pub mod preprocess;
pub mod profile;
pub mod report;
pub mod scheduler;
pub mod scoring;
pub mod sequence;

pub use alphabet::Alphabet;
pub use error::{Error, Result};
pub use oracle::{align_scalar, Score};
pub use preprocess::{preprocess, DatabaseChunk, ElementWidth, LaneConfig, PreprocessedDatabase};
pub use scoring::{GapPenalties, SubstitutionMatrix};
pub use sequence::{parse_fasta, Sequence};
