//! The SW stage: aligns a query against every lane of a chunk with
//! saturating narrow integers and escalates overflowed lanes.
//!
//! A chunk of `L` lanes is first aligned at the starting range (8-bit by
//! default). A lane whose score reaches the range maximum is flagged, and
//! flags are collected per half of the vector: lanes `[0, L/2)` and
//! `[L/2, L)`. Only flagged halves are recomputed, as a chunk of `L/2`
//! lanes at twice the element width (the same vector width). Lanes that
//! still overflow at 32 bits fall back to the scalar oracle.

mod kernel;

use std::ops::Range;

use crate::error::{Error, Result};
use crate::lanes::{LaneElement, LaneVector, Portable};
use crate::oracle::{self, Score};
use crate::preprocess::{DatabaseChunk, ElementWidth, LaneConfig, VECTOR_BITS};
use crate::profile::{QueryProfile, ScoreProfile, ScoreTable};
use crate::scoring::{GapPenalties, SubstitutionMatrix};

use kernel::{align_lanes, FromQueryProfile, FromScoreProfile, KernelParams, Substitutions};

pub const DEFAULT_BLOCK_WIDTH: usize = 64;
pub const DEFAULT_AUTO_PROFILE_THRESHOLD: usize = 150;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Backend {
    /// AVX2 when the host supports it and the vector width is 256 bits.
    #[default]
    Auto,
    Portable,
    Avx2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum ResolvedBackend {
    Portable,
    #[cfg_attr(not(target_arch = "x86_64"), allow(dead_code))]
    Avx2,
}

impl Backend {
    fn resolve(self, vector_bits: usize) -> Result<ResolvedBackend> {
        match self {
            Backend::Portable => Ok(ResolvedBackend::Portable),
            Backend::Auto if vector_bits == 256 && avx2_available() => Ok(ResolvedBackend::Avx2),
            Backend::Auto => Ok(ResolvedBackend::Portable),
            Backend::Avx2 if vector_bits != 256 => Err(Error::config(format!(
                "the AVX2 backend needs 256-bit vectors, not {vector_bits}"
            ))),
            Backend::Avx2 if avx2_available() => Ok(ResolvedBackend::Avx2),
            Backend::Avx2 => Err(Error::config("this host does not support AVX2")),
        }
    }

    /// Whether `Auto` selects native vectors for `vector_bits` on this host.
    pub fn is_native(self, vector_bits: usize) -> bool {
        matches!(self.resolve(vector_bits), Ok(ResolvedBackend::Avx2))
    }
}

#[cfg(target_arch = "x86_64")]
fn avx2_available() -> bool {
    crate::lanes::avx2::avx2_available()
}

#[cfg(not(target_arch = "x86_64"))]
fn avx2_available() -> bool {
    false
}

/// Which substitution lookup feeds the kernel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ProfileStrategy {
    QueryProfile,
    #[default]
    ScoreProfile,
    /// Query profile below the query-length threshold, score profile otherwise.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    Query,
    Score,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    pub vector_bits: usize,
    pub start_width: ElementWidth,
    pub backend: Backend,
    /// `None` means one block spanning the whole row.
    pub block_width: Option<usize>,
    pub profile: ProfileStrategy,
    pub auto_profile_threshold: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            vector_bits: 256,
            start_width: ElementWidth::W8,
            backend: Backend::Auto,
            block_width: Some(DEFAULT_BLOCK_WIDTH),
            profile: ProfileStrategy::ScoreProfile,
            auto_profile_threshold: DEFAULT_AUTO_PROFILE_THRESHOLD,
        }
    }
}

impl EngineOptions {
    pub fn lane_config(&self) -> Result<LaneConfig> {
        LaneConfig::for_vector(self.vector_bits, self.start_width)
    }

    pub fn profile_kind(&self, query_len: usize) -> ProfileKind {
        match self.profile {
            ProfileStrategy::QueryProfile => ProfileKind::Query,
            ProfileStrategy::ScoreProfile => ProfileKind::Score,
            ProfileStrategy::Auto if query_len < self.auto_profile_threshold => ProfileKind::Query,
            ProfileStrategy::Auto => ProfileKind::Score,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !VECTOR_BITS.contains(&self.vector_bits) {
            return Err(Error::config(format!(
                "vector width {} is not one of {VECTOR_BITS:?}",
                self.vector_bits
            )));
        }
        if self.block_width == Some(0) {
            return Err(Error::config("block width must be positive"));
        }
        self.lane_config()?;
        self.backend.resolve(self.vector_bits)?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OverflowFlags {
    pub lower_half: bool,
    pub upper_half: bool,
}

impl OverflowFlags {
    pub fn any(&self) -> bool {
        self.lower_half || self.upper_half
    }

    /// Lane ranges of the flagged halves of an `lanes`-wide vector.
    pub fn flagged_halves(&self, lanes: usize) -> Vec<Range<usize>> {
        let half = lanes / 2;
        let mut out = Vec::with_capacity(2);
        if self.lower_half {
            out.push(0..half);
        }
        if self.upper_half {
            out.push(half..lanes);
        }
        out
    }
}

/// Per-lane result of one kernel run at a single integer range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChunkScores {
    pub width: ElementWidth,
    /// Exact for lanes that did not overflow; the range maximum otherwise.
    pub scores: Vec<Score>,
    pub overflowed: Vec<bool>,
    pub flags: OverflowFlags,
}

impl ChunkScores {
    /// Classifies raw per-lane maxima. A saturated lane reports `T::MAX`.
    pub fn from_lanes<T: LaneElement>(raw: &[T], bias: T) -> Self {
        let overflowed: Vec<bool> = raw.iter().map(|&s| T::is_saturated(s, bias)).collect();
        let scores = raw
            .iter()
            .zip(&overflowed)
            .map(|(&s, &o)| if o { T::MAX.to_i64() } else { s.to_i64() })
            .collect();
        let half = raw.len() / 2;
        let flags = OverflowFlags {
            lower_half: overflowed[..half].iter().any(|&o| o),
            upper_half: overflowed[half..].iter().any(|&o| o),
        };
        ChunkScores {
            width: T::WIDTH,
            scores,
            overflowed,
            flags,
        }
    }
}

/// One reported score: lane within the chunk, original database index, score.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LaneScore {
    pub lane: usize,
    pub db_index: u32,
    pub score: Score,
}

/// Pairs lane scores with database indices, dropping padding lanes.
pub fn horizontal_finalize(scores: &[Score], sequence_ids: &[Option<u32>]) -> Vec<LaneScore> {
    scores
        .iter()
        .zip(sequence_ids)
        .enumerate()
        .filter_map(|(lane, (&score, id))| {
            id.map(|db_index| LaneScore {
                lane,
                db_index,
                score,
            })
        })
        .collect()
}

/// Counters for kernel runs and recomputation, indexed by element width.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EscalationStats {
    pub kernel_calls: [u64; 3],
    /// Real (non-padding) lanes processed by kernel runs, per width.
    pub lanes_computed: [u64; 3],
    pub oracle_calls: u64,
    /// Database indices recomputed after an overflow, per width they were
    /// recomputed at (index 3 is the scalar oracle).
    pub recomputed: [Vec<u32>; 4],
}

impl EscalationStats {
    pub fn merge(&mut self, other: &EscalationStats) {
        for w in 0..3 {
            self.kernel_calls[w] += other.kernel_calls[w];
            self.lanes_computed[w] += other.lanes_computed[w];
        }
        self.oracle_calls += other.oracle_calls;
        for (mine, theirs) in self.recomputed.iter_mut().zip(&other.recomputed) {
            mine.extend_from_slice(theirs);
        }
    }
}

fn width_index(w: ElementWidth) -> usize {
    match w {
        ElementWidth::W8 => 0,
        ElementWidth::W16 => 1,
        ElementWidth::W32 => 2,
    }
}

/// Query-wide state shared read-only by all workers.
#[derive(Clone, Debug)]
pub struct QueryContext {
    query: Vec<u8>,
    matrix: SubstitutionMatrix,
    gaps: GapPenalties,
    /// Distinct query codes, ascending: the score profile slots.
    profile_codes: Vec<u8>,
    /// The query as score profile slots.
    query_slots: Vec<u8>,
    tables: (ScoreTable<u8>, ScoreTable<i16>, ScoreTable<i32>),
    profiles: (QueryProfile<u8>, QueryProfile<i16>, QueryProfile<i32>),
}

impl QueryContext {
    pub fn new(query: &[u8], sm: &SubstitutionMatrix, gp: &GapPenalties) -> Result<Self> {
        if query.is_empty() {
            return Err(Error::argument("query is empty"));
        }
        if let Some(&bad) = query.iter().find(|&&c| !sm.is_valid_code(c)) {
            return Err(Error::argument(format!(
                "query residue code {bad} is not valid for the matrix"
            )));
        }
        let tables = (
            ScoreTable::new(sm),
            ScoreTable::new(sm),
            ScoreTable::new(sm),
        );
        let profiles = (
            QueryProfile::new(query, &tables.0)?,
            QueryProfile::new(query, &tables.1)?,
            QueryProfile::new(query, &tables.2)?,
        );
        let mut profile_codes = query.to_vec();
        profile_codes.sort_unstable();
        profile_codes.dedup();
        let query_slots = query
            .iter()
            .map(|c| profile_codes.binary_search(c).unwrap() as u8)
            .collect();
        Ok(QueryContext {
            query: query.to_vec(),
            matrix: sm.clone(),
            gaps: *gp,
            profile_codes,
            query_slots,
            tables,
            profiles,
        })
    }

    pub fn query(&self) -> &[u8] {
        &self.query
    }

    pub fn matrix(&self) -> &SubstitutionMatrix {
        &self.matrix
    }

    pub fn gaps(&self) -> &GapPenalties {
        &self.gaps
    }
}

/// Thread-private scratch: one reusable score profile per range.
#[derive(Debug, Default)]
pub struct Workspace {
    sp8: ScoreProfile<u8>,
    sp16: ScoreProfile<i16>,
    sp32: ScoreProfile<i32>,
}

impl Workspace {
    /// Preallocates score profiles for chunks up to `max_padded_length`.
    pub fn new(max_padded_length: usize, codes: usize, vector_bits: usize) -> Self {
        Workspace {
            sp8: ScoreProfile::with_capacity(max_padded_length, codes, vector_bits / 8),
            sp16: ScoreProfile::with_capacity(max_padded_length, codes, vector_bits / 16),
            sp32: ScoreProfile::with_capacity(max_padded_length, codes, vector_bits / 32),
        }
    }
}

/// Per-range access to the context and workspace, and the per-range kernel
/// dispatch.
trait EngineElement: LaneElement {
    fn table(ctx: &QueryContext) -> &ScoreTable<Self>;
    fn query_profile(ctx: &QueryContext) -> &QueryProfile<Self>;
    fn score_profile(ws: &mut Workspace) -> &mut ScoreProfile<Self>;
    fn rebuild_profile(
        backend: ResolvedBackend,
        sp: &mut ScoreProfile<Self>,
        chunk: &DatabaseChunk,
        table: &ScoreTable<Self>,
        codes: &[u8],
    );
    fn run_kernel(
        backend: ResolvedBackend,
        lanes: usize,
        params: &KernelParams<Self>,
        source: Source<'_, Self>,
        best: &mut [Self],
    );
}

enum Source<'a, T> {
    Score(FromScoreProfile<'a, T>),
    Query(FromQueryProfile<'a, T>),
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn align_avx2<V: LaneVector, S: Substitutions<V>>(
    params: &KernelParams<V::Elem>,
    subs: &S,
    best: &mut [V::Elem],
) {
    align_lanes::<V, S>(params, subs, best)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn rebuild_avx2<V: LaneVector>(
    sp: &mut ScoreProfile<V::Elem>,
    chunk: &DatabaseChunk,
    table: &ScoreTable<V::Elem>,
    codes: &[u8],
) {
    sp.rebuild_with::<V>(chunk, table, codes)
}

macro_rules! engine_element {
    ($t:ty, $idx:tt, $sp:ident, $native:ident) => {
        impl EngineElement for $t {
            fn table(ctx: &QueryContext) -> &ScoreTable<Self> {
                &ctx.tables.$idx
            }

            fn query_profile(ctx: &QueryContext) -> &QueryProfile<Self> {
                &ctx.profiles.$idx
            }

            fn score_profile(ws: &mut Workspace) -> &mut ScoreProfile<Self> {
                &mut ws.$sp
            }

            fn rebuild_profile(
                backend: ResolvedBackend,
                sp: &mut ScoreProfile<Self>,
                chunk: &DatabaseChunk,
                table: &ScoreTable<Self>,
                codes: &[u8],
            ) {
                #[cfg(target_arch = "x86_64")]
                if backend == ResolvedBackend::Avx2
                    && chunk.lanes() == <native::$native as LaneVector>::LANES
                {
                    // SAFETY: the AVX2 backend is only resolved after run-time detection.
                    unsafe { rebuild_avx2::<native::$native>(sp, chunk, table, codes) };
                    return;
                }
                let _ = backend;
                sp.rebuild_for(chunk, table, codes);
            }

            fn run_kernel(
                backend: ResolvedBackend,
                lanes: usize,
                params: &KernelParams<Self>,
                source: Source<'_, Self>,
                best: &mut [Self],
            ) {
                fn with_source<S>(
                    backend: ResolvedBackend,
                    lanes: usize,
                    params: &KernelParams<$t>,
                    subs: &S,
                    best: &mut [$t],
                ) where
                    S: Substitutions<Portable<$t, 4>>
                        + Substitutions<Portable<$t, 8>>
                        + Substitutions<Portable<$t, 16>>
                        + Substitutions<Portable<$t, 32>>
                        + Substitutions<Portable<$t, 64>>
                        + Substitutions<native::$native>,
                {
                    #[cfg(target_arch = "x86_64")]
                    if backend == ResolvedBackend::Avx2
                        && lanes == <native::$native as LaneVector>::LANES
                    {
                        // SAFETY: the AVX2 backend is only resolved after run-time detection.
                        unsafe { align_avx2::<native::$native, S>(params, subs, best) };
                        return;
                    }
                    let _ = backend;
                    match lanes {
                        4 => align_lanes::<Portable<$t, 4>, S>(params, subs, best),
                        8 => align_lanes::<Portable<$t, 8>, S>(params, subs, best),
                        16 => align_lanes::<Portable<$t, 16>, S>(params, subs, best),
                        32 => align_lanes::<Portable<$t, 32>, S>(params, subs, best),
                        64 => align_lanes::<Portable<$t, 64>, S>(params, subs, best),
                        _ => unreachable!("lane count validated by LaneConfig"),
                    }
                }

                match source {
                    Source::Score(s) => with_source(backend, lanes, params, &s, best),
                    Source::Query(q) => with_source(backend, lanes, params, &q, best),
                }
            }
        }
    };
}

#[cfg(target_arch = "x86_64")]
mod native {
    pub(super) use crate::lanes::avx2::{I16x16, I32x8, U8x32};
}

/// Stand-ins so the kernel bounds read the same on every target.
#[cfg(not(target_arch = "x86_64"))]
mod native {
    use crate::lanes::Portable;
    pub(super) type U8x32 = Portable<u8, 32>;
    pub(super) type I16x16 = Portable<i16, 16>;
    pub(super) type I32x8 = Portable<i32, 8>;
}

engine_element!(u8, 0, sp8, U8x32);
engine_element!(i16, 1, sp16, I16x16);
engine_element!(i32, 2, sp32, I32x8);

/// Aligns the query against all lanes of `chunk` at one integer range,
/// without escalation.
pub fn align_chunk(
    ctx: &QueryContext,
    chunk: &DatabaseChunk,
    width: ElementWidth,
    profile: ProfileKind,
    opts: &EngineOptions,
    ws: &mut Workspace,
) -> Result<ChunkScores> {
    let vector_bits = chunk.lanes() * width.bits();
    if vector_bits != opts.vector_bits {
        return Err(Error::config(format!(
            "{} lanes of {width} do not fill a {}-bit vector",
            chunk.lanes(),
            opts.vector_bits
        )));
    }
    LaneConfig::new(chunk.lanes(), width)?;
    let backend = opts.backend.resolve(vector_bits)?;
    match width {
        ElementWidth::W8 => run_width::<u8>(ctx, chunk, profile, opts.block_width, backend, ws),
        ElementWidth::W16 => run_width::<i16>(ctx, chunk, profile, opts.block_width, backend, ws),
        ElementWidth::W32 => run_width::<i32>(ctx, chunk, profile, opts.block_width, backend, ws),
    }
}

fn run_width<T: EngineElement>(
    ctx: &QueryContext,
    chunk: &DatabaseChunk,
    profile: ProfileKind,
    block_width: Option<usize>,
    backend: ResolvedBackend,
    ws: &mut Workspace,
) -> Result<ChunkScores> {
    let table = T::table(ctx);
    let penalty = |p: i32| {
        T::from_penalty(p).ok_or_else(|| {
            Error::config(format!(
                "gap penalty {p} does not fit the {} range",
                T::WIDTH
            ))
        })
    };
    let bias = T::from_penalty(table.bias()).ok_or_else(|| {
        Error::config(format!(
            "score bias {} does not fit the {} range",
            table.bias(),
            T::WIDTH
        ))
    })?;
    let params = KernelParams {
        query_len: ctx.query.len(),
        subject_len: chunk.padded_length,
        gap_open_extend: penalty(ctx.gaps.open_extend())?,
        gap_extend: penalty(ctx.gaps.extend())?,
        bias,
        block_width,
    };
    let mut best = vec![T::ZERO; chunk.lanes()];
    match profile {
        ProfileKind::Score => {
            let sp = T::score_profile(ws);
            T::rebuild_profile(backend, sp, chunk, table, &ctx.profile_codes);
            let source = Source::Score(FromScoreProfile::new(&ctx.query_slots, &*sp));
            T::run_kernel(backend, chunk.lanes(), &params, source, &mut best);
        }
        ProfileKind::Query => {
            let source = Source::Query(FromQueryProfile {
                profile: T::query_profile(ctx),
                chunk,
            });
            T::run_kernel(backend, chunk.lanes(), &params, source, &mut best);
        }
    }
    Ok(ChunkScores::from_lanes(&best, bias))
}

/// Recomputes the flagged halves of `first` at wider ranges until every
/// lane is exact. Returns `(lane, score)` for each recomputed real lane.
pub fn escalate(
    ctx: &QueryContext,
    chunk: &DatabaseChunk,
    first: &ChunkScores,
    profile: ProfileKind,
    opts: &EngineOptions,
    ws: &mut Workspace,
    stats: &mut EscalationStats,
) -> Result<Vec<(usize, Score)>> {
    let mut fixed = Vec::new();
    let dummy = ctx.matrix.dim() as u8 + 1;
    for half in first.flags.flagged_halves(chunk.lanes()) {
        match first.width.wider() {
            Some(wider) => {
                let sub = chunk.select_lanes(half.clone(), dummy);
                let exact = search_chunk_at(ctx, &sub, wider, profile, opts, ws, stats)?;
                for (offset, score) in exact.into_iter().enumerate() {
                    if let Some(id) = sub.sequence_ids[offset] {
                        stats.recomputed[width_index(wider)].push(id);
                        fixed.push((half.start + offset, score));
                    }
                }
            }
            None => {
                for lane in half.filter(|&k| first.overflowed[k]) {
                    let Some(id) = chunk.sequence_ids[lane] else {
                        continue;
                    };
                    stats.oracle_calls += 1;
                    stats.recomputed[3].push(id);
                    let subject = chunk.lane_residues(lane);
                    fixed.push((
                        lane,
                        oracle::align_codes(&ctx.query, &subject, &ctx.matrix, &ctx.gaps)?,
                    ));
                }
            }
        }
    }
    Ok(fixed)
}

fn search_chunk_at(
    ctx: &QueryContext,
    chunk: &DatabaseChunk,
    width: ElementWidth,
    profile: ProfileKind,
    opts: &EngineOptions,
    ws: &mut Workspace,
    stats: &mut EscalationStats,
) -> Result<Vec<Score>> {
    let w = width_index(width);
    stats.kernel_calls[w] += 1;
    stats.lanes_computed[w] += chunk.sequence_ids.iter().flatten().count() as u64;
    let first = align_chunk(ctx, chunk, width, profile, opts, ws)?;
    let mut scores = first.scores.clone();
    if first.flags.any() {
        for (lane, score) in escalate(ctx, chunk, &first, profile, opts, ws, stats)? {
            scores[lane] = score;
        }
    }
    Ok(scores)
}

/// Exact scores for every lane of `chunk`, starting at `opts.start_width`
/// and escalating as needed. Padding lanes score 0.
pub fn search_chunk(
    ctx: &QueryContext,
    chunk: &DatabaseChunk,
    opts: &EngineOptions,
    ws: &mut Workspace,
    stats: &mut EscalationStats,
) -> Result<Vec<Score>> {
    let profile = opts.profile_kind(ctx.query.len());
    search_chunk_at(ctx, chunk, opts.start_width, profile, opts, ws, stats)
}
