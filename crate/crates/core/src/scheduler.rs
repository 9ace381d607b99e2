//! Dynamic distribution of chunks over worker threads, result gathering and
//! the sorting stage.

use std::sync::atomic::{AtomicI64, AtomicUsize, Ordering};
use std::thread;
use std::time::Instant;

use crate::engine::{search_chunk, EngineOptions, EscalationStats, QueryContext, Workspace};
use crate::error::{Error, Result};
use crate::oracle::Score;
use crate::preprocess::PreprocessedDatabase;
use crate::scoring::{GapPenalties, SubstitutionMatrix};
use crate::sequence::Sequence;

/// Hands out chunk indices, one per claim, largest chunks first.
///
/// Chunks are stored in ascending length order, so the cursor walks them
/// from the back.
#[derive(Debug)]
pub struct WorkQueue {
    next_chunk: AtomicUsize,
    chunk_count: usize,
}

impl WorkQueue {
    pub fn new(chunk_count: usize) -> Self {
        WorkQueue {
            next_chunk: AtomicUsize::new(0),
            chunk_count,
        }
    }

    pub fn chunk_count(&self) -> usize {
        self.chunk_count
    }

    pub fn claim(&self) -> Option<usize> {
        let ticket = self.next_chunk.fetch_add(1, Ordering::AcqRel);
        (ticket < self.chunk_count).then(|| self.chunk_count - 1 - ticket)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub db_index: usize,
    pub db_id: String,
    pub score: Score,
    pub db_length: usize,
}

/// What one worker did during a search.
#[derive(Clone, Debug)]
pub struct WorkerReport {
    pub chunks: usize,
    /// Taken just before the worker's last successful claim.
    pub last_claim: Option<Instant>,
    /// Taken after the claim that found the queue empty.
    pub exit: Instant,
}

#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    pub workers: Vec<WorkerReport>,
    pub escalation: EscalationStats,
}

impl SearchStats {
    pub fn chunks_processed(&self) -> usize {
        self.workers.iter().map(|w| w.chunks).sum()
    }
}

const UNSET: i64 = i64::MIN;

/// Scores `query` against every database sequence. Results come back in
/// original database order.
pub fn run_search(
    query: &Sequence,
    pdb: &PreprocessedDatabase,
    sm: &SubstitutionMatrix,
    gp: &GapPenalties,
    opts: &EngineOptions,
    num_threads: usize,
) -> Result<Vec<SearchResult>> {
    run_search_with_stats(query, pdb, sm, gp, opts, num_threads).map(|(results, _)| results)
}

pub fn run_search_with_stats(
    query: &Sequence,
    pdb: &PreprocessedDatabase,
    sm: &SubstitutionMatrix,
    gp: &GapPenalties,
    opts: &EngineOptions,
    num_threads: usize,
) -> Result<(Vec<SearchResult>, SearchStats)> {
    if num_threads == 0 {
        return Err(Error::argument("at least one thread is required"));
    }
    opts.validate()?;
    let cfg = opts.lane_config()?;
    if cfg != pdb.lane_config {
        return Err(Error::config(format!(
            "database was packed for {} lanes of {}, the engine expects {} lanes of {}",
            pdb.lane_config.lanes(),
            pdb.lane_config.width(),
            cfg.lanes(),
            cfg.width()
        )));
    }
    let ctx = QueryContext::new(&query.residues, sm, gp)?;
    let queue = WorkQueue::new(pdb.chunks.len());
    let slots: Vec<AtomicI64> = (0..pdb.num_sequences())
        .map(|_| AtomicI64::new(UNSET))
        .collect();
    let max_len = pdb.max_padded_length();
    let codes = sm.dim() + 2;

    let outcomes: Vec<Result<(WorkerReport, EscalationStats)>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..num_threads.min(queue.chunk_count().max(1)))
            .map(|_| {
                scope.spawn(|| -> Result<(WorkerReport, EscalationStats)> {
                    let mut ws = Workspace::new(max_len, codes, opts.vector_bits);
                    let mut stats = EscalationStats::default();
                    let mut chunks = 0;
                    let mut last_claim = None;
                    loop {
                        let attempt = Instant::now();
                        let Some(index) = queue.claim() else { break };
                        last_claim = Some(attempt);
                        chunks += 1;
                        let chunk = &pdb.chunks[index];
                        let scores = search_chunk(&ctx, chunk, opts, &mut ws, &mut stats)?;
                        for (id, score) in chunk.sequence_ids.iter().zip(scores) {
                            if let Some(id) = id {
                                slots[*id as usize].store(score, Ordering::Relaxed);
                            }
                        }
                    }
                    Ok((
                        WorkerReport {
                            chunks,
                            last_claim,
                            exit: Instant::now(),
                        },
                        stats,
                    ))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("search worker panicked"))
            .collect()
    });

    let mut stats = SearchStats::default();
    for outcome in outcomes {
        let (report, esc) = outcome?;
        stats.workers.push(report);
        stats.escalation.merge(&esc);
    }

    let results = slots
        .into_iter()
        .enumerate()
        .map(|(i, slot)| {
            let score = slot.into_inner();
            debug_assert_ne!(score, UNSET, "sequence {i} was never scored");
            SearchResult {
                db_index: i,
                db_id: pdb.ids[i].clone(),
                score,
                db_length: pdb.lengths[i] as usize,
            }
        })
        .collect();
    Ok((results, stats))
}

/// Descending by score, ties by ascending database index.
pub fn sort_results(mut results: Vec<SearchResult>) -> Vec<SearchResult> {
    results.sort_by(|a, b| b.score.cmp(&a.score).then(a.db_index.cmp(&b.db_index)));
    results
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(db_index: usize, score: Score) -> SearchResult {
        SearchResult {
            db_index,
            db_id: format!("s{db_index}"),
            score,
            db_length: 1,
        }
    }

    fn order(results: &[SearchResult]) -> Vec<usize> {
        results.iter().map(|r| r.db_index).collect()
    }

    #[test]
    fn sort_descending_with_ties() {
        let input = vec![result(0, 3), result(1, 9), result(2, 9), result(3, 1)];
        assert_eq!(order(&sort_results(input)), [1, 2, 0, 3]);
    }

    #[test]
    fn sort_keeps_sorted_and_single() {
        let sorted = vec![result(4, 10), result(1, 5), result(2, 5)];
        assert_eq!(sort_results(sorted.clone()), sorted);
        assert_eq!(sort_results(vec![result(7, 0)]), vec![result(7, 0)]);
    }

    #[test]
    fn queue_claims_each_chunk_once_largest_first() {
        let q = WorkQueue::new(3);
        assert_eq!(q.claim(), Some(2));
        assert_eq!(q.claim(), Some(1));
        assert_eq!(q.claim(), Some(0));
        assert_eq!(q.claim(), None);
        assert_eq!(q.claim(), None);
    }
}
