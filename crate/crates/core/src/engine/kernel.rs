//! The lockstep DP kernel.
//!
//! Every lane carries one database sequence. The alignment matrices are cut
//! into vertical blocks of `block_width` database positions; each block is
//! swept row by row over the whole query. Within a block the previous and
//! current block rows (`prev`/`cur`) and the vertical gap scores live in
//! small buffers; the column to the left of the block is kept per query row
//! in `left_h`/`left_e`.

use crate::lanes::{LaneElement, LaneVector};
use crate::preprocess::DatabaseChunk;
use crate::profile::{QueryProfile, ScoreProfile};

/// Produces the substitution vector for query row `i` and chunk position `j`.
pub(crate) trait Substitutions<V: LaneVector> {
    /// Per-row lookup key, computed once per query row.
    fn row_key(&self, i: usize) -> usize;
    fn load(&self, key: usize, j: usize) -> V;
}

/// Score profile: one contiguous load per cell vector.
pub(crate) struct FromScoreProfile<'a, T> {
    /// Query residues as profile slots.
    query_slots: &'a [u8],
    cells: &'a [T],
    lanes: usize,
    /// Elements between consecutive chunk positions.
    stride: usize,
}

impl<'a, T: LaneElement> FromScoreProfile<'a, T> {
    pub fn new(query_slots: &'a [u8], profile: &'a ScoreProfile<T>) -> Self {
        let (cells, lanes, stride) = profile.layout();
        FromScoreProfile {
            query_slots,
            cells,
            lanes,
            stride,
        }
    }
}

impl<V: LaneVector> Substitutions<V> for FromScoreProfile<'_, V::Elem> {
    #[inline(always)]
    fn row_key(&self, i: usize) -> usize {
        usize::from(self.query_slots[i]) * self.lanes
    }

    #[inline(always)]
    fn load(&self, key: usize, j: usize) -> V {
        V::load(&self.cells[j * self.stride + key..])
    }
}

/// Query profile: the lane vector is gathered from the query row by the
/// chunk residues at position `j`.
pub(crate) struct FromQueryProfile<'a, T> {
    pub profile: &'a QueryProfile<T>,
    pub chunk: &'a DatabaseChunk,
}

impl<V: LaneVector> Substitutions<V> for FromQueryProfile<'_, V::Elem> {
    #[inline(always)]
    fn row_key(&self, i: usize) -> usize {
        i
    }

    #[inline(always)]
    fn load(&self, key: usize, j: usize) -> V {
        V::lookup(self.profile.row(key), self.chunk.column(j))
    }
}

/// Scalar parameters of one kernel run.
#[derive(Clone, Copy, Debug)]
pub(crate) struct KernelParams<T> {
    pub query_len: usize,
    pub subject_len: usize,
    pub gap_open_extend: T,
    pub gap_extend: T,
    pub bias: T,
    /// Columns per vertical block; `None` processes the full row at once.
    pub block_width: Option<usize>,
}

/// Runs the DP for all lanes and stores each lane's best `H` into `best_out`.
#[inline(always)]
pub(crate) fn align_lanes<V, S>(params: &KernelParams<V::Elem>, subs: &S, best_out: &mut [V::Elem])
where
    V: LaneVector,
    S: Substitutions<V>,
{
    let m = params.query_len;
    let n = params.subject_len;
    let zero = V::zero();
    let goe = V::splat(params.gap_open_extend);
    let ge = V::splat(params.gap_extend);
    let bias = V::splat(params.bias);
    let bw = params.block_width.unwrap_or(n).clamp(1, n.max(1));

    let mut left_h = vec![zero; m];
    let mut left_e = vec![zero; m];
    let mut prev = vec![zero; bw];
    let mut cur = vec![zero; bw];
    let mut vf = vec![zero; bw];
    let mut best = zero;

    let mut j0 = 0;
    while j0 < n {
        let w = bw.min(n - j0);
        prev[..w].fill(zero);
        vf[..w].fill(zero);
        // H[i-1][j0-1]; row 0 is all zeros.
        let mut corner = zero;
        for i in 0..m {
            let key = subs.row_key(i);
            let mut h_left = left_h[i];
            let mut e = left_e[i];
            let mut diag = corner;
            let row_prev = &prev[..w];
            let row_cur = &mut cur[..w];
            let row_f = &mut vf[..w];
            for c in 0..w {
                let up = row_prev[c];
                e = h_left.subs(goe).max(e.subs(ge));
                let f = up.subs(goe).max(row_f[c].subs(ge));
                let h = diag
                    .add_substitution(subs.load(key, j0 + c), bias)
                    .max(e)
                    .max(f)
                    .max(zero);
                best = best.max(h);
                row_cur[c] = h;
                row_f[c] = f;
                diag = up;
                h_left = h;
            }
            corner = left_h[i];
            left_h[i] = h_left;
            left_e[i] = e;
            std::mem::swap(&mut prev, &mut cur);
        }
        j0 += w;
    }
    best.store(best_out);
}
