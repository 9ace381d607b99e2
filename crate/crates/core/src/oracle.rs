//! Cell-by-cell Smith-Waterman with affine gaps.
//!
//! This is the reference every vector path is checked against, and the last
//! step of overflow escalation. Scores are `i64` so no desk-scale input can
//! overflow.
//!
//! With `H`, `E` and `F` zero on row 0 and column 0:
//!
//! ```text
//! H[i][j] = max(0, H[i-1][j-1] + SM(q[i], s[j]), E[i][j], F[i][j])
//! E[i][j] = max(H[i][j-1] - Goe, E[i][j-1] - Ge)
//! F[i][j] = max(H[i-1][j] - Goe, F[i-1][j] - Ge)
//! ```
//!
//! where `Goe` is open + extend and `Ge` is extend. The score is the
//! maximum `H` cell.

use crate::error::{Error, Result};
use crate::scoring::{GapPenalties, SubstitutionMatrix};
use crate::sequence::Sequence;

pub type Score = i64;

/// Size cap for [`full_score_matrix`].
pub const FULL_MATRIX_MAX_LEN: usize = 512;

/// One row of DP state over the subject. `e` runs along the row, so only its
/// carried value is kept.
#[derive(Clone, Debug)]
pub struct ScalarDpRow {
    pub h: Vec<Score>,
    pub f: Vec<Score>,
    pub e_carry: Score,
}

impl ScalarDpRow {
    pub fn new(subject_len: usize) -> Self {
        ScalarDpRow {
            h: vec![0; subject_len + 1],
            f: vec![0; subject_len + 1],
            e_carry: 0,
        }
    }
}

fn check_inputs(query: &[u8], subject: &[u8], sm: &SubstitutionMatrix) -> Result<()> {
    if query.is_empty() || subject.is_empty() {
        return Err(Error::argument("sequences must be non-empty"));
    }
    if let Some(&bad) = query.iter().chain(subject).find(|&&c| !sm.is_valid_code(c)) {
        return Err(Error::argument(format!(
            "residue code {bad} is not valid for the matrix"
        )));
    }
    Ok(())
}

/// Optimal local alignment score of `query` against `subject`.
pub fn align_scalar(
    query: &Sequence,
    subject: &Sequence,
    sm: &SubstitutionMatrix,
    gp: &GapPenalties,
) -> Result<Score> {
    align_codes(&query.residues, &subject.residues, sm, gp)
}

/// [`align_scalar`] over raw residue codes.
pub fn align_codes(
    query: &[u8],
    subject: &[u8],
    sm: &SubstitutionMatrix,
    gp: &GapPenalties,
) -> Result<Score> {
    check_inputs(query, subject, sm)?;
    let goe = Score::from(gp.open_extend());
    let ge = Score::from(gp.extend());
    let mut row = ScalarDpRow::new(subject.len());
    let mut best: Score = 0;

    for &q in query {
        let mut h_left: Score = 0;
        let mut diag: Score = 0;
        row.e_carry = 0;
        for (j, &s) in subject.iter().enumerate() {
            let j = j + 1;
            let e = (h_left - goe).max(row.e_carry - ge);
            let f = (row.h[j] - goe).max(row.f[j] - ge);
            let h = (diag + Score::from(sm.score(q, s))).max(e).max(f).max(0);
            diag = row.h[j];
            row.h[j] = h;
            row.f[j] = f;
            row.e_carry = e;
            h_left = h;
            best = best.max(h);
        }
    }
    Ok(best)
}

/// The complete `(m+1) x (n+1)` H matrix, for inspection and testing.
pub fn full_score_matrix(
    query: &Sequence,
    subject: &Sequence,
    sm: &SubstitutionMatrix,
    gp: &GapPenalties,
) -> Result<Vec<Vec<Score>>> {
    let (q, s) = (&query.residues, &subject.residues);
    check_inputs(q, s, sm)?;
    if q.len() > FULL_MATRIX_MAX_LEN || s.len() > FULL_MATRIX_MAX_LEN {
        return Err(Error::argument(format!(
            "full matrix is limited to sequences of at most {FULL_MATRIX_MAX_LEN} residues"
        )));
    }
    let (m, n) = (q.len(), s.len());
    let goe = Score::from(gp.open_extend());
    let ge = Score::from(gp.extend());
    let mut h = vec![vec![0; n + 1]; m + 1];
    let mut e = vec![vec![0; n + 1]; m + 1];
    let mut f = vec![vec![0; n + 1]; m + 1];
    for i in 1..=m {
        for j in 1..=n {
            e[i][j] = (h[i][j - 1] - goe).max(e[i][j - 1] - ge);
            f[i][j] = (h[i - 1][j] - goe).max(f[i - 1][j] - ge);
            h[i][j] = 0
                .max(h[i - 1][j - 1] + Score::from(sm.score(q[i - 1], s[j - 1])))
                .max(e[i][j])
                .max(f[i][j]);
        }
    }
    Ok(h)
}
