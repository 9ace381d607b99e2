//! Substitution-score lookup structures: the extended score table, the
//! per-query profile and the per-chunk score profile.

use crate::alphabet::{Alphabet, MAX_CODES};
use crate::error::{Error, Result};
use crate::lanes::{LaneElement, LaneVector};
use crate::preprocess::{DatabaseChunk, LaneConfig};
use crate::scoring::SubstitutionMatrix;
use crate::sequence::Sequence;

/// A substitution matrix extended with the unknown and dummy codes and
/// stored in the lane encoding `T`.
///
/// The dummy code scores the lowest stored value of `T` against every code,
/// itself included, so an alignment never gains from entering padding.
#[derive(Clone, Debug)]
pub struct ScoreTable<T> {
    rows: Vec<[T; MAX_CODES]>,
    bias: i32,
}

impl<T: LaneElement> ScoreTable<T> {
    pub fn new(sm: &SubstitutionMatrix) -> Self {
        let unknown = sm.dim();
        let bias = if T::BIASED {
            -i32::from(sm.min_score().min(0))
        } else {
            0
        };
        let rows = (0..unknown + 2)
            .map(|a| {
                let mut row = [T::dummy(); MAX_CODES];
                if a <= unknown {
                    for (b, slot) in row.iter_mut().enumerate().take(unknown + 1) {
                        *slot = T::encode_score(i32::from(sm.score(a as u8, b as u8)), bias);
                    }
                }
                row
            })
            .collect();
        ScoreTable { rows, bias }
    }

    pub fn bias(&self) -> i32 {
        self.bias
    }

    /// Number of codes covered: residues, unknown and dummy.
    pub fn code_count(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn row(&self, code: u8) -> &[T; MAX_CODES] {
        &self.rows[usize::from(code)]
    }

    pub fn stored(&self, a: u8, b: u8) -> T {
        self.rows[usize::from(a)][usize::from(b)]
    }

    /// Decoded score; the dummy code decodes to the lowest representable score.
    pub fn score(&self, a: u8, b: u8) -> i32 {
        self.stored(a, b).decode_score(self.bias)
    }

    /// The lowest score `T` can represent under this table's bias.
    pub fn lowest_score(&self) -> i32 {
        T::dummy().decode_score(self.bias)
    }
}

/// Extends `sm` with dummy scores for the lane encoding `T`.
pub fn dummy_scoring_contract<T: LaneElement>(
    sm: &SubstitutionMatrix,
    alphabet: &Alphabet,
) -> Result<ScoreTable<T>> {
    if sm.dim() != alphabet.len() {
        return Err(Error::argument(format!(
            "matrix covers {} residues but the alphabet has {}",
            sm.dim(),
            alphabet.len()
        )));
    }
    Ok(ScoreTable::new(sm))
}

/// `rows[i][c]` is the stored score of query residue `i` against code `c`.
/// Rows are padded to [`MAX_CODES`] entries.
#[derive(Clone, Debug)]
pub struct QueryProfile<T> {
    rows: Vec<[T; MAX_CODES]>,
    bias: i32,
}

impl<T: LaneElement> QueryProfile<T> {
    pub fn new(query: &[u8], table: &ScoreTable<T>) -> Result<Self> {
        if query.is_empty() {
            return Err(Error::argument("query is empty"));
        }
        let dummy = table.code_count() - 1;
        let rows = query
            .iter()
            .map(|&q| {
                if usize::from(q) >= dummy {
                    return Err(Error::argument(format!(
                        "query residue code {q} is invalid"
                    )));
                }
                Ok(*table.row(q))
            })
            .collect::<Result<_>>()?;
        Ok(QueryProfile {
            rows,
            bias: table.bias(),
        })
    }

    pub fn query_length(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T; MAX_CODES] {
        &self.rows[i]
    }

    pub fn score(&self, i: usize, code: u8) -> i32 {
        self.rows[i][usize::from(code)].decode_score(self.bias)
    }
}

pub fn build_query_profile<T: LaneElement>(
    query: &Sequence,
    sm: &SubstitutionMatrix,
) -> Result<QueryProfile<T>> {
    QueryProfile::new(&query.residues, &ScoreTable::new(sm))
}

/// Marks a code that has no slot in a [`ScoreProfile`].
const NO_SLOT: u8 = u8::MAX;

/// `L`-lane score vectors for every chunk position and selected query code:
/// `cells[(p * S + s) * L + k]` is the stored score of the code in slot `s`
/// against the residue at position `p` of lane `k`, for `S` slots.
///
/// Built per chunk into a reusable buffer. Restricting the slots to the
/// codes that occur in the query keeps the rebuild cheap for short queries.
#[derive(Clone, Debug)]
pub struct ScoreProfile<T> {
    cells: Vec<T>,
    lanes: usize,
    slot_codes: Vec<u8>,
    slot_of: [u8; MAX_CODES],
    padded_length: usize,
    bias: i32,
}

impl<T> Default for ScoreProfile<T> {
    fn default() -> Self {
        ScoreProfile {
            cells: Vec::new(),
            lanes: 0,
            slot_codes: Vec::new(),
            slot_of: [NO_SLOT; MAX_CODES],
            padded_length: 0,
            bias: 0,
        }
    }
}

impl<T: LaneElement> ScoreProfile<T> {
    pub fn with_capacity(padded_length: usize, codes: usize, lanes: usize) -> Self {
        ScoreProfile {
            cells: Vec::with_capacity(padded_length * codes * lanes),
            ..Default::default()
        }
    }

    /// Rebuilds the profile for `chunk` over every code of `table`.
    pub fn rebuild(&mut self, chunk: &DatabaseChunk, table: &ScoreTable<T>) {
        let all: Vec<u8> = (0..table.code_count() as u8).collect();
        self.rebuild_for(chunk, table, &all);
    }

    /// Rebuilds the profile for `chunk` with one slot per entry of `codes`,
    /// reusing the allocation.
    pub fn rebuild_for(&mut self, chunk: &DatabaseChunk, table: &ScoreTable<T>, codes: &[u8]) {
        let lanes = chunk.lanes();
        self.reset(chunk, table, codes);
        for (p, block) in self.cells.chunks_exact_mut(codes.len() * lanes).enumerate() {
            let column = chunk.column(p);
            for (&c, out) in codes.iter().zip(block.chunks_exact_mut(lanes)) {
                let row = table.row(c);
                for (slot, &r) in out.iter_mut().zip(column) {
                    *slot = row[usize::from(r) & (MAX_CODES - 1)];
                }
            }
        }
    }

    /// Same as [`rebuild_for`](Self::rebuild_for), one vector lookup per
    /// cell vector. `V::LANES` must equal the chunk's lane count.
    #[inline(always)]
    pub(crate) fn rebuild_with<V: LaneVector<Elem = T>>(
        &mut self,
        chunk: &DatabaseChunk,
        table: &ScoreTable<T>,
        codes: &[u8],
    ) {
        assert_eq!(chunk.lanes(), V::LANES);
        self.reset(chunk, table, codes);
        for (p, block) in self
            .cells
            .chunks_exact_mut(codes.len() * V::LANES)
            .enumerate()
        {
            let column = chunk.column(p);
            for (&c, out) in codes.iter().zip(block.chunks_exact_mut(V::LANES)) {
                V::lookup(table.row(c), column).store(out);
            }
        }
    }

    fn reset(&mut self, chunk: &DatabaseChunk, table: &ScoreTable<T>, codes: &[u8]) {
        self.lanes = chunk.lanes();
        self.padded_length = chunk.padded_length;
        self.bias = table.bias();
        if self.slot_codes != codes {
            self.slot_codes = codes.to_vec();
            self.slot_of = [NO_SLOT; MAX_CODES];
            for (s, &c) in codes.iter().enumerate() {
                assert!(
                    usize::from(c) < table.code_count(),
                    "code {c} is not in the table"
                );
                self.slot_of[usize::from(c)] = s as u8;
            }
        }
        // Every cell is overwritten, so stale contents may stay.
        self.cells
            .resize(self.padded_length * codes.len() * self.lanes, T::ZERO);
    }

    pub fn lanes(&self) -> usize {
        self.lanes
    }

    pub fn padded_length(&self) -> usize {
        self.padded_length
    }

    /// Cells, lane count and the element stride between chunk positions.
    #[inline]
    pub(crate) fn layout(&self) -> (&[T], usize, usize) {
        (&self.cells, self.lanes, self.slot_codes.len() * self.lanes)
    }

    /// Profile slot of `code`, if the profile was built for it.
    pub fn slot(&self, code: u8) -> Option<usize> {
        match self.slot_of[usize::from(code) & (MAX_CODES - 1)] {
            NO_SLOT => None,
            s => Some(usize::from(s)),
        }
    }

    /// The `L` stored scores of profile slot `slot` at chunk position `p`.
    #[inline(always)]
    pub fn vector(&self, p: usize, slot: usize) -> &[T] {
        let start = (p * self.slot_codes.len() + slot) * self.lanes;
        &self.cells[start..start + self.lanes]
    }

    /// Decoded score of `code` against lane `lane` at position `p`.
    ///
    /// Panics if the profile was not built for `code`.
    pub fn score(&self, p: usize, code: u8, lane: usize) -> i32 {
        let slot = self.slot(code).expect("code has no profile slot");
        self.vector(p, slot)[lane].decode_score(self.bias)
    }
}

pub fn build_score_profile<T: LaneElement>(
    chunk: &DatabaseChunk,
    sm: &SubstitutionMatrix,
    cfg: LaneConfig,
) -> Result<ScoreProfile<T>> {
    if chunk.lanes() != cfg.lanes() {
        return Err(Error::argument(format!(
            "chunk has {} lanes but the configuration expects {}",
            chunk.lanes(),
            cfg.lanes()
        )));
    }
    if T::WIDTH != cfg.width() {
        return Err(Error::argument(format!(
            "profile element width {} does not match {}",
            T::WIDTH,
            cfg.width()
        )));
    }
    let table = ScoreTable::new(sm);
    let mut profile =
        ScoreProfile::with_capacity(chunk.padded_length, table.code_count(), chunk.lanes());
    profile.rebuild(chunk, &table);
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::ElementWidth;

    fn setup() -> (Alphabet, SubstitutionMatrix) {
        let a = Alphabet::protein();
        let sm = SubstitutionMatrix::blosum62(&a);
        (a, sm)
    }

    #[test]
    fn dummy_contract() {
        let (a, sm) = setup();
        let d = a.dummy_code();
        let ala = a.code(b'A').unwrap();
        let t8 = dummy_scoring_contract::<u8>(&sm, &a).unwrap();
        assert_eq!(t8.bias(), 4);
        assert_eq!(t8.score(d, ala), t8.lowest_score());
        assert_eq!(t8.score(ala, d), t8.lowest_score());
        assert_eq!(t8.score(d, d), t8.lowest_score());
        assert_eq!(t8.score(ala, ala), 4);
        let t16 = dummy_scoring_contract::<i16>(&sm, &a).unwrap();
        assert_eq!(t16.score(d, ala), i32::from(i16::MIN));
        assert_eq!(t16.score(d, d), i32::from(i16::MIN));
        let t32 = dummy_scoring_contract::<i32>(&sm, &a).unwrap();
        assert_eq!(t32.score(ala, d), i32::MIN);
        assert_eq!(t32.score(a.unknown_code(), ala), 0);
    }

    #[test]
    fn query_profile_rows() {
        let (a, sm) = setup();
        let q = Sequence::from_text("q", "A", &a);
        let qp = build_query_profile::<i16>(&q, &sm).unwrap();
        assert_eq!(qp.query_length(), 1);
        for c in 0..24u8 {
            assert_eq!(qp.score(0, c), i32::from(sm.score(0, c)));
        }
        assert_eq!(qp.score(0, a.code(b'A').unwrap()), 4);

        let q = Sequence::from_text("q", "WCK?", &a);
        let qp8 = build_query_profile::<u8>(&q, &sm).unwrap();
        assert_eq!(qp8.query_length(), 4);
        for i in 0..4 {
            assert_eq!(qp8.score(i, a.dummy_code()), -4);
            assert_eq!(qp8.row(i)[usize::from(a.dummy_code())], u8::dummy());
        }
        assert!(build_query_profile::<u8>(&Sequence::new("e", vec![]), &sm).is_err());
        assert!(build_query_profile::<u8>(&Sequence::new("d", vec![a.dummy_code()]), &sm).is_err());
    }

    #[test]
    fn score_profile_exhaustive() {
        let (a, sm) = setup();
        let seqs = [b"ACDWY".as_slice(), b"KKR", b"MW?PE"];
        let encoded: Vec<Vec<u8>> = seqs
            .iter()
            .map(|s| s.iter().map(|&b| a.encode(b)).collect())
            .collect();
        let lanes: Vec<Option<(u32, &[u8])>> = encoded
            .iter()
            .enumerate()
            .map(|(i, r)| Some((i as u32, r.as_slice())))
            .collect();
        let chunk = DatabaseChunk::pack(&lanes, a.dummy_code());
        let table = ScoreTable::<i32>::new(&sm);
        let mut sp = ScoreProfile::default();
        sp.rebuild(&chunk, &table);
        for p in 0..5 {
            for c in 0..=a.unknown_code() {
                for k in 0..3 {
                    let r = chunk.column(p)[k];
                    let expected = if r == a.dummy_code() {
                        i32::MIN
                    } else {
                        i32::from(sm.score(c, r))
                    };
                    assert_eq!(sp.score(p, c, k), expected, "p={p} c={c} k={k}");
                }
            }
        }
    }

    #[test]
    fn identical_lanes_give_uniform_vectors() {
        let (a, sm) = setup();
        let r: Vec<u8> = b"MKVLAW".iter().map(|&b| a.encode(b)).collect();
        let lanes: Vec<Option<(u32, &[u8])>> = (0..16).map(|i| Some((i, r.as_slice()))).collect();
        let chunk = DatabaseChunk::pack(&lanes, a.dummy_code());
        let cfg = LaneConfig::new(16, ElementWidth::W16).unwrap();
        let sp = build_score_profile::<i16>(&chunk, &sm, cfg).unwrap();
        for p in 0..r.len() {
            for c in 0..26u8 {
                let v = sp.vector(p, sp.slot(c).unwrap());
                assert!(v.iter().all(|&x| x == v[0]));
            }
        }
        let wrong = LaneConfig::new(32, ElementWidth::W8).unwrap();
        assert!(build_score_profile::<u8>(&chunk, &sm, wrong).is_err());
    }

    #[test]
    fn restricted_slots() {
        let (a, sm) = setup();
        let r: Vec<u8> = b"MKVLAW".iter().map(|&b| a.encode(b)).collect();
        let lanes: Vec<Option<(u32, &[u8])>> =
            (0..4).map(|i| Some((i, &r[i as usize..]))).collect();
        let chunk = DatabaseChunk::pack(&lanes, a.dummy_code());
        let table = ScoreTable::<u8>::new(&sm);
        let mut full = ScoreProfile::default();
        full.rebuild(&chunk, &table);
        let codes = [a.code(b'W').unwrap(), a.code(b'C').unwrap()];
        let mut sp = ScoreProfile::default();
        sp.rebuild_for(&chunk, &table, &codes);
        assert_eq!(sp.slot(codes[1]), Some(1));
        assert_eq!(sp.slot(a.code(b'A').unwrap()), None);
        for p in 0..r.len() {
            for (s, &c) in codes.iter().enumerate() {
                assert_eq!(sp.vector(p, s), full.vector(p, full.slot(c).unwrap()));
            }
        }
    }

    #[test]
    fn single_lane_is_transposed_query_profile() {
        let (a, sm) = setup();
        let subject = Sequence::from_text("s", "HEAGAWGHEE", &a);
        let chunk = DatabaseChunk::pack(&[Some((0, subject.residues.as_slice()))], a.dummy_code());
        let table = ScoreTable::<i16>::new(&sm);
        let mut sp = ScoreProfile::default();
        sp.rebuild(&chunk, &table);
        let qp = QueryProfile::new(&subject.residues, &table).unwrap();
        for p in 0..subject.len() {
            for c in 0..=a.unknown_code() {
                assert_eq!(sp.score(p, c, 0), qp.score(p, c));
            }
        }
    }
}
