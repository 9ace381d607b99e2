//! Database pre-processing: length sorting, padding and lane grouping.
//!
//! Sequences are sorted by ascending length (ties by original index) and cut
//! into groups of `L`. Each group becomes a [`DatabaseChunk`] padded with the
//! dummy code up to its longest member. The last group is filled with
//! all-dummy lanes when fewer than `L` sequences remain.

use std::fmt;
use std::ops::Range;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::sequence::Sequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementWidth {
    W8,
    W16,
    W32,
}

impl ElementWidth {
    pub const ALL: [ElementWidth; 3] = [ElementWidth::W8, ElementWidth::W16, ElementWidth::W32];

    pub fn bits(self) -> usize {
        match self {
            ElementWidth::W8 => 8,
            ElementWidth::W16 => 16,
            ElementWidth::W32 => 32,
        }
    }

    pub fn from_bits(bits: usize) -> Result<Self> {
        match bits {
            8 => Ok(ElementWidth::W8),
            16 => Ok(ElementWidth::W16),
            32 => Ok(ElementWidth::W32),
            _ => Err(Error::config(format!("unsupported element width {bits}"))),
        }
    }

    /// Next wider range, if any.
    pub fn wider(self) -> Option<Self> {
        match self {
            ElementWidth::W8 => Some(ElementWidth::W16),
            ElementWidth::W16 => Some(ElementWidth::W32),
            ElementWidth::W32 => None,
        }
    }
}

impl fmt::Display for ElementWidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-bit", self.bits())
    }
}

pub const VECTOR_BITS: [usize; 3] = [128, 256, 512];
pub const LANE_COUNTS: [usize; 5] = [4, 8, 16, 32, 64];

/// Lane count and element width of one vector register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LaneConfig {
    lanes: usize,
    width: ElementWidth,
}

impl LaneConfig {
    pub fn new(lanes: usize, width: ElementWidth) -> Result<Self> {
        if !LANE_COUNTS.contains(&lanes) {
            return Err(Error::config(format!(
                "lane count {lanes} is not one of {LANE_COUNTS:?}"
            )));
        }
        let bits = lanes * width.bits();
        if !VECTOR_BITS.contains(&bits) {
            return Err(Error::config(format!(
                "{lanes} lanes of {width} make a {bits}-bit vector; expected one of {VECTOR_BITS:?}"
            )));
        }
        Ok(LaneConfig { lanes, width })
    }

    pub fn for_vector(vector_bits: usize, width: ElementWidth) -> Result<Self> {
        if !VECTOR_BITS.contains(&vector_bits) {
            return Err(Error::config(format!(
                "vector width {vector_bits} is not one of {VECTOR_BITS:?}"
            )));
        }
        Self::new(vector_bits / width.bits(), width)
    }

    pub fn lanes(&self) -> usize {
        self.lanes
    }

    pub fn width(&self) -> ElementWidth {
        self.width
    }

    pub fn element_bits(&self) -> usize {
        self.width.bits()
    }

    pub fn vector_bits(&self) -> usize {
        self.lanes * self.width.bits()
    }

    /// Same vector width at the next wider element range (half the lanes).
    pub fn wider(&self) -> Option<Self> {
        let width = self.width.wider()?;
        Some(LaneConfig {
            lanes: self.lanes / 2,
            width,
        })
    }
}

/// `L` sequences laid out position-major: `residues[p * L + k]` is position
/// `p` of lane `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatabaseChunk {
    /// Original database index per lane; `None` for padding lanes.
    pub sequence_ids: Vec<Option<u32>>,
    pub padded_length: usize,
    pub residues: Vec<u8>,
    pub real_lengths: Vec<u32>,
}

impl DatabaseChunk {
    /// Packs `lanes` (database index and residues, or `None` for an empty
    /// lane) into a chunk padded with `dummy`.
    pub fn pack(lanes: &[Option<(u32, &[u8])>], dummy: u8) -> Self {
        let width = lanes.len();
        let padded_length = lanes
            .iter()
            .flatten()
            .map(|(_, r)| r.len())
            .max()
            .unwrap_or(0);
        let mut residues = vec![dummy; padded_length * width];
        for (k, lane) in lanes.iter().enumerate() {
            if let Some((_, seq)) = lane {
                for (p, &c) in seq.iter().enumerate() {
                    residues[p * width + k] = c;
                }
            }
        }
        DatabaseChunk {
            sequence_ids: lanes.iter().map(|l| l.map(|(id, _)| id)).collect(),
            padded_length,
            residues,
            real_lengths: lanes
                .iter()
                .map(|l| l.map_or(0, |(_, r)| r.len() as u32))
                .collect(),
        }
    }

    pub fn lanes(&self) -> usize {
        self.sequence_ids.len()
    }

    /// The `L` residue codes at position `p`.
    #[inline]
    pub fn column(&self, p: usize) -> &[u8] {
        let l = self.lanes();
        &self.residues[p * l..(p + 1) * l]
    }

    /// Residues of lane `k` without padding.
    pub fn lane_residues(&self, k: usize) -> Vec<u8> {
        (0..self.real_lengths[k] as usize)
            .map(|p| self.residues[p * self.lanes() + k])
            .collect()
    }

    /// Real residue count over all lanes.
    pub fn residue_count(&self) -> u64 {
        self.real_lengths.iter().map(|&l| u64::from(l)).sum()
    }

    /// A new chunk holding lanes `range`, trimmed to their longest member.
    pub fn select_lanes(&self, range: Range<usize>, dummy: u8) -> DatabaseChunk {
        let lanes: Vec<Vec<u8>> = range.clone().map(|k| self.lane_residues(k)).collect();
        let packed: Vec<Option<(u32, &[u8])>> = range
            .zip(&lanes)
            .map(|(k, r)| self.sequence_ids[k].map(|id| (id, r.as_slice())))
            .collect();
        DatabaseChunk::pack(&packed, dummy)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreprocessedDatabase {
    pub chunks: Vec<DatabaseChunk>,
    /// Real residues in the database, padding excluded.
    pub total_residues: u64,
    pub lane_config: LaneConfig,
    pub alphabet_fingerprint: u64,
    /// Identifiers and lengths in original database order.
    pub ids: Vec<String>,
    pub lengths: Vec<u32>,
}

impl PreprocessedDatabase {
    pub fn num_sequences(&self) -> usize {
        self.ids.len()
    }

    pub fn max_padded_length(&self) -> usize {
        self.chunks
            .iter()
            .map(|c| c.padded_length)
            .max()
            .unwrap_or(0)
    }

    /// Chunk-lane to original index, in chunk order; `None` marks padding.
    pub fn permutation(&self) -> impl Iterator<Item = Option<u32>> + '_ {
        self.chunks
            .iter()
            .flat_map(|c| c.sequence_ids.iter().copied())
    }
}

pub fn preprocess(
    db: &[Sequence],
    cfg: LaneConfig,
    alphabet: &Alphabet,
) -> Result<PreprocessedDatabase> {
    if db.is_empty() {
        return Err(Error::argument("database is empty"));
    }
    if db.len() > u32::MAX as usize - 1 {
        return Err(Error::argument("database has too many sequences"));
    }
    for seq in db {
        if seq.is_empty() {
            return Err(Error::argument(format!(
                "database sequence '{}' is empty",
                seq.id
            )));
        }
        if seq.len() > u32::MAX as usize {
            return Err(Error::argument(format!(
                "database sequence '{}' is too long",
                seq.id
            )));
        }
        if let Some(&bad) = seq
            .residues
            .iter()
            .find(|&&c| !alphabet.is_sequence_code(c))
        {
            return Err(Error::argument(format!(
                "sequence '{}' has invalid residue code {bad}",
                seq.id
            )));
        }
    }

    let mut order: Vec<usize> = (0..db.len()).collect();
    order.sort_by_key(|&i| (db[i].len(), i));

    let lanes = cfg.lanes();
    let dummy = alphabet.dummy_code();
    let chunks = order
        .chunks(lanes)
        .map(|group| {
            let mut packed: Vec<Option<(u32, &[u8])>> = group
                .iter()
                .map(|&i| Some((i as u32, db[i].residues.as_slice())))
                .collect();
            packed.resize(lanes, None);
            DatabaseChunk::pack(&packed, dummy)
        })
        .collect();

    Ok(PreprocessedDatabase {
        chunks,
        total_residues: db.iter().map(|s| s.len() as u64).sum(),
        lane_config: cfg,
        alphabet_fingerprint: alphabet.fingerprint(),
        ids: db.iter().map(|s| s.id.clone()).collect(),
        lengths: db.iter().map(|s| s.len() as u32).collect(),
    })
}

pub fn chunk_count(num_sequences: usize, lanes: usize) -> usize {
    num_sequences.div_ceil(lanes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn db(lengths: &[usize]) -> Vec<Sequence> {
        lengths
            .iter()
            .enumerate()
            .map(|(i, &n)| Sequence::new(format!("s{i}"), vec![(i % 20) as u8; n]))
            .collect()
    }

    fn cfg4() -> LaneConfig {
        LaneConfig::new(4, ElementWidth::W32).unwrap()
    }

    #[test]
    fn lane_config_validation() {
        assert_eq!(
            LaneConfig::for_vector(256, ElementWidth::W8)
                .unwrap()
                .lanes(),
            32
        );
        assert_eq!(
            LaneConfig::for_vector(128, ElementWidth::W32)
                .unwrap()
                .lanes(),
            4
        );
        assert!(LaneConfig::new(4, ElementWidth::W8).is_err());
        assert!(LaneConfig::new(12, ElementWidth::W16).is_err());
        assert!(LaneConfig::for_vector(64, ElementWidth::W16).is_err());
        let w = LaneConfig::new(32, ElementWidth::W8)
            .unwrap()
            .wider()
            .unwrap();
        assert_eq!((w.lanes(), w.width()), (16, ElementWidth::W16));
    }

    #[test]
    fn sorts_with_index_ties() {
        let a = Alphabet::protein();
        let p = preprocess(&db(&[7, 3, 5, 3]), cfg4(), &a).unwrap();
        assert_eq!(p.chunks.len(), 1);
        let c = &p.chunks[0];
        assert_eq!(c.sequence_ids, vec![Some(1), Some(3), Some(2), Some(0)]);
        assert_eq!(c.real_lengths, vec![3, 3, 5, 7]);
        assert_eq!(c.padded_length, 7);
        assert_eq!(c.residues.len(), 28);
        // lane 0 (length 3) is padded from position 3 on
        assert_eq!(c.column(3)[0], a.dummy_code());
        assert_eq!(
            c.column(6),
            &[a.dummy_code(), a.dummy_code(), a.dummy_code(), 0]
        );
        assert_eq!(p.total_residues, 18);
    }

    #[test]
    fn partial_chunk() {
        let a = Alphabet::protein();
        let p = preprocess(&db(&[1, 2, 3, 4, 5]), cfg4(), &a).unwrap();
        assert_eq!(p.chunks.len(), 2);
        let last = &p.chunks[1];
        assert_eq!(last.sequence_ids, vec![Some(4), None, None, None]);
        assert_eq!(last.real_lengths, vec![5, 0, 0, 0]);
        assert!(last
            .residues
            .chunks(4)
            .all(|col| col[1..].iter().all(|&c| c == a.dummy_code())));
        assert_eq!(p.permutation().filter(Option::is_none).count(), 3);
    }

    #[test]
    fn paper_database_chunking() {
        assert_eq!(chunk_count(6_962_291, 32), 217_572);
    }

    #[test]
    fn select_lanes_trims() {
        let a = Alphabet::protein();
        let p = preprocess(&db(&[2, 9, 4, 6]), cfg4(), &a).unwrap();
        let half = p.chunks[0].select_lanes(0..2, a.dummy_code());
        assert_eq!(half.lanes(), 2);
        assert_eq!(half.padded_length, 4);
        assert_eq!(half.sequence_ids, vec![Some(0), Some(2)]);
        assert_eq!(half.lane_residues(1), vec![2; 4]);
    }

    #[test]
    fn rejects_bad_input() {
        let a = Alphabet::protein();
        assert!(preprocess(&[], cfg4(), &a).is_err());
        assert!(preprocess(&db(&[3, 0]), cfg4(), &a).is_err());
        let bad = vec![Sequence::new("x", vec![a.dummy_code()])];
        assert!(preprocess(&bad, cfg4(), &a).is_err());
    }
}
