//! On-disk cache of a preprocessed database.
//!
//! All integers are little-endian.
//!
//! ```text
//! header
//!   magic            8 bytes  "SWDBPRE\0"
//!   version          u32      1
//!   lanes            u32
//!   element_bits     u32
//!   alphabet_hash    u64      FNV-1a of the alphabet symbols
//!   sequence_count   u64
//!   chunk_count      u64
//!   total_residues   u64
//! identifiers        sequence_count x (u32 byte length, UTF-8 bytes)
//! lengths            sequence_count x u32
//! chunks             chunk_count x
//!   padded_length    u32
//!   sequence_ids     lanes x u32  (0xFFFFFFFF for a padding lane)
//!   real_lengths     lanes x u32
//!   residues         padded_length x lanes bytes, position-major
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::preprocess::{DatabaseChunk, ElementWidth, LaneConfig, PreprocessedDatabase};

pub const MAGIC: &[u8; 8] = b"SWDBPRE\0";
pub const VERSION: u32 = 1;
const PADDING_LANE: u32 = u32::MAX;

pub fn write_cache<W: Write>(pdb: &PreprocessedDatabase, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(pdb.lane_config.lanes() as u32).to_le_bytes())?;
    out.write_all(&(pdb.lane_config.element_bits() as u32).to_le_bytes())?;
    out.write_all(&pdb.alphabet_fingerprint.to_le_bytes())?;
    out.write_all(&(pdb.num_sequences() as u64).to_le_bytes())?;
    out.write_all(&(pdb.chunks.len() as u64).to_le_bytes())?;
    out.write_all(&pdb.total_residues.to_le_bytes())?;
    for id in &pdb.ids {
        out.write_all(&(id.len() as u32).to_le_bytes())?;
        out.write_all(id.as_bytes())?;
    }
    for &len in &pdb.lengths {
        out.write_all(&len.to_le_bytes())?;
    }
    for chunk in &pdb.chunks {
        out.write_all(&(chunk.padded_length as u32).to_le_bytes())?;
        for id in &chunk.sequence_ids {
            out.write_all(&id.unwrap_or(PADDING_LANE).to_le_bytes())?;
        }
        for len in &chunk.real_lengths {
            out.write_all(&len.to_le_bytes())?;
        }
        out.write_all(&chunk.residues)?;
    }
    out.flush()?;
    Ok(())
}

struct Reader<R> {
    inner: R,
    offset: usize,
}

impl<R: Read> Reader<R> {
    fn bytes(&mut self, n: usize) -> Result<Vec<u8>> {
        let mut buf = vec![0; n];
        self.inner
            .read_exact(&mut buf)
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::UnexpectedEof => {
                    Error::format(self.offset, "cache file is truncated")
                }
                _ => Error::Io(e),
            })?;
        self.offset += n;
        Ok(buf)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes(8)?.try_into().unwrap()))
    }
}

/// Reads a cache and checks it was built for `alphabet` and `cfg`.
///
/// Format errors report the byte offset in place of a line number.
pub fn read_cache<R: Read>(
    input: R,
    alphabet: &Alphabet,
    cfg: LaneConfig,
) -> Result<PreprocessedDatabase> {
    let mut r = Reader {
        inner: BufReader::new(input),
        offset: 0,
    };
    if r.bytes(8)? != MAGIC {
        return Err(Error::format(0, "not a database cache file"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::format(
            8,
            format!("unsupported cache version {version}"),
        ));
    }
    let lanes = r.u32()? as usize;
    let bits = r.u32()? as usize;
    let stored_cfg = LaneConfig::new(lanes, ElementWidth::from_bits(bits)?)?;
    if stored_cfg != cfg {
        return Err(Error::config(format!(
            "cache holds {lanes} lanes of {bits}-bit, expected {} lanes of {}",
            cfg.lanes(),
            cfg.width()
        )));
    }
    let fingerprint = r.u64()?;
    if fingerprint != alphabet.fingerprint() {
        return Err(Error::config("cache was built for a different alphabet"));
    }
    let count = r.u64()? as usize;
    let chunk_count = r.u64()? as usize;
    let total_residues = r.u64()?;
    if chunk_count != count.div_ceil(lanes) {
        return Err(Error::format(
            r.offset,
            "chunk count does not match sequence count",
        ));
    }

    let mut ids = Vec::with_capacity(count);
    for _ in 0..count {
        let len = r.u32()? as usize;
        let bytes = r.bytes(len)?;
        ids.push(
            String::from_utf8(bytes)
                .map_err(|_| Error::format(r.offset, "identifier is not UTF-8"))?,
        );
    }
    let lengths = (0..count).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;

    let max_code = alphabet.dummy_code();
    let mut seen = vec![false; count];
    let mut chunks = Vec::with_capacity(chunk_count);
    for _ in 0..chunk_count {
        let padded_length = r.u32()? as usize;
        let sequence_ids = (0..lanes)
            .map(|_| {
                r.u32().and_then(|id| match id {
                    PADDING_LANE => Ok(None),
                    id if (id as usize) < count
                        && !std::mem::replace(&mut seen[id as usize], true) =>
                    {
                        Ok(Some(id))
                    }
                    id => Err(Error::format(
                        r.offset,
                        format!("invalid or repeated sequence index {id}"),
                    )),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let real_lengths = (0..lanes).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        for (id, &len) in sequence_ids.iter().zip(&real_lengths) {
            let expected = id.map_or(0, |id| lengths[id as usize]);
            if len != expected || len as usize > padded_length {
                return Err(Error::format(r.offset, "lane length is inconsistent"));
            }
        }
        let residues = r.bytes(padded_length * lanes)?;
        if residues.iter().any(|&c| c > max_code) {
            return Err(Error::format(r.offset, "residue code out of range"));
        }
        chunks.push(DatabaseChunk {
            sequence_ids,
            padded_length,
            residues,
            real_lengths,
        });
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::format(
            r.offset,
            "cache does not cover every sequence",
        ));
    }
    if lengths.iter().map(|&l| u64::from(l)).sum::<u64>() != total_residues {
        return Err(Error::format(
            r.offset,
            "total residue count does not match",
        ));
    }
    Ok(PreprocessedDatabase {
        chunks,
        total_residues,
        lane_config: cfg,
        alphabet_fingerprint: fingerprint,
        ids,
        lengths,
    })
}

pub fn save_cache(pdb: &PreprocessedDatabase, path: &Path) -> Result<()> {
    write_cache(pdb, File::create(path)?)
}

pub fn load_cache(
    path: &Path,
    alphabet: &Alphabet,
    cfg: LaneConfig,
) -> Result<PreprocessedDatabase> {
    read_cache(File::open(path)?, alphabet, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::preprocess;
    use crate::sequence::Sequence;

    fn sample() -> (Alphabet, LaneConfig, PreprocessedDatabase) {
        let a = Alphabet::protein();
        let cfg = LaneConfig::new(8, ElementWidth::W16).unwrap();
        let db: Vec<Sequence> = (0..13)
            .map(|i| {
                Sequence::new(
                    format!("seq{i} é"),
                    (0..(i * 7 % 11 + 1)).map(|p| (p % 25) as u8).collect(),
                )
            })
            .collect();
        let pdb = preprocess(&db, cfg, &a).unwrap();
        (a, cfg, pdb)
    }

    #[test]
    fn round_trip() {
        let (a, cfg, pdb) = sample();
        let mut buf = Vec::new();
        write_cache(&pdb, &mut buf).unwrap();
        assert_eq!(&buf[..8], MAGIC);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), VERSION);
        assert_eq!(u32::from_le_bytes(buf[12..16].try_into().unwrap()), 8);
        assert_eq!(read_cache(&buf[..], &a, cfg).unwrap(), pdb);
    }

    #[test]
    fn rejects_mismatch_and_corruption() {
        let (a, cfg, pdb) = sample();
        let mut buf = Vec::new();
        write_cache(&pdb, &mut buf).unwrap();
        let other = LaneConfig::new(16, ElementWidth::W16).unwrap();
        assert!(matches!(
            read_cache(&buf[..], &a, other),
            Err(Error::Config(_))
        ));
        let dna = Alphabet::new(b"ACGT").unwrap();
        assert!(matches!(
            read_cache(&buf[..], &dna, cfg),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            read_cache(&buf[..buf.len() - 1], &a, cfg),
            Err(Error::Format { .. })
        ));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(
            read_cache(&bad[..], &a, cfg),
            Err(Error::Format { .. })
        ));
        let mut bad = buf.clone();
        *bad.last_mut().unwrap() = 200;
        assert!(matches!(
            read_cache(&bad[..], &a, cfg),
            Err(Error::Format { .. })
        ));
    }
}
