//! Encoded sequences and FASTA input/output.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequence {
    pub id: String,
    pub description: String,
    /// Residue codes of an [`Alphabet`].
    pub residues: Vec<u8>,
}

impl Sequence {
    pub fn new(id: impl Into<String>, residues: Vec<u8>) -> Self {
        Sequence {
            id: id.into(),
            description: String::new(),
            residues,
        }
    }

    /// Encodes `text` with `alphabet`; unrecognized characters become the
    /// unknown code.
    pub fn from_text(id: impl Into<String>, text: &str, alphabet: &Alphabet) -> Self {
        let residues = text
            .bytes()
            .filter(|b| !b.is_ascii_whitespace())
            .map(|b| alphabet.encode(b))
            .collect();
        Sequence::new(id, residues)
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        self.residues
            .iter()
            .map(|&c| alphabet.decode(c) as char)
            .collect()
    }
}

/// Parses FASTA records from `input`.
///
/// The id is the first whitespace-delimited token of the header, the
/// remainder is kept as the description. Whitespace inside sequence lines is
/// skipped and matching is case-insensitive.
pub fn parse_fasta<R: Read>(input: R, alphabet: &Alphabet) -> Result<Vec<Sequence>> {
    let reader = BufReader::new(input);
    let mut records = Vec::new();
    let mut current: Option<Sequence> = None;

    for (lineno, line) in reader.split(b'\n').enumerate() {
        let line = line?;
        let line = trim_ascii_end(&line);
        if let Some(header) = line.strip_prefix(b">") {
            if let Some(done) = current.take() {
                records.push(finish_record(done)?);
            }
            let header = String::from_utf8_lossy(header);
            let header = header.trim();
            let (id, description) = match header.split_once(char::is_whitespace) {
                Some((id, rest)) => (id.to_string(), rest.trim().to_string()),
                None => (header.to_string(), String::new()),
            };
            current = Some(Sequence {
                id,
                description,
                residues: Vec::new(),
            });
            continue;
        }
        match current.as_mut() {
            Some(seq) => seq.residues.extend(
                line.iter()
                    .filter(|b| !b.is_ascii_whitespace())
                    .map(|&b| alphabet.encode(b)),
            ),
            None if line.iter().all(u8::is_ascii_whitespace) => {}
            None => {
                return Err(Error::format(
                    lineno + 1,
                    "expected a '>' header before sequence data",
                ));
            }
        }
    }
    if let Some(done) = current.take() {
        records.push(finish_record(done)?);
    }
    Ok(records)
}

fn finish_record(seq: Sequence) -> Result<Sequence> {
    if seq.residues.is_empty() {
        return Err(Error::MalformedRecord {
            id: seq.id,
            message: "record has no residues".into(),
        });
    }
    Ok(seq)
}

fn trim_ascii_end(line: &[u8]) -> &[u8] {
    let end = line
        .iter()
        .rposition(|b| !b.is_ascii_whitespace())
        .map_or(0, |p| p + 1);
    &line[..end]
}

/// Reads a FASTA file, or standard input when `path` is `-`.
pub fn read_fasta_path(path: &Path, alphabet: &Alphabet) -> Result<Vec<Sequence>> {
    if path.as_os_str() == "-" {
        parse_fasta(io::stdin().lock(), alphabet)
    } else {
        parse_fasta(File::open(path)?, alphabet)
    }
}

/// Writes sequences as FASTA with 60 residues per line.
pub fn write_fasta<W: Write>(
    mut out: W,
    sequences: &[Sequence],
    alphabet: &Alphabet,
) -> io::Result<()> {
    for seq in sequences {
        if seq.description.is_empty() {
            writeln!(out, ">{}", seq.id)?;
        } else {
            writeln!(out, ">{} {}", seq.id, seq.description)?;
        }
        for line in seq.residues.chunks(60) {
            let text: Vec<u8> = line.iter().map(|&c| alphabet.decode(c)).collect();
            out.write_all(&text)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}
