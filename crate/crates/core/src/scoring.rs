//! Substitution matrices and affine gap penalties.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};

/// NCBI BLOSUM62 in the whitespace-delimited text format.
pub const BLOSUM62_TEXT: &str = include_str!("../data/BLOSUM62");

/// Symmetric residue-by-residue score table over an alphabet's residue codes.
///
/// The unknown code scores like the matrix's `X` row (or the matrix minimum
/// when the alphabet has no `X`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionMatrix {
    name: String,
    dim: usize,
    scores: Vec<i8>,
    /// Unknown code against residue codes `0..dim`, then against itself.
    unknown_row: Vec<i8>,
}

impl SubstitutionMatrix {
    /// Builds a matrix from a dense row-major table. The unknown code scores
    /// like `X` when `alphabet` contains it.
    pub fn from_scores(
        name: impl Into<String>,
        alphabet: &Alphabet,
        scores: Vec<i8>,
    ) -> Result<Self> {
        let dim = alphabet.len();
        if scores.len() != dim * dim {
            return Err(Error::argument(format!(
                "expected {} scores for a {dim}x{dim} matrix, got {}",
                dim * dim,
                scores.len()
            )));
        }
        for a in 0..dim {
            for b in 0..a {
                if scores[a * dim + b] != scores[b * dim + a] {
                    return Err(Error::Validation(format!(
                        "matrix is not symmetric: score({}, {}) = {} but score({}, {}) = {}",
                        alphabet.decode(a as u8) as char,
                        alphabet.decode(b as u8) as char,
                        scores[a * dim + b],
                        alphabet.decode(b as u8) as char,
                        alphabet.decode(a as u8) as char,
                        scores[b * dim + a],
                    )));
                }
            }
        }
        let unknown_row = match alphabet.code(b'X') {
            Some(x) => {
                let x = usize::from(x);
                let mut row = scores[x * dim..(x + 1) * dim].to_vec();
                row.push(scores[x * dim + x]);
                row
            }
            None => vec![scores.iter().copied().min().unwrap_or(0); dim + 1],
        };
        Ok(SubstitutionMatrix {
            name: name.into(),
            dim,
            scores,
            unknown_row,
        })
    }

    pub fn blosum62(alphabet: &Alphabet) -> Self {
        parse_matrix(BLOSUM62_TEXT.as_bytes(), alphabet)
            .map(|m| m.with_name("BLOSUM62"))
            .expect("embedded BLOSUM62 is valid")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of residue codes covered (the alphabet size).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Score for two sequence codes (residues or the unknown code).
    ///
    /// Panics on codes above the unknown code.
    #[inline]
    pub fn score(&self, a: u8, b: u8) -> i8 {
        let (a, b) = (usize::from(a), usize::from(b));
        match (a < self.dim, b < self.dim) {
            (true, true) => self.scores[a * self.dim + b],
            (false, true) => self.unknown_score(a, b),
            (true, false) => self.unknown_score(b, a),
            (false, false) => {
                assert!(a == self.dim && b == self.dim, "invalid residue code");
                self.unknown_row[self.dim]
            }
        }
    }

    fn unknown_score(&self, unknown: usize, residue: usize) -> i8 {
        assert_eq!(unknown, self.dim, "invalid residue code");
        self.unknown_row[residue]
    }

    pub fn is_valid_code(&self, code: u8) -> bool {
        usize::from(code) <= self.dim
    }

    pub fn min_score(&self) -> i8 {
        self.scores
            .iter()
            .chain(&self.unknown_row)
            .copied()
            .min()
            .unwrap_or(0)
    }

    pub fn max_score(&self) -> i8 {
        self.scores
            .iter()
            .chain(&self.unknown_row)
            .copied()
            .max()
            .unwrap_or(0)
    }
}

/// Parses an NCBI-style matrix: `#` comments, a header row of symbols, then
/// one labeled row per symbol.
///
/// Alphabet symbols missing from the file take the file's `X` scores.
/// Symbols in the file that the alphabet lacks are ignored.
pub fn parse_matrix<R: Read>(input: R, alphabet: &Alphabet) -> Result<SubstitutionMatrix> {
    let reader = BufReader::new(input);
    let mut header: Option<Vec<u8>> = None;
    let mut rows: Vec<Option<Vec<i8>>> = Vec::new();

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let Some(cols) = header.as_ref() else {
            if tokens
                .iter()
                .any(|t| t.len() != 1 || t.parse::<i64>().is_ok())
            {
                return Err(Error::format(
                    lineno,
                    "missing header row of single-character symbols",
                ));
            }
            let cols: Vec<u8> = tokens
                .iter()
                .map(|t| t.as_bytes()[0].to_ascii_uppercase())
                .collect();
            rows = vec![None; cols.len()];
            header = Some(cols);
            continue;
        };
        let label = tokens[0];
        if label.len() != 1 {
            return Err(Error::format(
                lineno,
                format!("row label '{label}' is not a single symbol"),
            ));
        }
        let label = label.as_bytes()[0].to_ascii_uppercase();
        let Some(row_index) = cols.iter().position(|&c| c == label) else {
            return Err(Error::format(
                lineno,
                format!("row '{}' is not in the header", label as char),
            ));
        };
        if tokens.len() - 1 != cols.len() {
            return Err(Error::format(
                lineno,
                format!(
                    "row '{}' has {} scores, header has {} symbols",
                    label as char,
                    tokens.len() - 1,
                    cols.len()
                ),
            ));
        }
        let mut values = Vec::with_capacity(cols.len());
        for (col, tok) in cols.iter().zip(&tokens[1..]) {
            let value: i64 = tok
                .parse()
                .map_err(|_| Error::format(lineno, format!("'{tok}' is not an integer score")))?;
            let value = i8::try_from(value).map_err(|_| Error::Range {
                what: format!("score({}, {})", label as char, *col as char),
                value,
            })?;
            values.push(value);
        }
        if rows[row_index].replace(values).is_some() {
            return Err(Error::format(
                lineno,
                format!("duplicate row '{}'", label as char),
            ));
        }
    }

    let Some(cols) = header else {
        return Err(Error::format(0, "missing header row"));
    };
    if let Some(missing) = rows.iter().position(Option::is_none) {
        return Err(Error::format(
            0,
            format!("no row for symbol '{}'", cols[missing] as char),
        ));
    }
    let file: Vec<Vec<i8>> = rows.into_iter().map(Option::unwrap).collect();
    for a in 0..cols.len() {
        for b in 0..a {
            if file[a][b] != file[b][a] {
                return Err(Error::Validation(format!(
                    "matrix is not symmetric: score({}, {}) = {} but score({}, {}) = {}",
                    cols[a] as char,
                    cols[b] as char,
                    file[a][b],
                    cols[b] as char,
                    cols[a] as char,
                    file[b][a]
                )));
            }
        }
    }

    let x_index = cols.iter().position(|&c| c == b'X');
    let resolve = |symbol: u8| -> Result<usize> {
        cols.iter()
            .position(|&c| c == symbol)
            .or(x_index)
            .ok_or_else(|| {
                Error::Validation(format!(
                    "symbol '{}' is absent and the file has no X row",
                    symbol as char
                ))
            })
    };
    let dim = alphabet.len();
    let mut scores = Vec::with_capacity(dim * dim);
    for &a in alphabet.symbols() {
        let ia = resolve(a)?;
        for &b in alphabet.symbols() {
            scores.push(file[ia][resolve(b)?]);
        }
    }
    SubstitutionMatrix::from_scores("custom", alphabet, scores)
}

/// Loads `blosum62` (case-insensitive) or a matrix file.
pub fn load_matrix(spec: &str, alphabet: &Alphabet) -> Result<SubstitutionMatrix> {
    if spec.eq_ignore_ascii_case("blosum62") {
        return Ok(SubstitutionMatrix::blosum62(alphabet));
    }
    let path = Path::new(spec);
    let name = path
        .file_name()
        .map_or_else(|| spec.to_string(), |n| n.to_string_lossy().into_owned());
    Ok(parse_matrix(File::open(path)?, alphabet)?.with_name(name))
}

/// Affine gap costs. A gap of length `k` costs `open + k * extend`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GapPenalties {
    open: i32,
    extend: i32,
    open_extend: i32,
}

impl GapPenalties {
    pub fn new(open: i32, extend: i32) -> Result<Self> {
        if open < 0 || extend < 0 {
            return Err(Error::argument(format!(
                "gap penalties must be non-negative (open {open}, extend {extend})"
            )));
        }
        let open_extend = open
            .checked_add(extend)
            .ok_or_else(|| Error::argument("gap open + extend overflows"))?;
        Ok(GapPenalties {
            open,
            extend,
            open_extend,
        })
    }

    pub fn open(&self) -> i32 {
        self.open
    }

    pub fn extend(&self) -> i32 {
        self.extend
    }

    /// Cost of the first gap position: open + extend.
    pub fn open_extend(&self) -> i32 {
        self.open_extend
    }
}

impl Default for GapPenalties {
    fn default() -> Self {
        GapPenalties {
            open: 10,
            extend: 2,
            open_extend: 12,
        }
    }
}

pub fn make_gap_penalties(open: i32, extend: i32) -> Result<GapPenalties> {
    GapPenalties::new(open, extend)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(a: &Alphabet, s: u8) -> u8 {
        a.code(s).unwrap()
    }

    #[test]
    fn blosum62_values() {
        let a = Alphabet::protein();
        let m = SubstitutionMatrix::blosum62(&a);
        assert_eq!(m.score(code(&a, b'A'), code(&a, b'A')), 4);
        assert_eq!(m.score(code(&a, b'W'), code(&a, b'W')), 11);
        assert_eq!(m.score(code(&a, b'A'), code(&a, b'V')), 0);
        assert_eq!(m.score(code(&a, b'*'), code(&a, b'*')), 1);
        assert_eq!(m.min_score(), -4);
        assert_eq!(m.max_score(), 11);
    }

    #[test]
    fn unknown_scores_as_x() {
        let a = Alphabet::protein();
        let m = SubstitutionMatrix::blosum62(&a);
        let x = code(&a, b'X');
        for c in 0..24u8 {
            assert_eq!(m.score(a.unknown_code(), c), m.score(x, c));
            assert_eq!(m.score(c, a.unknown_code()), m.score(c, x));
        }
        assert_eq!(m.score(a.unknown_code(), a.unknown_code()), -1);
    }

    #[test]
    fn asymmetric_rejected() {
        let text = "   A  C\nA  4 -1\nC  0  9\n";
        let a = Alphabet::new(b"AC").unwrap();
        assert!(matches!(
            parse_matrix(text.as_bytes(), &a),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn missing_header() {
        let text = "# comment\nA 4 0\nC 0 9\n";
        let a = Alphabet::new(b"AC").unwrap();
        assert!(matches!(
            parse_matrix(text.as_bytes(), &a),
            Err(Error::Format { .. })
        ));
        assert!(matches!(
            parse_matrix("".as_bytes(), &a),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn out_of_range() {
        let text = "   A  C\nA  400 0\nC  0  9\n";
        let a = Alphabet::new(b"AC").unwrap();
        assert!(matches!(
            parse_matrix(text.as_bytes(), &a),
            Err(Error::Range { value: 400, .. })
        ));
    }

    #[test]
    fn absent_symbols_use_x_row() {
        let text = "   A  X\nA  4 -1\nX -1 -2\n";
        let a = Alphabet::new(b"ACX").unwrap();
        let m = parse_matrix(text.as_bytes(), &a).unwrap();
        assert_eq!(m.score(1, 0), -1);
        assert_eq!(m.score(1, 1), -2);
        assert_eq!(m.score(0, 0), 4);
    }

    #[test]
    fn gap_penalties() {
        let g = make_gap_penalties(10, 2).unwrap();
        assert_eq!((g.open(), g.extend(), g.open_extend()), (10, 2, 12));
        assert_eq!(g, GapPenalties::default());
        assert_eq!(make_gap_penalties(0, 0).unwrap().open_extend(), 0);
        assert_eq!(make_gap_penalties(5, 1).unwrap().open_extend(), 6);
        assert!(make_gap_penalties(-1, 2).is_err());
        assert!(make_gap_penalties(1, -2).is_err());
    }
}
