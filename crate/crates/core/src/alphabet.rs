//! Residue alphabets and the small-integer codes used throughout the engine.
//!
//! Residue symbols occupy codes `0..len()`. Two extra codes follow them:
//! `unknown_code() == len()` for characters outside the alphabet and
//! `dummy_code() == len() + 1` for the padding symbol inserted by the
//! database preprocessor.

use crate::error::{Error, Result};

/// BLOSUM ordering of the 20 amino acids plus the ambiguity codes B, Z, X and
/// the stop symbol.
pub const PROTEIN_SYMBOLS: &[u8; 24] = b"ARNDCQEGHILKMFPSTWYVBZX*";

/// Upper bound on `Alphabet::code_count()`. Lookup rows are padded to this
/// width so a masked code can index them without a bounds check.
pub const MAX_CODES: usize = 32;

/// Character written for `unknown_code` when sequences are serialized.
pub const UNKNOWN_CHAR: u8 = b'?';

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<u8>,
    codes: [u8; 256],
}

const NO_CODE: u8 = u8::MAX;

impl Alphabet {
    pub fn new(symbols: &[u8]) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::argument("alphabet needs at least one symbol"));
        }
        if symbols.len() + 2 > MAX_CODES {
            return Err(Error::argument(format!(
                "alphabet of {} symbols exceeds the {} code limit",
                symbols.len(),
                MAX_CODES - 2
            )));
        }
        let mut codes = [NO_CODE; 256];
        let mut upper = Vec::with_capacity(symbols.len());
        for (i, &s) in symbols.iter().enumerate() {
            let s = s.to_ascii_uppercase();
            if s.is_ascii_whitespace() || s == b'>' || s == UNKNOWN_CHAR {
                return Err(Error::argument(format!(
                    "'{}' cannot be an alphabet symbol",
                    s as char
                )));
            }
            if codes[s as usize] != NO_CODE {
                return Err(Error::argument(format!(
                    "duplicate alphabet symbol '{}'",
                    s as char
                )));
            }
            codes[s as usize] = i as u8;
            codes[s.to_ascii_lowercase() as usize] = i as u8;
            upper.push(s);
        }
        Ok(Alphabet {
            symbols: upper,
            codes,
        })
    }

    pub fn protein() -> Self {
        Self::new(PROTEIN_SYMBOLS).expect("built-in alphabet is valid")
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// Number of residue symbols.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn unknown_code(&self) -> u8 {
        self.symbols.len() as u8
    }

    pub fn dummy_code(&self) -> u8 {
        self.symbols.len() as u8 + 1
    }

    /// Residue codes plus the unknown and dummy codes.
    pub fn code_count(&self) -> usize {
        self.symbols.len() + 2
    }

    /// Case-insensitive lookup; `None` for characters outside the alphabet.
    pub fn code(&self, symbol: u8) -> Option<u8> {
        match self.codes[symbol as usize] {
            NO_CODE => None,
            c => Some(c),
        }
    }

    pub fn encode(&self, symbol: u8) -> u8 {
        self.code(symbol).unwrap_or_else(|| self.unknown_code())
    }

    pub fn decode(&self, code: u8) -> u8 {
        match self.symbols.get(code as usize) {
            Some(&s) => s,
            None if code == self.dummy_code() => b'#',
            None => UNKNOWN_CHAR,
        }
    }

    /// Codes valid inside a parsed sequence (residues and unknown).
    pub fn is_sequence_code(&self, code: u8) -> bool {
        code <= self.unknown_code()
    }

    /// FNV-1a over the symbol list; stored in database cache headers.
    pub fn fingerprint(&self) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for &b in &self.symbols {
            hash ^= u64::from(b);
            hash = hash.wrapping_mul(0x0100_0000_01b3);
        }
        hash
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Self::protein()
    }
}
