//! Generators shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swdb::{Alphabet, Sequence, SubstitutionMatrix};

/// Codes of the 20 standard amino acids.
pub const STANDARD_CODES: u8 = 20;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn residues(rng: &mut impl Rng, len: usize, codes: u8) -> Vec<u8> {
    (0..len).map(|_| rng.gen_range(0..codes)).collect()
}

pub fn sequences(
    rng: &mut impl Rng,
    count: usize,
    lengths: std::ops::RangeInclusive<usize>,
    codes: u8,
) -> Vec<Sequence> {
    (0..count)
        .map(|i| {
            let len = rng.gen_range(lengths.clone());
            Sequence::new(format!("seq{i}"), residues(rng, len, codes))
        })
        .collect()
}

/// Symmetric matrix over the protein alphabet with entries in `lo..=hi`.
pub fn symmetric_matrix(
    rng: &mut impl Rng,
    alphabet: &Alphabet,
    lo: i8,
    hi: i8,
) -> SubstitutionMatrix {
    let n = alphabet.len();
    let mut scores = vec![0i8; n * n];
    for i in 0..n {
        for j in i..n {
            let s = rng.gen_range(lo..=hi);
            scores[i * n + j] = s;
            scores[j * n + i] = s;
        }
    }
    SubstitutionMatrix::from_scores("random", alphabet, scores).unwrap()
}

/// Protein-like database: lengths skewed towards a few hundred residues,
/// with a long tail up to about 2000.
pub fn synthetic_database(seed: u64, count: usize) -> Vec<Sequence> {
    let mut rng = rng(seed);
    (0..count)
        .map(|i| {
            let u: f64 = rng.gen();
            let len = (40.0 + 280.0 * (-(1.0 - u).ln())).min(2000.0) as usize;
            Sequence::new(format!("db{i:05}"), residues(&mut rng, len, STANDARD_CODES))
        })
        .collect()
}

pub fn homopolymer(alphabet: &Alphabet, symbol: u8, len: usize, id: &str) -> Sequence {
    Sequence::new(id, vec![alphabet.code(symbol).unwrap(); len])
}
