mod common;

use std::path::PathBuf;

use proptest::prelude::*;

use swdb::scoring::{load_matrix, make_gap_penalties, parse_matrix};
use swdb::sequence::write_fasta;
use swdb::{parse_fasta, Alphabet, Error, Sequence, SubstitutionMatrix};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn code(a: &Alphabet, c: u8) -> u8 {
    a.code(c).unwrap()
}

#[test]
fn fasta_single_record() {
    let a = Alphabet::protein();
    let seqs = parse_fasta(&b">s1\nACD\n"[..], &a).unwrap();
    assert_eq!(seqs.len(), 1);
    assert_eq!(seqs[0].id, "s1");
    assert_eq!(
        seqs[0].residues,
        [code(&a, b'A'), code(&a, b'C'), code(&a, b'D')]
    );
    assert_eq!(seqs[0].len(), 3);
}

#[test]
fn fasta_keeps_file_order() {
    let a = Alphabet::protein();
    let seqs = parse_fasta(&b">a\nAC\n>b\nWWWW\n"[..], &a).unwrap();
    let summary: Vec<(&str, usize)> = seqs.iter().map(|s| (s.id.as_str(), s.len())).collect();
    assert_eq!(summary, [("a", 2), ("b", 4)]);
}

#[test]
fn fasta_unknown_residue() {
    let a = Alphabet::protein();
    let seqs = parse_fasta(&b">s\nA?C\n"[..], &a).unwrap();
    assert_eq!(seqs[0].residues[1], a.unknown_code());
}

#[test]
fn fasta_multiline_and_description() {
    let a = Alphabet::protein();
    let seqs = parse_fasta(&b">sp|P1| some protein\r\nAC\r\n\r\ndw\n"[..], &a).unwrap();
    assert_eq!(seqs[0].id, "sp|P1|");
    assert_eq!(seqs[0].description, "some protein");
    assert_eq!(seqs[0].to_text(&a), "ACDW");
}

#[test]
fn fasta_errors() {
    let a = Alphabet::protein();
    assert!(matches!(
        parse_fasta(&b"ACD\n>s\nA\n"[..], &a),
        Err(Error::Format { line: 1, .. })
    ));
    assert!(matches!(
        parse_fasta(&b">empty\n>s\nA\n"[..], &a),
        Err(Error::MalformedRecord { .. })
    ));
    assert!(parse_fasta(&b""[..], &a).unwrap().is_empty());
}

proptest! {
    #[test]
    fn fasta_round_trip(seqs in prop::collection::vec(("[a-z][a-z0-9_]{0,8}", prop::collection::vec(0u8..25, 1..150)), 1..8)) {
        let a = Alphabet::protein();
        let seqs: Vec<Sequence> = seqs.into_iter().map(|(id, r)| Sequence::new(id, r)).collect();
        let mut buf = Vec::new();
        write_fasta(&mut buf, &seqs, &a).unwrap();
        prop_assert_eq!(parse_fasta(&buf[..], &a).unwrap(), seqs);
    }
}

#[test]
fn blosum62_fixture_values() {
    let a = Alphabet::protein();
    let sm = load_matrix(fixture("BLOSUM62").to_str().unwrap(), &a).unwrap();
    assert_eq!(sm.score(code(&a, b'A'), code(&a, b'A')), 4);
    assert_eq!(sm.score(code(&a, b'W'), code(&a, b'W')), 11);
    assert_eq!(sm.score(code(&a, b'A'), code(&a, b'V')), 0);
    assert_eq!(sm.dim(), 24);
}

#[test]
fn blosum62_fixture_is_symmetric_and_matches_builtin() {
    let a = Alphabet::protein();
    let sm = parse_matrix(std::fs::File::open(fixture("BLOSUM62")).unwrap(), &a).unwrap();
    let builtin = SubstitutionMatrix::blosum62(&a);
    for x in 0..24u8 {
        for y in 0..24u8 {
            assert_eq!(sm.score(x, y), sm.score(y, x), "{x} {y}");
            assert_eq!(sm.score(x, y), builtin.score(x, y));
        }
    }
}

#[test]
fn asymmetric_matrix_is_rejected() {
    let a = Alphabet::protein();
    let text = std::fs::read_to_string(fixture("BLOSUM62")).unwrap();
    // Row A, column C holds 0 in BLOSUM62; make it 5 without touching C/A.
    let edited: Vec<String> = text
        .lines()
        .map(|l| {
            if l.starts_with("A ") {
                let mut f: Vec<&str> = l.split_whitespace().collect();
                f[5] = "5";
                f.join(" ")
            } else {
                l.to_string()
            }
        })
        .collect();
    let err = parse_matrix(edited.join("\n").as_bytes(), &a).unwrap_err();
    assert!(matches!(err, Error::Validation(_)), "{err}");
}

#[test]
fn gap_penalties() {
    let g = make_gap_penalties(10, 2).unwrap();
    assert_eq!((g.open(), g.extend(), g.open_extend()), (10, 2, 12));
    let g = make_gap_penalties(0, 0).unwrap();
    assert_eq!((g.open(), g.extend(), g.open_extend()), (0, 0, 0));
    assert_eq!(make_gap_penalties(5, 1).unwrap().open_extend(), 6);
    assert!(make_gap_penalties(-1, 2).is_err());
    assert!(make_gap_penalties(1, -2).is_err());
}
