mod common;

use swdb::cache::{load_cache, save_cache};
use swdb::engine::{Backend, EngineOptions, ProfileStrategy};
use swdb::scheduler::{run_search, sort_results};
use swdb::{
    align_scalar, preprocess, Alphabet, ElementWidth, GapPenalties, Sequence, SubstitutionMatrix,
};

fn setup() -> (Alphabet, SubstitutionMatrix, GapPenalties) {
    let a = Alphabet::protein();
    let sm = SubstitutionMatrix::blosum62(&a);
    (a, sm, GapPenalties::default())
}

fn expected(
    query: &Sequence,
    db: &[Sequence],
    sm: &SubstitutionMatrix,
    gp: &GapPenalties,
) -> Vec<i64> {
    db.iter()
        .map(|s| align_scalar(query, s, sm, gp).unwrap())
        .collect()
}

#[test]
fn small_database_in_original_order() {
    let (a, sm, gp) = setup();
    let db: Vec<Sequence> = ["AW", "WWWW", "PPPPPPP", "A", "MKVLAAW"]
        .iter()
        .enumerate()
        .map(|(i, t)| Sequence::from_text(format!("s{i}"), t, &a))
        .collect();
    let q = Sequence::from_text("q", "AWKV", &a);
    let opts = EngineOptions::default();
    let pdb = preprocess(&db, opts.lane_config().unwrap(), &a).unwrap();
    let results = run_search(&q, &pdb, &sm, &gp, &opts, 2).unwrap();
    assert_eq!(results.len(), 5);
    let ids: Vec<&str> = results.iter().map(|r| r.db_id.as_str()).collect();
    assert_eq!(ids, ["s0", "s1", "s2", "s3", "s4"]);
    let scores: Vec<i64> = results.iter().map(|r| r.score).collect();
    assert_eq!(scores, expected(&q, &db, &sm, &gp));
}

#[test]
fn thread_count_does_not_change_results() {
    let (a, sm, gp) = setup();
    let db = common::synthetic_database(11, 300);
    let q = common::sequences(&mut common::rng(12), 1, 100..=100, common::STANDARD_CODES).remove(0);
    let opts = EngineOptions::default();
    let pdb = preprocess(&db, opts.lane_config().unwrap(), &a).unwrap();
    let one = sort_results(run_search(&q, &pdb, &sm, &gp, &opts, 1).unwrap());
    let eight = sort_results(run_search(&q, &pdb, &sm, &gp, &opts, 8).unwrap());
    assert_eq!(one, eight);
}

#[test]
fn every_configuration_matches_scalar() {
    let (a, sm, gp) = setup();
    let mut rng = common::rng(21);
    let db = common::sequences(&mut rng, 70, 1..=120, 24);
    let q = common::sequences(&mut rng, 1, 30..=30, 24).remove(0);
    let want = expected(&q, &db, &sm, &gp);
    for vector_bits in [128, 256, 512] {
        for start_width in [ElementWidth::W8, ElementWidth::W16, ElementWidth::W32] {
            for profile in [ProfileStrategy::QueryProfile, ProfileStrategy::ScoreProfile] {
                for backend in [Backend::Portable, Backend::Auto] {
                    let opts = EngineOptions {
                        vector_bits,
                        start_width,
                        profile,
                        backend,
                        ..EngineOptions::default()
                    };
                    let pdb = preprocess(&db, opts.lane_config().unwrap(), &a).unwrap();
                    let got: Vec<i64> = run_search(&q, &pdb, &sm, &gp, &opts, 3)
                        .unwrap()
                        .iter()
                        .map(|r| r.score)
                        .collect();
                    assert_eq!(got, want, "{opts:?}");
                }
            }
        }
    }
}

#[test]
fn high_scores_escalate_correctly() {
    let (a, sm, gp) = setup();
    let mut db = common::synthetic_database(31, 40);
    db.push(common::homopolymer(&a, b'W', 400, "w400"));
    db.push(common::homopolymer(&a, b'W', 5000, "w5000"));
    let q = common::homopolymer(&a, b'W', 4000, "q");
    let opts = EngineOptions::default();
    let pdb = preprocess(&db, opts.lane_config().unwrap(), &a).unwrap();
    let results = run_search(&q, &pdb, &sm, &gp, &opts, 2).unwrap();
    assert_eq!(results[40].score, 4400);
    assert_eq!(results[41].score, 44000);
    assert_eq!(
        results.iter().map(|r| r.score).collect::<Vec<_>>(),
        expected(&q, &db, &sm, &gp)
    );
}

#[test]
fn cached_database_searches_identically() {
    let (a, sm, gp) = setup();
    let db = common::synthetic_database(41, 120);
    let q = common::sequences(&mut common::rng(42), 1, 80..=80, common::STANDARD_CODES).remove(0);
    let opts = EngineOptions::default();
    let pdb = preprocess(&db, opts.lane_config().unwrap(), &a).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("db.cache");
    save_cache(&pdb, &path).unwrap();
    let loaded = load_cache(&path, &a, opts.lane_config().unwrap()).unwrap();
    assert_eq!(loaded, pdb);
    assert_eq!(
        run_search(&q, &loaded, &sm, &gp, &opts, 2).unwrap(),
        run_search(&q, &pdb, &sm, &gp, &opts, 2).unwrap()
    );
}

#[test]
fn mismatched_packing_is_rejected() {
    let (a, sm, gp) = setup();
    let db = common::synthetic_database(51, 10);
    let opts = EngineOptions::default();
    let narrow = EngineOptions {
        vector_bits: 128,
        ..opts
    };
    let pdb = preprocess(&db, narrow.lane_config().unwrap(), &a).unwrap();
    let q = Sequence::from_text("q", "AW", &a);
    assert!(run_search(&q, &pdb, &sm, &gp, &opts, 1).is_err());
    assert!(run_search(&q, &pdb, &sm, &gp, &narrow, 0).is_err());
}
