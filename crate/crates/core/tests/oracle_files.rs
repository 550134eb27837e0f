use std::str::FromStr;

use relativize::formula::Formula;
use relativize::machine::Budget;
use relativize::oracles::{
    build_a, build_b, build_c_bar, build_d, build_e, build_f, load_oracle, save_oracle, Corpus,
    OracleKind, OracleSet,
};
use relativize::Error;

fn f(id: u64, k: usize, clauses: &[&[i64]]) -> Formula {
    Formula::from_dimacs(id, k, clauses).unwrap()
}

fn corpus() -> Corpus {
    Corpus::uniform(
        vec![
            f(1, 3, &[&[1, 2, 3]]),
            f(2, 8, &[&[1], &[-1]]),
            f(3, 2, &[&[1, -2], &[-1, 2]]),
            f(4, 4, &[&[1], &[-1]]),
        ],
        Budget::default(),
    )
    .unwrap()
}

#[test]
fn kind_names() {
    for kind in OracleKind::ALL {
        assert_eq!(OracleKind::from_str(kind.as_str()).unwrap(), kind);
        assert_eq!(kind.to_string(), kind.as_str());
    }
    assert_eq!(OracleKind::from_str("c_bar").unwrap(), OracleKind::CBar);
    assert!(OracleKind::from_str("G").is_err());
}

#[test]
fn corpus_ids_must_be_dense() {
    let err = Corpus::uniform(vec![f(2, 1, &[&[1]])], Budget::default()).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
    assert!(Corpus::new(vec![f(1, 1, &[&[1]])], vec![]).is_err());
}

#[test]
fn every_kind_round_trips_through_a_file() {
    let c = corpus();
    let dir = tempfile::tempdir().unwrap();
    let a = build_a(&c).unwrap();
    let (d, d_bar) = build_d(
        &Corpus::uniform(
            vec![f(1, 1, &[&[1], &[-1]]), f(2, 2, &[&[1], &[-1]])],
            Budget::new(1, 1),
        )
        .unwrap(),
    )
    .unwrap();
    let sets = [
        a.clone(),
        build_b(&c).unwrap(),
        build_c_bar(&c).unwrap(),
        build_e(&c, &a).unwrap(),
        build_f(&c).unwrap(),
    ];
    for set in &sets {
        let path = dir.path().join(format!("{}.json", set.kind()));
        save_oracle(set, &path).unwrap();
        let back = load_oracle(&path, &c, Some(set.kind())).unwrap();
        assert_eq!(&back, set);
        for code in set.members() {
            assert_eq!(back.provenance(code), set.provenance(code));
        }
    }
    assert_eq!(d_bar.len(), 0);
    assert_eq!(d.len(), 4);
}

#[test]
fn members_are_decimal_strings() {
    let c = corpus();
    let json = build_a(&c).unwrap().to_json().unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["kind"], "A");
    assert_eq!(v["corpus_hash"].as_str().unwrap(), c.hash());
    for m in v["members"].as_array().unwrap() {
        let s = m.as_str().unwrap();
        assert!(s.bytes().all(|b| b.is_ascii_digit()));
    }
}

#[test]
fn foreign_corpus_rejected() {
    let c = corpus();
    let json = build_a(&c).unwrap().to_json().unwrap();
    let other = Corpus::uniform(vec![f(1, 2, &[&[1]])], Budget::default()).unwrap();
    assert!(matches!(
        OracleSet::from_json(&json, &other, None),
        Err(Error::Config(_))
    ));
}

#[test]
fn budget_is_part_of_the_corpus_hash() {
    let c = corpus();
    let json = build_b(&c).unwrap().to_json().unwrap();
    let rebudgeted = Corpus::uniform(c.problems().to_vec(), Budget::new(1, 1)).unwrap();
    assert_ne!(c.hash(), rebudgeted.hash());
    assert!(OracleSet::from_json(&json, &rebudgeted, None).is_err());
}

#[test]
fn kind_mismatch_rejected() {
    let c = corpus();
    let json = build_a(&c).unwrap().to_json().unwrap();
    assert!(matches!(
        OracleSet::from_json(&json, &c, Some(OracleKind::C)),
        Err(Error::Config(_))
    ));
}

#[test]
fn malformed_files_rejected() {
    let c = corpus();
    let hash = c.hash();
    let cases = [
        "not json".to_string(),
        format!(r#"{{"kind":"A","members":["12x"],"corpus_hash":"{hash}"}}"#),
        format!(r#"{{"kind":"A","members":[12],"corpus_hash":"{hash}"}}"#),
        format!(r#"{{"kind":"Z","members":[],"corpus_hash":"{hash}"}}"#),
        format!(r#"{{"kind":"A","members":[],"corpus_hash":"{hash}","extra":1}}"#),
        // 12 = pair(1, 3): the Gödel number 3 names no corpus problem.
        format!(r#"{{"kind":"A","members":["12"],"corpus_hash":"{hash}"}}"#),
        // 12 is not an input code of any corpus problem either.
        format!(r#"{{"kind":"B","members":["12"],"corpus_hash":"{hash}"}}"#),
        format!(
            r#"{{"kind":"A","members":[],"corpus_hash":"{hash}","provenance":[{{"code":"5","problem_id":1,"step":"x"}}]}}"#
        ),
    ];
    for text in &cases {
        assert!(
            OracleSet::from_json(text, &c, None).is_err(),
            "accepted {text}"
        );
    }
    let empty = format!(r#"{{"kind":"A","members":[],"corpus_hash":"{hash}"}}"#);
    assert!(OracleSet::from_json(&empty, &c, None).unwrap().is_empty());
}

#[test]
fn save_replaces_existing_file() {
    let c = corpus();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("o.json");
    std::fs::write(&path, "stale").unwrap();
    let a = build_a(&c).unwrap();
    save_oracle(&a, &path).unwrap();
    assert_eq!(load_oracle(&path, &c, None).unwrap(), a);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}
