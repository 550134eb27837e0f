//! Oracle and machine invariants over random corpora, each checked against
//! a brute-force evaluator written here rather than the library's own.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use proptest::prelude::*;

use relativize::encoding::{
    decode_input, godel_number, pair, partition_code, unpair, PartitionCode,
};
use relativize::formula::{default_names, negate, Clause, Formula, Lit, Problem};
use relativize::lambda::{set_sum_direct, set_sum_naive, SetSumInstance};
use relativize::machine::{
    nd_solve, solve_conp_with_c_bar, solve_with_a, solve_with_b, solve_with_c, Budget, Membership,
    TaggedView, Verdict,
};
use relativize::oracles::{
    build_a, build_b, build_c, build_c_bar, build_d, build_e_traced, build_f, kappa, Corpus,
    DEFAULT_TOWER_STAGE_CAP,
};

/// Satisfying input indices, bit `j` of the index giving literal `j`.
fn models(f: &Formula) -> Vec<usize> {
    (0..1usize << f.k())
        .filter(|&e| {
            f.clauses
                .iter()
                .all(|c| c.iter().any(|l| ((e >> l.var) & 1 == 1) == l.positive))
        })
        .collect()
}

fn arb_formula(max_k: usize) -> impl Strategy<Value = Formula> {
    (1..=max_k).prop_flat_map(|k| {
        let clause = proptest::collection::btree_set((0..k, any::<bool>()), 1..=3.min(k))
            .prop_map(|s| s.into_iter().map(Lit::from).collect::<Clause>());
        proptest::collection::vec(clause, 0..6)
            .prop_map(move |clauses| Formula::new(0, default_names(k), clauses).unwrap())
    })
}

/// Random formulas, optionally followed by the negation of the first few,
/// deduplicated and numbered.
fn arb_corpus(max_k: usize, max_len: usize) -> impl Strategy<Value = Corpus> {
    (
        proptest::collection::vec(arb_formula(max_k), 1..=max_len),
        0usize..3,
    )
        .prop_map(|(fs, negs)| {
            let mut all = fs.clone();
            for f in fs.iter().take(negs) {
                all.push(negate(f).unwrap());
            }
            let mut seen = BTreeSet::new();
            let fs: Vec<Formula> = all
                .into_iter()
                .filter(|f| seen.insert(godel_number(f)))
                .enumerate()
                .map(|(i, f)| f.with_id(i as u64 + 1))
                .collect();
            Corpus::uniform(fs, Budget::default()).unwrap()
        })
}

/// Corpora shaped for D: position `n` holds width `n`.
fn arb_d_corpus() -> impl Strategy<Value = Corpus> {
    proptest::collection::vec(0u8..3, 1..=10).prop_map(|picks| {
        let fs = picks
            .iter()
            .enumerate()
            .map(|(i, pick)| {
                let k = i + 1;
                let clauses: Vec<Clause> = match pick {
                    0 => vec![vec![Lit::pos(0)], vec![Lit::neg(0)]],
                    1 => (0..k).map(|v| vec![Lit::pos(v)]).collect(),
                    _ => vec![vec![Lit::neg(k - 1)]],
                };
                Formula::new(i as u64 + 1, default_names(k), clauses).unwrap()
            })
            .collect();
        Corpus::uniform(fs, Budget::new(1, 1)).unwrap()
    })
}

fn prefix(c: &Corpus, n: usize) -> Corpus {
    Corpus::new(c.problems()[..n].to_vec(), c.budgets()[..n].to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn a_membership_matches_brute_force(c in arb_corpus(7, 6)) {
        let a = build_a(&c).unwrap();
        for f in c.problems() {
            let ms = models(f);
            for t in 0..=f.k() {
                let expected = ms.iter().any(|e| e.count_ones() as usize == t);
                prop_assert_eq!(a.contains(&partition_code(f, t).unwrap().code), expected);
            }
        }
    }

    #[test]
    fn partition_solver_is_correct(c in arb_corpus(8, 6)) {
        let a = build_a(&c).unwrap();
        for f in c.problems() {
            let run = solve_with_a(f, &a).unwrap();
            prop_assert_eq!(run.verdict.accepted(), !models(f).is_empty());
            prop_assert!(run.queries as usize <= f.k() + 1);
            let nd = nd_solve(f, Budget::default()).unwrap();
            prop_assert_eq!(nd.queries, 0);
            prop_assert_eq!(nd.verdict.accepted(), !models(f).is_empty());
        }
    }

    #[test]
    fn partition_codes_distinct(c in arb_corpus(6, 6)) {
        let mut all = BTreeSet::new();
        for f in c.problems() {
            let codes: BTreeSet<BigUint> = (0..=f.k()).map(|t| partition_code(f, t).unwrap().code).collect();
            prop_assert_eq!(codes.len(), f.k() + 1);
            for code in codes {
                let pc = PartitionCode::decode(&code);
                prop_assert_eq!(pc.godel, godel_number(f));
                prop_assert!(all.insert(code));
            }
        }
    }

    #[test]
    fn c_unique_and_c_bar_complete(c in arb_corpus(6, 6)) {
        let c_set = build_c(&c).unwrap();
        let c_bar = build_c_bar(&c).unwrap();
        for f in c.problems() {
            let ms = models(f);
            let mine = c_set
                .members()
                .iter()
                .filter(|m| decode_input(m).unwrap().machine_index == f.id)
                .count();
            let bar = c_bar
                .members()
                .iter()
                .filter(|m| decode_input(m).unwrap().machine_index == f.id)
                .count();
            if ms.is_empty() {
                prop_assert_eq!((mine, bar), (0, 1 << f.k()));
                prop_assert_eq!(solve_with_c(f, &c_set).unwrap().queries, 1u64 << f.k());
            } else {
                prop_assert_eq!((mine, bar), (1, 0));
            }
            let co = solve_conp_with_c_bar(f, &c_bar).unwrap();
            prop_assert_eq!(co.queries, 1);
            prop_assert_eq!(co.verdict.accepted(), ms.is_empty());
        }
    }

    #[test]
    fn f_decides_both_sides(c in arb_corpus(7, 6)) {
        let f_set = build_f(&c).unwrap();
        for f in c.problems() {
            let sat = !models(f).is_empty();
            let np = solve_with_a(f, &TaggedView::new(&f_set, false)).unwrap();
            let co = solve_conp_with_c_bar(f, &TaggedView::new(&f_set, true)).unwrap();
            prop_assert_eq!(np.verdict.accepted(), sat);
            prop_assert!(np.queries as usize <= f.k() + 1);
            prop_assert_eq!(co.verdict.accepted(), !sat);
            prop_assert_eq!(co.queries, 1);
        }
    }

    #[test]
    fn rebuilds_are_identical(c in arb_corpus(6, 5)) {
        prop_assert_eq!(build_a(&c).unwrap(), build_a(&c).unwrap());
        prop_assert_eq!(build_b(&c).unwrap(), build_b(&c).unwrap());
        prop_assert_eq!(build_c(&c).unwrap(), build_c(&c).unwrap());
        prop_assert_eq!(build_f(&c).unwrap(), build_f(&c).unwrap());
    }

    #[test]
    fn b_grows_by_stage(c in arb_corpus(9, 6)) {
        let mut last = BTreeSet::new();
        for n in 1..=c.len() {
            let members = build_b(&prefix(&c, n)).unwrap().members().clone();
            prop_assert!(last.is_subset(&members));
            prop_assert!(members.len() <= last.len() + 1);
            last = members;
        }
    }

    #[test]
    fn d_grows_by_stage(c in arb_d_corpus()) {
        let (mut last_d, mut last_bar) = (BTreeSet::new(), BTreeSet::new());
        for n in 1..=c.len() {
            let (d, bar) = build_d(&prefix(&c, n)).unwrap();
            prop_assert!(last_d.is_subset(d.members()));
            prop_assert!(last_bar.is_subset(bar.members()));
            prop_assert!(d.members().is_disjoint(bar.members()));
            last_d = d.members().clone();
            last_bar = bar.members().clone();
        }
    }

    #[test]
    fn e_extends_a_only_outside_kappa(c in arb_corpus(9, 6)) {
        let a = build_a(&c).unwrap();
        let e = build_e_traced(&c, &a, DEFAULT_TOWER_STAGE_CAP).unwrap();
        let kap = kappa(&c).unwrap();
        prop_assert!(a.members().is_subset(e.oracle.members()));
        let injected: BTreeSet<BigUint> = e.gates.iter().filter_map(|g| g.injected.clone()).collect();
        let extra: BTreeSet<BigUint> = e.oracle.members().difference(a.members()).cloned().collect();
        prop_assert_eq!(extra, injected);
        for g in &e.gates {
            if g.in_kappa {
                prop_assert!(g.injected.is_none());
            }
        }
        // Independent κ: a formula whose complement truth table is present.
        for f in c.problems() {
            let ms: BTreeSet<usize> = models(f).into_iter().collect();
            let complement_present = c.problems().iter().any(|g| {
                g.k() == f.k() && (0..1usize << f.k()).all(|e| ms.contains(&e) != models(g).contains(&e))
            });
            prop_assert_eq!(kap.contains(&f.id), complement_present);
        }
    }

    #[test]
    fn budgeted_runs_stay_within_bound(c in arb_corpus(10, 6)) {
        let b = build_b(&c).unwrap();
        for (f, budget) in c.iter() {
            let run = solve_with_b(f, &b, budget).unwrap();
            prop_assert!(run.queries <= 1);
            prop_assert!((run.steps + run.queries) as u128 <= budget.allowance(f.k() as u64) + f.k() as u128 + 1);
            if run.verdict == Verdict::Accept && run.queries == 0 {
                prop_assert!(!models(f).is_empty());
            }
        }
    }

    #[test]
    fn big_pairs_round_trip(a in proptest::collection::vec(any::<u8>(), 0..40), b in proptest::collection::vec(any::<u8>(), 0..40)) {
        let (a, b) = (BigUint::from_bytes_be(&a), BigUint::from_bytes_be(&b));
        prop_assert_eq!(unpair(&pair(&a, &b)), (a, b));
    }

    #[test]
    fn set_sum_agrees(values in proptest::collection::vec(-1000i64..1000, 1..=14), delta in -2i64..=2) {
        let target = values.iter().sum::<i64>() + delta;
        let inst = SetSumInstance::new(1, values, target).unwrap();
        let (naive, work) = set_sum_naive(&inst).unwrap();
        prop_assert_eq!(naive, set_sum_direct(&inst));
        prop_assert_eq!(naive, delta == 0);
        prop_assert_eq!(work, 1u64 << inst.width());
    }
}
