mod common;

use std::collections::BTreeSet;

use cqsj_core::engines::{
    cheater_dedup, collect_answers, enum_full_acyclic, open_engine, oracle_enumerate, EngineChoice,
    EnumerationCursor,
};
use cqsj_core::qmodel::{parse_database, parse_query, serialize_database, serialize_query, AnswerTuple, Atom, Query, Value, Var};
use cqsj_core::structure::{
    canonical_key, core, full_core, homomorphism_fixing_free, is_acyclic, is_minimal, isomorphism, minimal_form,
};
use proptest::prelude::*;

use common::{naive_answers, random_db};

const SYMBOLS: [(&str, usize); 4] = [("R", 2), ("R", 2), ("S", 3), ("P", 1)];

/// Queries over `R/2`, `S/3`, `P/1` with up to 6 atoms and 6 variables.
fn query() -> impl Strategy<Value = Query> {
    let atom = (0..SYMBOLS.len(), prop::collection::vec(0..6usize, 3));
    (prop::collection::vec(atom, 1..=6), prop::collection::vec(any::<bool>(), 6)).prop_map(|(atoms, keep)| {
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|(k, vs)| {
                let (sym, arity) = SYMBOLS[k];
                Atom::new(sym, vs[..arity].iter().map(|i| Var::new(format!("v{i}"))))
            })
            .collect();
        let body: BTreeSet<Var> = atoms.iter().flat_map(|a| a.args.clone()).collect();
        let head: Vec<Var> = body.into_iter().filter(|v| keep[v.as_str()[1..].parse::<usize>().unwrap()]).collect();
        Query::new(atoms, head).unwrap()
    })
}

fn full_query() -> impl Strategy<Value = Query> {
    query().prop_map(|q| Query::full(q.atoms().to_vec()))
}

fn answer_set(cur: EnumerationCursor) -> (usize, BTreeSet<AnswerTuple>) {
    let all = collect_answers(cur).unwrap();
    let n = all.len();
    (n, all.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn oracle_matches_backtracking(q in query(), seed in any::<u64>()) {
        let db = random_db(&q, seed);
        prop_assert_eq!(oracle_enumerate(&q, &db), naive_answers(&q, &db));
    }

    #[test]
    fn acyclic_engine_is_exact(q in full_query(), seed in any::<u64>()) {
        prop_assume!(is_acyclic(&q));
        let db = random_db(&q, seed);
        let (n, got) = answer_set(enum_full_acyclic(&q, &db).unwrap());
        prop_assert_eq!(n, got.len());
        prop_assert_eq!(got, naive_answers(&q, &db));
    }

    #[test]
    fn auto_engine_is_exact(q in full_query(), seed in any::<u64>()) {
        let db = random_db(&q, seed);
        let (n, got) = answer_set(open_engine(&q, &db, EngineChoice::Auto, true).unwrap().cursor);
        prop_assert_eq!(n, got.len());
        prop_assert_eq!(got, naive_answers(&q, &db));
    }

    #[test]
    fn canonical_key_ignores_names_and_order(q in query(), shift in 1..50usize, rot in 0..6usize) {
        let renamed = q.rename(|v| Var::new(format!("w{}", v.as_str()[1..].parse::<usize>().unwrap() + shift)));
        let mut atoms = renamed.atoms().to_vec();
        let r = rot % atoms.len();
        atoms.rotate_left(r);
        let shuffled = Query::new(atoms, renamed.free_vars().to_vec()).unwrap();
        prop_assert_eq!(canonical_key(&q), canonical_key(&shuffled));
        prop_assert!(isomorphism(&q, &shuffled).is_some());
    }

    #[test]
    fn minimal_form_is_equivalent_and_minimal(q in query()) {
        let m = minimal_form(&q);
        prop_assert!(is_minimal(&m));
        prop_assert!(m.atoms().len() <= q.atoms().len());
        prop_assert!(homomorphism_fixing_free(&q, &m).is_some());
        prop_assert!(homomorphism_fixing_free(&m, &q).is_some());
        prop_assert_eq!(canonical_key(&minimal_form(&m)), canonical_key(&m));
    }

    #[test]
    fn minimal_form_and_core_preserve_answers(q in query(), seed in any::<u64>()) {
        let db = random_db(&q, seed);
        let want = naive_answers(&q, &db);
        prop_assert_eq!(naive_answers(&minimal_form(&q), &db), want.clone());
        let boolean = naive_answers(&core(&q), &db);
        prop_assert_eq!(boolean.is_empty(), want.is_empty());
        let b = q.boolean_closure();
        prop_assert!(homomorphism_fixing_free(&b, &core(&q)).is_some());
        prop_assert!(homomorphism_fixing_free(&core(&q), &b).is_some());
        let (c, fc) = (core(&q), full_core(&q));
        prop_assert_eq!(fc.atoms(), c.atoms());
    }

    #[test]
    fn dedup_keeps_each_answer_once(counts in prop::collection::vec(1..=4usize, 0..40), gap in 1..10u64) {
        let c = counts.iter().copied().max().unwrap_or(1);
        let stream: Vec<AnswerTuple> = counts
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(AnswerTuple(vec![Value::atomic(format!("a{i}"))]), k))
            .collect();
        let (n, got) = answer_set(cheater_dedup(EnumerationCursor::from_answers(stream.clone(), gap), c));
        prop_assert_eq!(n, counts.len());
        prop_assert_eq!(got, stream.into_iter().collect::<BTreeSet<_>>());
    }

    #[test]
    fn text_round_trips(q in query(), seed in any::<u64>()) {
        let back = parse_query(&serialize_query(&q)).unwrap();
        prop_assert_eq!(back.atoms(), q.atoms());
        prop_assert_eq!(back.free_vars(), q.free_vars());
        let db = random_db(&q, seed);
        let db2 = parse_database(&serialize_database(&db)).unwrap();
        prop_assert_eq!(db2.size(), db.size());
        prop_assert_eq!(naive_answers(&q, &db2), naive_answers(&q, &db));
    }
}
