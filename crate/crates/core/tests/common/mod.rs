#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use cqsj_core::qmodel::{AnswerTuple, Database, Query, Value, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Answers of `q` by backtracking over the atoms, one matching fact at a
/// time. Kept separate from the library's oracle so the two can be compared.
pub fn naive_answers(q: &Query, db: &Database) -> BTreeSet<AnswerTuple> {
    fn go(q: &Query, db: &Database, i: usize, env: &mut BTreeMap<Var, Value>, out: &mut BTreeSet<AnswerTuple>) {
        let Some(atom) = q.atoms().get(i) else {
            out.insert(AnswerTuple(q.free_vars().iter().map(|x| env[x].clone()).collect()));
            return;
        };
        let Some(rel) = db.relation(&atom.symbol) else { return };
        for t in &rel.tuples {
            if t.len() != atom.arity() {
                continue;
            }
            let mut bound = Vec::new();
            let mut ok = true;
            for (x, v) in atom.args.iter().zip(t) {
                match env.get(x) {
                    Some(w) => ok &= w == v,
                    None => {
                        env.insert(x.clone(), v.clone());
                        bound.push(x.clone());
                    }
                }
                if !ok {
                    break;
                }
            }
            if ok {
                go(q, db, i + 1, env, out);
            }
            for x in bound {
                env.remove(&x);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(q, db, 0, &mut BTreeMap::new(), &mut out);
    out
}

/// A random database over the schema of `q`: domain of 3 to 8 values and,
/// per relation, between 1 and 2.5 facts per value. Larger queries get
/// sparser relations since their answer counts grow exponentially with
/// the number of atoms: 0.5 to 1.5 facts per value beyond ten variables,
/// 0.5 to 1 beyond fifteen atoms.
pub fn random_db(q: &Query, seed: u64) -> Database {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=8usize);
    let big = q.vars().len() > 10;
    let huge = q.atoms().len() > 15;
    let mut db = Database::new();
    for (sym, arity) in q.schema() {
        db.declare(&sym, arity).unwrap();
        let m = match arity {
            1 => rng.gen_range(0..=n),
            _ if huge => rng.gen_range(n / 2..=n),
            _ if big => rng.gen_range(n / 2..=n * 3 / 2),
            _ => rng.gen_range(n..=n * 5 / 2),
        };
        for _ in 0..m {
            let t = (0..arity).map(|_| Value::atomic(format!("d{}", rng.gen_range(0..n)))).collect();
            db.insert(&sym, t).unwrap();
        }
    }
    db
}
