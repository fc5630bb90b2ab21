use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::ReductionError;
use crate::qmodel::{AnswerTuple, Atom, Database, Query, Value, Var};
use crate::structure::VarMap;

/// One fresh symbol per atom occurrence of the original query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OccurrenceMap {
    /// `(fresh symbol, original atom)` in atom order.
    pub occurrences: Vec<(String, Atom)>,
}

impl OccurrenceMap {
    pub fn original(&self, fresh: &str) -> Option<&Atom> {
        self.occurrences.iter().find(|(s, _)| s == fresh).map(|(_, a)| a)
    }
}

/// Gives every atom its own relation symbol: `R(x,y), R(y,z)` becomes
/// `R1(x,y), R2(y,z)`.
pub fn relabel_self_join_free(q: &Query) -> (Query, OccurrenceMap) {
    let taken: BTreeSet<&str> = q.atoms().iter().map(|a| a.symbol.as_str()).collect();
    let mut used: BTreeSet<String> = BTreeSet::new();
    let mut count: BTreeMap<&str, usize> = BTreeMap::new();
    let mut occurrences = Vec::new();
    let mut atoms = Vec::new();
    for a in q.atoms() {
        let k = count.entry(a.symbol.as_str()).or_insert(0);
        *k += 1;
        let mut name = format!("{}{}", a.symbol, k);
        while taken.contains(name.as_str()) || used.contains(&name) {
            name.push('_');
        }
        used.insert(name.clone());
        atoms.push(Atom::new(name.clone(), a.args.iter().cloned()));
        occurrences.push((name, a.clone()));
    }
    let q2 = Query::new(atoms, q.free_vars().iter().cloned()).expect("relabeling keeps the head valid");
    (q2, OccurrenceMap { occurrences })
}

/// Copies each relation once per occurrence of its symbol.
pub fn duplicate_db(map: &OccurrenceMap, db: &Database) -> Database {
    let mut out = Database::new();
    for (fresh, atom) in &map.occurrences {
        out.declare(fresh, atom.arity()).unwrap();
        if let Some(r) = db.relation(&atom.symbol) {
            if r.arity != atom.arity() {
                continue;
            }
            for t in &r.tuples {
                out.insert(fresh, t.clone()).unwrap();
            }
        }
    }
    out
}

/// Builds `D` over the original schema: every fact `R_i(a1..al)` of the
/// occurrence `R(x1..xl)` becomes `R(<a1,x1>..<al,xl>)`.
pub fn encoding_trick(q: &Query, d_prime: &Database) -> Result<Database, ReductionError> {
    let (_, map) = relabel_self_join_free(q);
    let mut out = Database::new();
    for a in q.atoms() {
        out.declare(&a.symbol, a.arity())?;
    }
    for (sym, rel) in d_prime.relations() {
        let atom = map
            .original(sym)
            .ok_or_else(|| ReductionError::SchemaMismatch(format!("unknown relation {sym}")))?;
        if rel.arity != atom.arity() {
            return Err(ReductionError::SchemaMismatch(format!(
                "{sym} has arity {} but its atom {atom} has arity {}",
                rel.arity,
                atom.arity()
            )));
        }
        for t in &rel.tuples {
            let row = t
                .iter()
                .zip(&atom.args)
                .map(|(v, x)| match v {
                    Value::Atomic(s) => Ok(Value::pair(s.clone(), x.clone())),
                    Value::Pair { .. } => Err(ReductionError::NonAtomic(v.to_string())),
                })
                .collect::<Result<Vec<_>, _>>()?;
            out.insert(&atom.symbol, row)?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndoClass {
    Identity,
    Automorphism,
    NonAutomorphism,
}

/// An answer over pair values split into its data and variable parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodedAnswer {
    /// Data of each free variable, in head order.
    pub data_part: Vec<String>,
    /// The endomorphism read off the variable components of the valuation.
    pub variable_part: VarMap,
    /// Atoms of the image of `variable_part`.
    pub image: Query,
    pub class: EndoClass,
    valuation: BTreeMap<Var, String>,
}

impl DecodedAnswer {
    /// For identity and automorphism answers, the answer of the relabeled
    /// query it encodes (head order, data tokens).
    pub fn source_answer(&self, q: &Query) -> Option<Vec<String>> {
        if self.class == EndoClass::NonAutomorphism {
            return None;
        }
        let inv = self.variable_part.inverse()?;
        Some(q.free_vars().iter().map(|x| self.valuation[&inv.apply(x)].clone()).collect())
    }
}

/// Extends the head assignment to all variables using the facts of `db`,
/// trying valuations whose pairs carry their own variable first.
fn find_valuation(q: &Query, db: &Database, ans: &AnswerTuple) -> Option<BTreeMap<Var, Value>> {
    let mut assign: BTreeMap<Var, Value> = BTreeMap::new();
    for (x, v) in q.free_vars().iter().zip(ans.values()) {
        if assign.insert(x.clone(), v.clone()).is_some_and(|old| old != *v) {
            return None;
        }
    }
    fn go(q: &Query, db: &Database, i: usize, assign: &mut BTreeMap<Var, Value>, own_vars: bool) -> bool {
        let Some(a) = q.atoms().get(i) else {
            return true;
        };
        let Some(rel) = db.relation(&a.symbol) else {
            return false;
        };
        for t in &rel.tuples {
            if t.len() != a.arity() {
                continue;
            }
            let mut bound = Vec::new();
            let mut ok = true;
            for (x, v) in a.args.iter().zip(t) {
                match assign.get(x) {
                    Some(w) if w != v => ok = false,
                    Some(_) => {}
                    None => {
                        if own_vars && v.as_pair().map(|(_, y)| y) != Some(x) {
                            ok = false;
                        } else {
                            assign.insert(x.clone(), v.clone());
                            bound.push(x.clone());
                        }
                    }
                }
                if !ok {
                    break;
                }
            }
            if ok && go(q, db, i + 1, assign, own_vars) {
                return true;
            }
            for x in bound {
                assign.remove(&x);
            }
        }
        false
    }
    for own in [true, false] {
        let mut a = assign.clone();
        if go(q, db, 0, &mut a, own) {
            return Some(a);
        }
    }
    None
}

/// Splits an answer of `q` over an encoded database into its data part and
/// the endomorphism given by its variable part.
pub fn decode_solution(q: &Query, db: &Database, ans: &AnswerTuple) -> Result<DecodedAnswer, ReductionError> {
    if ans.len() != q.arity() {
        return Err(ReductionError::SchemaMismatch(format!(
            "answer has {} values, query head has {}",
            ans.len(),
            q.arity()
        )));
    }
    for v in ans.values() {
        if v.as_pair().is_none() {
            return Err(ReductionError::NonPair(v.to_string()));
        }
    }
    let val = find_valuation(q, db, ans).ok_or(ReductionError::NotAnAnswer)?;
    let mut nu = Vec::new();
    let mut valuation = BTreeMap::new();
    for (x, v) in &val {
        let (d, y) = v.as_pair().ok_or_else(|| ReductionError::NonPair(v.to_string()))?;
        nu.push((x.clone(), y.clone()));
        valuation.insert(x.clone(), d.to_string());
    }
    let nu = VarMap::from_pairs(nu);
    if !nu.is_endomorphism_of(q) {
        return Err(ReductionError::NotEndomorphism);
    }
    let class = if nu.is_identity() {
        EndoClass::Identity
    } else if nu.is_injective() {
        EndoClass::Automorphism
    } else {
        EndoClass::NonAutomorphism
    };
    Ok(DecodedAnswer {
        data_part: q.free_vars().iter().map(|x| valuation[x].clone()).collect(),
        image: q.subquery(nu.image_atoms(q)),
        variable_part: nu,
        class,
        valuation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::qmodel::{parse_database, parse_query};

    #[test]
    fn path_relabels_to_r1_r2() {
        let (q2, map) = relabel_self_join_free(&parse_query("Q(x,y,z) :- R(x,y), R(y,z).").unwrap());
        assert_eq!(q2, parse_query("Q(x,y,z) :- R1(x,y), R2(y,z).").unwrap());
        assert_eq!(map.occurrences.len(), 2);
    }

    #[test]
    fn fresh_names_avoid_existing_symbols() {
        let q = parse_query("Q(x,y) :- R(x,y), R1(y,x).").unwrap();
        let (q2, _) = relabel_self_join_free(&q);
        assert!(q2.is_self_join_free());
        assert_eq!(q2.atoms().len(), 2);
    }

    #[test]
    fn diamond_worked_example() {
        let q = fixtures::query(fixtures::DIAMOND);
        let dp = parse_database("R3(a,b). R1(b,c). R4(a,d). R2(d,c).").unwrap();
        let d = encoding_trick(&q, &dp).unwrap();
        assert_eq!(d.size(), 4);
        let ans = |s: [(&str, &str); 4]| AnswerTuple(s.iter().map(|(a, x)| Value::pair(*a, *x)).collect());
        let id = decode_solution(&q, &d, &ans([("a", "x"), ("b", "u"), ("c", "y"), ("d", "v")])).unwrap();
        assert_eq!(id.class, EndoClass::Identity);
        assert_eq!(id.data_part, ["a", "b", "c", "d"]);
        let path = decode_solution(&q, &d, &ans([("a", "x"), ("b", "u"), ("c", "y"), ("b", "u")])).unwrap();
        assert_eq!(path.class, EndoClass::NonAutomorphism);
        assert_eq!(path.data_part, ["a", "b", "c", "b"]);
    }

    #[test]
    fn swapped_answer_is_an_automorphism() {
        let q = fixtures::query(fixtures::DIAMOND);
        let dp = parse_database("R3(a,b). R1(b,c). R4(a,d). R2(d,c).").unwrap();
        let d = encoding_trick(&q, &dp).unwrap();
        let a = AnswerTuple(vec![
            Value::pair("a", "x"),
            Value::pair("d", "v"),
            Value::pair("c", "y"),
            Value::pair("b", "u"),
        ]);
        let dec = decode_solution(&q, &d, &a).unwrap();
        assert_eq!(dec.class, EndoClass::Automorphism);
        assert_eq!(dec.source_answer(&q).unwrap(), ["a", "b", "c", "d"]);
    }

    #[test]
    fn non_pair_and_schema_errors() {
        let q = fixtures::query(fixtures::PATH2F);
        let d = Database::new();
        let a = AnswerTuple(vec![Value::atomic("a"); 3]);
        assert!(matches!(decode_solution(&q, &d, &a), Err(ReductionError::NonPair(_))));
        let bad = parse_database("R7(a,b).").unwrap();
        assert!(matches!(encoding_trick(&q, &bad), Err(ReductionError::SchemaMismatch(_))));
        assert_eq!(encoding_trick(&q, &Database::new()).unwrap().size(), 0);
    }
}
