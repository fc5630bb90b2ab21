//! Canonical forms of queries up to variable renaming.
//!
//! Variables are first partitioned by colour refinement, then the remaining
//! ties are broken by individualisation. The canonical key is the least
//! serialisation reached over all leaves of that search tree, which makes it
//! invariant under renaming. In queries that are not full, free variables
//! are coloured by head position, so the key also fixes the head; full
//! queries are keyed by their atom set alone.

use std::collections::{BTreeMap, HashMap};

use crate::qmodel::{Query, Var};

struct Shape {
    n: usize,
    atoms: Vec<(String, Vec<usize>)>,
    occurrences: Vec<Vec<(usize, usize)>>,
}

impl Shape {
    fn new(q: &Query) -> (Self, Vec<Var>) {
        let vars = q.vars();
        let idx: HashMap<&Var, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let atoms: Vec<(String, Vec<usize>)> = q
            .atoms()
            .iter()
            .map(|a| (a.symbol.clone(), a.args.iter().map(|v| idx[v]).collect()))
            .collect();
        let mut occurrences = vec![Vec::new(); vars.len()];
        for (ai, (_, args)) in atoms.iter().enumerate() {
            for (p, &v) in args.iter().enumerate() {
                occurrences[v].push((ai, p));
            }
        }
        (
            Shape {
                n: vars.len(),
                atoms,
                occurrences,
            },
            vars,
        )
    }

    /// Refines `colors` to a stable partition. Colours are ranks, so the
    /// result depends only on the isomorphism type of the coloured query.
    fn refine(&self, colors: &mut Vec<usize>) {
        loop {
            let sigs: Vec<(usize, Vec<(String, usize, Vec<usize>)>)> = (0..self.n)
                .map(|v| {
                    let mut occ: Vec<(String, usize, Vec<usize>)> = self.occurrences[v]
                        .iter()
                        .map(|&(a, p)| {
                            let (sym, args) = &self.atoms[a];
                            (sym.clone(), p, args.iter().map(|&w| colors[w]).collect())
                        })
                        .collect();
                    occ.sort();
                    (colors[v], occ)
                })
                .collect();
            let mut distinct: Vec<&(usize, Vec<(String, usize, Vec<usize>)>)> = sigs.iter().collect();
            distinct.sort();
            distinct.dedup();
            let rank: BTreeMap<_, usize> = distinct.iter().enumerate().map(|(i, s)| (*s, i)).collect();
            let new: Vec<usize> = sigs.iter().map(|s| rank[s]).collect();
            let before = colors.iter().collect::<std::collections::BTreeSet<_>>().len();
            let after = distinct.len();
            *colors = new;
            if after == before {
                return;
            }
        }
    }

    fn serialize(&self, label: &[usize]) -> Vec<(String, Vec<usize>)> {
        let mut out: Vec<(String, Vec<usize>)> = self
            .atoms
            .iter()
            .map(|(s, args)| (s.clone(), args.iter().map(|&v| label[v]).collect()))
            .collect();
        out.sort();
        out
    }

    fn search(&self, colors: Vec<usize>, best: &mut Option<(Vec<(String, Vec<usize>)>, Vec<usize>)>) {
        let mut counts = vec![0usize; self.n];
        for &c in &colors {
            counts[c] += 1;
        }
        // first non-singleton cell, by colour rank
        let target = (0..self.n).find(|&c| counts[c] > 1);
        match target {
            None => {
                let ser = self.serialize(&colors);
                if best.as_ref().map_or(true, |(b, _)| ser < *b) {
                    *best = Some((ser, colors));
                }
            }
            Some(cell) => {
                for v in (0..self.n).filter(|&v| colors[v] == cell) {
                    let mut c2: Vec<usize> = colors.iter().map(|&c| c * 2 + 1).collect();
                    c2[v] = cell * 2;
                    self.refine(&mut c2);
                    self.search(c2, best);
                }
            }
        }
    }
}

/// Canonical key plus a labelling of the query's variables by positions
/// `0..n` realising it.
pub fn canonical_labelling(q: &Query) -> (String, BTreeMap<Var, usize>) {
    let (shape, vars) = Shape::new(q);
    let free_pos: HashMap<&Var, usize> = q.free_vars().iter().enumerate().map(|(i, v)| (v, i)).collect();
    let k = q.free_vars().len();
    // full queries are compared as atom sets, so head order is ignored
    let mut colors: Vec<usize> = vars
        .iter()
        .map(|v| if q.is_full() { 0 } else { free_pos.get(v).copied().unwrap_or(k) })
        .collect();
    // compress to ranks
    let mut distinct = colors.clone();
    distinct.sort();
    distinct.dedup();
    for c in &mut colors {
        *c = distinct.binary_search(c).unwrap();
    }
    shape.refine(&mut colors);
    let mut best = None;
    shape.search(colors, &mut best);
    let (ser, label) = best.unwrap_or_default();
    let mut key = if q.is_full() { "F|".to_string() } else { format!("{k}|") };
    for (s, args) in ser {
        key.push_str(&s);
        key.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                key.push(',');
            }
            key.push_str(&a.to_string());
        }
        key.push(')');
    }
    let labelling = vars.into_iter().zip(label).collect();
    (key, labelling)
}

pub fn canonical_key(q: &Query) -> String {
    canonical_labelling(q).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmodel::parse_query;

    #[test]
    fn renaming_invariant() {
        let a = parse_query("Q(x,u,y,v) :- R(x,u), R(u,y), R(x,v), R(v,y).").unwrap();
        let b = parse_query("Q(a,b,c,d) :- R(a,d), R(d,c), R(a,b), R(b,c).").unwrap();
        assert_eq!(canonical_key(&a.full_closure()), canonical_key(&b.full_closure()));
        assert_eq!(canonical_key(&a.boolean_closure()), canonical_key(&b.boolean_closure()));
    }

    #[test]
    fn distinguishes_orientation() {
        let a = parse_query("Q() :- R(x,u), R(u,y), R(x,v), R(v,y).").unwrap();
        let b = parse_query("Q() :- R(x,u), R(u,y), R(x,v), R(y,v).").unwrap();
        assert_ne!(canonical_key(&a), canonical_key(&b));
    }

    #[test]
    fn regular_structures() {
        // refinement alone cannot split a directed cycle
        let c6 = parse_query("Q() :- R(a,b), R(b,c), R(c,d), R(d,e), R(e,f), R(f,a).").unwrap();
        let c6b = parse_query("Q() :- R(f,e), R(e,d), R(d,c), R(c,b), R(b,a), R(a,f).").unwrap();
        assert_eq!(canonical_key(&c6), canonical_key(&c6b));
        let two3 = parse_query("Q() :- R(a,b), R(b,c), R(c,a), R(d,e), R(e,f), R(f,d).").unwrap();
        assert_ne!(canonical_key(&c6), canonical_key(&two3));
    }

    #[test]
    fn free_variables_matter() {
        let a = parse_query("Q(x) :- R(x,y).").unwrap();
        let b = parse_query("Q(y) :- R(x,y).").unwrap();
        assert_ne!(canonical_key(&a), canonical_key(&b));
    }
}
