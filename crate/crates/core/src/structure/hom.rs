//! Backtracking homomorphism search between queries.
//!
//! The search maps atoms to atoms: every atom of the source is assigned a
//! target atom with the same symbol, which fixes its variables. Distinct
//! choice sequences produce distinct variable maps, so every homomorphism is
//! reported exactly once.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::ControlFlow;

use serde::{Serialize, Serializer};

use crate::qmodel::{Atom, Query, Var};

/// A variable-to-variable mapping, total on the variables of its source.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VarMap(BTreeMap<Var, Var>);

impl VarMap {
    pub fn identity(vars: impl IntoIterator<Item = Var>) -> Self {
        VarMap(vars.into_iter().map(|v| (v.clone(), v)).collect())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Var)>) -> Self {
        VarMap(pairs.into_iter().collect())
    }

    pub fn get(&self, v: &Var) -> Option<&Var> {
        self.0.get(v)
    }

    /// Image of `v`; unmapped variables are left unchanged.
    pub fn apply(&self, v: &Var) -> Var {
        self.0.get(v).cloned().unwrap_or_else(|| v.clone())
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom::new(a.symbol.clone(), a.args.iter().map(|v| self.apply(v)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Var)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.0.values().all(|v| seen.insert(v))
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|(k, v)| k == v)
    }

    /// `self` after `first`: v ↦ self(first(v)).
    pub fn after(&self, first: &VarMap) -> VarMap {
        VarMap(
            first
                .0
                .iter()
                .map(|(k, v)| (k.clone(), self.apply(v)))
                .collect(),
        )
    }

    pub fn inverse(&self) -> Option<VarMap> {
        if !self.is_injective() {
            return None;
        }
        Some(VarMap(
            self.0.iter().map(|(k, v)| (v.clone(), k.clone())).collect(),
        ))
    }

    /// The atoms `{R(h(z)) : R(z) ∈ q}`.
    pub fn image_atoms(&self, q: &Query) -> Vec<Atom> {
        let mut atoms: Vec<Atom> = q.atoms().iter().map(|a| self.apply_atom(a)).collect();
        atoms.sort();
        atoms.dedup();
        atoms
    }

    /// Whether every atom of `q` is mapped to an atom of `q`.
    pub fn is_endomorphism_of(&self, q: &Query) -> bool {
        let set: std::collections::BTreeSet<&Atom> = q.atoms().iter().collect();
        q.atoms().iter().all(|a| set.contains(&self.apply_atom(a)))
    }
}

impl fmt::Debug for VarMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}->{v}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for VarMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// A homomorphism search problem from `from` into `to`.
pub(crate) struct HomSearch<'a> {
    from_vars: Vec<Var>,
    to_vars: Vec<Var>,
    from_atoms: Vec<Vec<usize>>,
    to_atoms: Vec<Vec<usize>>,
    candidates: Vec<Vec<usize>>,
    order: Vec<usize>,
    domain: Vec<Vec<bool>>,
    injective: bool,
    _q: std::marker::PhantomData<&'a Query>,
}

impl<'a> HomSearch<'a> {
    pub fn new(from: &'a Query, to: &'a Query) -> Self {
        let from_vars = from.vars();
        let to_vars = to.vars();
        let fidx: HashMap<&Var, usize> = from_vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let tidx: HashMap<&Var, usize> = to_vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let from_atoms: Vec<Vec<usize>> = from
            .atoms()
            .iter()
            .map(|a| a.args.iter().map(|v| fidx[v]).collect())
            .collect();
        let to_atoms: Vec<Vec<usize>> = to
            .atoms()
            .iter()
            .map(|a| a.args.iter().map(|v| tidx[v]).collect())
            .collect();
        let candidates = from
            .atoms()
            .iter()
            .map(|a| {
                to.atoms()
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| b.symbol == a.symbol && b.arity() == a.arity())
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let domain = vec![vec![true; to_vars.len()]; from_vars.len()];
        let mut s = HomSearch {
            from_vars,
            to_vars,
            from_atoms,
            to_atoms,
            candidates,
            order: Vec::new(),
            domain,
            injective: false,
            _q: std::marker::PhantomData,
        };
        s.order = s.atom_order();
        s
    }

    fn atom_order(&self) -> Vec<usize> {
        let n = self.from_atoms.len();
        let mut bound = vec![false; self.from_vars.len()];
        let mut used = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for _ in 0..n {
            let best = (0..n)
                .filter(|&i| !used[i])
                .max_by_key(|&i| {
                    let b = self.from_atoms[i].iter().filter(|&&v| bound[v]).count();
                    let fresh = self.from_atoms[i].iter().filter(|&&v| !bound[v]).count();
                    (
                        b > 0 || fresh == 0,
                        b,
                        std::cmp::Reverse(self.candidates[i].len()),
                        std::cmp::Reverse(i),
                    )
                })
                .expect("unused atom remains");
            used[best] = true;
            for &v in &self.from_atoms[best] {
                bound[v] = true;
            }
            order.push(best);
        }
        order
    }

    /// Forces `from_var ↦ to_var`.
    pub fn fix(mut self, from_var: &Var, to_var: &Var) -> Self {
        if let (Some(f), Some(t)) = (
            self.from_vars.iter().position(|v| v == from_var),
            self.to_vars.iter().position(|v| v == to_var),
        ) {
            for (j, d) in self.domain[f].iter_mut().enumerate() {
                *d = j == t;
            }
        } else if let Some(f) = self.from_vars.iter().position(|v| v == from_var) {
            self.domain[f].iter_mut().for_each(|d| *d = false);
        }
        self
    }

    /// Excludes `to_var` from the range.
    pub fn forbid_target(mut self, to_var: &Var) -> Self {
        if let Some(t) = self.to_vars.iter().position(|v| v == to_var) {
            for d in &mut self.domain {
                d[t] = false;
            }
        }
        self
    }

    /// Restricts the target atoms to those whose index is flagged.
    pub fn restrict_targets(mut self, allowed: &[bool]) -> Self {
        for c in &mut self.candidates {
            c.retain(|&t| allowed[t]);
        }
        self.order = self.atom_order();
        self
    }

    pub fn injective(mut self) -> Self {
        self.injective = true;
        self
    }

    /// Runs the search; `visit` receives each homomorphism as a map.
    pub fn run(&self, mut visit: impl FnMut(&[usize]) -> ControlFlow<()>) {
        let mut assign = vec![usize::MAX; self.from_vars.len()];
        let mut used = vec![0usize; self.to_vars.len()];
        let _ = self.dfs(0, &mut assign, &mut used, &mut visit);
    }

    fn dfs(
        &self,
        depth: usize,
        assign: &mut Vec<usize>,
        used: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if depth == self.order.len() {
            return visit(assign);
        }
        let a = self.order[depth];
        let args = &self.from_atoms[a];
        let mut newly: Vec<usize> = Vec::with_capacity(args.len());
        for &t in &self.candidates[a] {
            let targ = &self.to_atoms[t];
            let mut ok = true;
            for (i, &fv) in args.iter().enumerate() {
                let tv = targ[i];
                if assign[fv] == usize::MAX {
                    if !self.domain[fv][tv] || (self.injective && used[tv] > 0) {
                        ok = false;
                        break;
                    }
                    assign[fv] = tv;
                    used[tv] += 1;
                    newly.push(fv);
                } else if assign[fv] != tv {
                    ok = false;
                    break;
                }
            }
            if ok {
                self.dfs(depth + 1, assign, used, visit)?;
            }
            for fv in newly.drain(..) {
                used[assign[fv]] -= 1;
                assign[fv] = usize::MAX;
            }
        }
        ControlFlow::Continue(())
    }

    pub fn to_varmap(&self, assign: &[usize]) -> VarMap {
        VarMap(
            self.from_vars
                .iter()
                .zip(assign)
                .map(|(f, &t)| (f.clone(), self.to_vars[t].clone()))
                .collect(),
        )
    }

    pub fn first(&self) -> Option<VarMap> {
        let mut out = None;
        self.run(|a| {
            out = Some(self.to_varmap(a));
            ControlFlow::Break(())
        });
        out
    }
}

/// Some homomorphism from `from` to `to` mapping free variables of `from`
/// position-wise onto the free variables of `to`.
pub fn homomorphism_fixing_free(from: &Query, to: &Query) -> Option<VarMap> {
    if from.free_vars().len() != to.free_vars().len() {
        return None;
    }
    let mut s = HomSearch::new(from, to);
    for (f, t) in from.free_vars().iter().zip(to.free_vars()) {
        s = s.fix(f, t);
    }
    s.first()
}

/// An isomorphism `from → to` (bijective on variables and atoms).
pub fn isomorphism(from: &Query, to: &Query) -> Option<VarMap> {
    if from.atoms().len() != to.atoms().len() || from.vars().len() != to.vars().len() {
        return None;
    }
    HomSearch::new(from, to).injective().first()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmodel::parse_query;

    #[test]
    fn path_into_edge() {
        let p = parse_query("Q() :- R(x,y), R(y,z).").unwrap();
        let loop_q = parse_query("Q() :- R(a,a).").unwrap();
        let h = HomSearch::new(&p, &loop_q).first().unwrap();
        assert_eq!(h.apply(&Var::new("y")), Var::new("a"));
        let edge = parse_query("Q() :- R(a,b).").unwrap();
        assert!(HomSearch::new(&p, &edge).first().is_none());
    }

    #[test]
    fn counts_each_homomorphism_once() {
        let edge = parse_query("Q() :- R(x,y).").unwrap();
        let two = parse_query("Q() :- R(a,b), R(b,c).").unwrap();
        let mut n = 0;
        let s = HomSearch::new(&edge, &two);
        s.run(|_| {
            n += 1;
            ControlFlow::Continue(())
        });
        assert_eq!(n, 2);
    }

    #[test]
    fn injective_search_finds_isomorphism() {
        let a = parse_query("Q() :- R(x,u), R(u,y).").unwrap();
        let b = parse_query("Q() :- R(x,v), R(v,y).").unwrap();
        let iso = isomorphism(&a, &b).unwrap();
        assert_eq!(iso.apply(&Var::new("u")), Var::new("v"));
    }

    #[test]
    fn varmap_composition() {
        let f = VarMap::from_pairs([(Var::new("a"), Var::new("b")), (Var::new("b"), Var::new("c"))]);
        let g = VarMap::from_pairs([(Var::new("b"), Var::new("a")), (Var::new("c"), Var::new("a"))]);
        let gf = g.after(&f);
        assert_eq!(gf.apply(&Var::new("a")), Var::new("a"));
        assert_eq!(gf.apply(&Var::new("b")), Var::new("a"));
        assert!(!gf.is_injective());
        assert!(f.inverse().is_some());
    }
}
