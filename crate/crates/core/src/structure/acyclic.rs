use std::collections::BTreeSet;

use serde::Serialize;

use crate::qmodel::{Atom, Query, Var};

/// A join tree over the atoms of a query. `parent[i]` is the parent of
/// `atoms[i]`; the root has no parent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JoinTree {
    pub atoms: Vec<Atom>,
    pub parent: Vec<Option<usize>>,
    pub root: Option<usize>,
    /// Ear removal order; the root comes last.
    pub elimination: Vec<usize>,
}

impl JoinTree {
    pub fn children(&self, node: usize) -> Vec<usize> {
        (0..self.atoms.len())
            .filter(|&i| self.parent[i] == Some(node))
            .collect()
    }

    /// Nodes in an order where every parent precedes its children.
    pub fn top_down(&self) -> Vec<usize> {
        self.elimination.iter().rev().copied().collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (p, i)))
            .collect()
    }

    /// Checks that the parent links form a single tree and that, for every
    /// variable, the atoms holding it induce a connected subtree.
    pub fn is_valid(&self) -> bool {
        let n = self.atoms.len();
        if n == 0 {
            return self.root.is_none();
        }
        let Some(root) = self.root else { return false };
        if self.parent[root].is_some() {
            return false;
        }
        for start in 0..n {
            let mut cur = start;
            let mut steps = 0;
            while let Some(p) = self.parent[cur] {
                cur = p;
                steps += 1;
                if steps > n {
                    return false;
                }
            }
            if cur != root {
                return false;
            }
        }
        let vars: BTreeSet<&Var> = self.atoms.iter().flat_map(|a| a.args.iter()).collect();
        for v in vars {
            let holders: Vec<usize> = (0..n).filter(|&i| self.atoms[i].args.contains(v)).collect();
            // a connected set of k tree nodes has exactly one node whose
            // parent lies outside the set
            let tops = holders
                .iter()
                .filter(|&&i| match self.parent[i] {
                    Some(p) => !self.atoms[p].args.contains(v),
                    None => true,
                })
                .count();
            if tops != 1 {
                return false;
            }
        }
        true
    }
}

/// GYO ear removal. Among removable ears the least atom is removed first and
/// attached to the least atom covering its shared variables.
pub fn gyo_acyclic(q: &Query) -> Option<JoinTree> {
    let atoms: Vec<Atom> = q.atoms().to_vec();
    let n = atoms.len();
    let sets: Vec<BTreeSet<&Var>> = atoms.iter().map(|a| a.args.iter().collect()).collect();
    let mut alive = vec![true; n];
    let mut parent = vec![None; n];
    let mut elimination = Vec::with_capacity(n);
    let mut remaining = n;
    while remaining > 1 {
        let mut removed = false;
        for e in 0..n {
            if !alive[e] {
                continue;
            }
            let shared: Vec<&Var> = sets[e]
                .iter()
                .copied()
                .filter(|v| (0..n).any(|f| f != e && alive[f] && sets[f].contains(v)))
                .collect();
            let witness = (0..n)
                .find(|&f| f != e && alive[f] && shared.iter().all(|v| sets[f].contains(v)));
            if let Some(f) = witness {
                parent[e] = Some(f);
                alive[e] = false;
                elimination.push(e);
                remaining -= 1;
                removed = true;
                break;
            }
        }
        if !removed {
            return None;
        }
    }
    let root = (0..n).find(|&i| alive[i]);
    if let Some(r) = root {
        elimination.push(r);
    }
    Some(JoinTree {
        atoms,
        parent,
        root,
        elimination,
    })
}

pub fn is_acyclic(q: &Query) -> bool {
    gyo_acyclic(q).is_some()
}

pub(crate) const HEAD_SYMBOL: &str = "__head";

/// Free-connexity: the query stays acyclic after adding an atom over its
/// free variables. Cyclic queries are never free-connex.
pub fn is_free_connex(q: &Query) -> bool {
    if !is_acyclic(q) {
        return false;
    }
    let mut atoms = q.atoms().to_vec();
    atoms.push(Atom::new(HEAD_SYMBOL, q.free_vars().iter().cloned()));
    is_acyclic(&Query::full(atoms))
}
