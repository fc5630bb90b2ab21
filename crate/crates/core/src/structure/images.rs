use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use serde::Serialize;

use super::acyclic::is_acyclic;
use super::core::{core, retraction_onto};
use super::hom::{HomSearch, VarMap};
use super::{check_size, StructureError};
use crate::qmodel::{Atom, Query, Var};

/// The subquery induced by the atom range of an endomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Image {
    pub query: Query,
    /// Indices into the parent's atom list.
    pub atom_indices: Vec<usize>,
    /// One endomorphism whose atom range is exactly this image.
    pub witness: VarMap,
    /// An endomorphism onto the image that fixes its variables, if any.
    pub retraction: Option<VarMap>,
}

impl Image {
    pub fn is_trivial(&self, parent: &Query) -> bool {
        self.atom_indices.len() == parent.atoms().len()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.query.vars().into_iter().collect()
    }

    /// An endomorphism onto the image, preferring one that fixes it.
    pub fn endomorphism(&self) -> &VarMap {
        self.retraction.as_ref().unwrap_or(&self.witness)
    }
}

/// All images of a full query, deduplicated by atom set, smallest first.
pub fn images(q: &Query) -> Result<Vec<Image>, StructureError> {
    check_size(q)?;
    let atom_index: BTreeMap<&Atom, usize> = q.atoms().iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut found: BTreeMap<Vec<usize>, VarMap> = BTreeMap::new();
    let s = HomSearch::new(q, q);
    s.run(|assign| {
        let h = s.to_varmap(assign);
        let mut range: Vec<usize> = q
            .atoms()
            .iter()
            .map(|a| atom_index[&h.apply_atom(a)])
            .collect();
        range.sort_unstable();
        range.dedup();
        found.entry(range).or_insert(h);
        ControlFlow::Continue(())
    });
    let mut out: Vec<Image> = found
        .into_iter()
        .map(|(idx, witness)| {
            let query = Query::full(idx.iter().map(|&i| q.atoms()[i].clone()));
            let retraction = retraction_onto(q, &query);
            Image {
                query,
                atom_indices: idx,
                witness,
                retraction,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        (a.atom_indices.len(), &a.atom_indices).cmp(&(b.atom_indices.len(), &b.atom_indices))
    });
    Ok(out)
}

/// Whether any two images are comparable under inclusion.
pub fn has_nested_images(imgs: &[Image]) -> bool {
    let sets: Vec<BTreeSet<usize>> = imgs.iter().map(|i| i.atom_indices.iter().copied().collect()).collect();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if !sets[i].is_subset(&sets[j]) && !sets[j].is_subset(&sets[i]) {
                return false;
            }
        }
    }
    true
}

/// Where an atom of an untangled query comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Origin {
    /// Atom of the untangled query.
    pub atom: Atom,
    /// Symbol of the source atom in the original query.
    pub source_symbol: String,
    pub source_arity: usize,
    /// Positions bound to image variables, with those variables.
    pub fixed: Vec<(usize, Var)>,
}

/// Name of the rewritten symbol for positions `s`.
fn fresh_name(symbol: &str, positions: &[usize], arity: usize) -> String {
    let sep = if arity > 10 { "_" } else { "" };
    let pos: Vec<String> = positions.iter().map(|p| p.to_string()).collect();
    format!("{symbol}__{}", pos.join(sep))
}

/// The untangling step with the provenance of every rewritten atom.
///
/// Atoms outside the image lose the positions holding image variables. The
/// fresh symbol depends on the source symbol, the dropped positions and the
/// image variables sitting there: `R__0` for the first such variable tuple
/// and `R__0_k` for the k-th further one. Atoms touching no image variable
/// keep their symbol.
pub fn untangle_with_origins(q: &Query, image: &Query) -> (Query, Vec<Origin>) {
    let shared: BTreeSet<Var> = image.vars().into_iter().collect();
    let in_image: BTreeSet<&Atom> = image.atoms().iter().collect();
    let rest: Vec<&Atom> = q.atoms().iter().filter(|a| !in_image.contains(a)).collect();

    // distinct fixed-variable tuples per (symbol, positions), in sorted order
    let mut tuples: BTreeMap<(String, Vec<usize>), BTreeSet<Vec<Var>>> = BTreeMap::new();
    for a in &rest {
        let pos: Vec<usize> = (0..a.arity()).filter(|&i| shared.contains(&a.args[i])).collect();
        if pos.is_empty() {
            continue;
        }
        let vals = pos.iter().map(|&i| a.args[i].clone()).collect();
        tuples.entry((a.symbol.clone(), pos)).or_default().insert(vals);
    }

    let mut origins = Vec::new();
    for a in rest {
        let pos: Vec<usize> = (0..a.arity()).filter(|&i| shared.contains(&a.args[i])).collect();
        let kept = (0..a.arity()).filter(|i| !pos.contains(i)).map(|i| a.args[i].clone());
        let symbol = if pos.is_empty() {
            a.symbol.clone()
        } else {
            let vals: Vec<Var> = pos.iter().map(|&i| a.args[i].clone()).collect();
            let key = (a.symbol.clone(), pos.clone());
            let k = tuples[&key].iter().position(|t| *t == vals).unwrap();
            let base = fresh_name(&a.symbol, &pos, a.arity());
            if k == 0 {
                base
            } else {
                format!("{base}_{k}")
            }
        };
        origins.push(Origin {
            atom: Atom::new(symbol, kept),
            source_symbol: a.symbol.clone(),
            source_arity: a.arity(),
            fixed: pos.iter().map(|&i| (i, a.args[i].clone())).collect(),
        });
    }
    let result = Query::full(origins.iter().map(|o| o.atom.clone()));
    origins.sort_by(|a, b| a.atom.cmp(&b.atom));
    origins.dedup();
    (result, origins)
}

pub fn untangling_step(q: &Query, image: &Query) -> Query {
    untangle_with_origins(q, image).0
}

/// One step of an untangling sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UntangleStep {
    pub query: Query,
    pub image: Query,
    pub result: Query,
    /// `true` when the image is the previous query of the sequence and the
    /// result is acyclic; `false` when the image is acyclic and the result
    /// is the previous query.
    pub via_image: bool,
}

/// A sequence `q0, ..., ql = q` with `q0` acyclic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UntanglingWitness {
    pub base: Query,
    pub steps: Vec<UntangleStep>,
}

impl UntanglingWitness {
    pub fn target(&self) -> &Query {
        self.steps.last().map_or(&self.base, |s| &s.query)
    }

    /// Re-checks every step from scratch.
    pub fn validate(&self, q: &Query) -> bool {
        if self.target() != &q.full_closure() || !is_acyclic(&self.base) {
            return false;
        }
        let mut prev = &self.base;
        for st in &self.steps {
            let Ok(imgs) = images(&st.query) else { return false };
            if !imgs.iter().any(|i| i.query == st.image && !i.is_trivial(&st.query)) {
                return false;
            }
            if untangling_step(&st.query, &st.image) != st.result {
                return false;
            }
            let ok = if st.via_image {
                &st.image == prev && is_acyclic(&st.result)
            } else {
                is_acyclic(&st.image) && &st.result == prev
            };
            if !ok {
                return false;
            }
            prev = &st.query;
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "witness", rename_all = "lowercase")]
pub enum Untangleability {
    Yes(UntanglingWitness),
    No,
    Unknown,
}

pub const DEFAULT_UNTANGLE_BUDGET: usize = 20_000;

struct Untangler {
    budget: usize,
    spent: usize,
    failed: BTreeSet<String>,
}

enum Found {
    Yes(UntanglingWitness),
    No,
    OutOfBudget,
}

impl Untangler {
    fn visit(&mut self, q: &Query) -> Found {
        if is_acyclic(q) {
            return Found::Yes(UntanglingWitness {
                base: q.clone(),
                steps: Vec::new(),
            });
        }
        let key = super::canon::canonical_key(q);
        if self.failed.contains(&key) {
            return Found::No;
        }
        self.spent += 1;
        if self.spent > self.budget {
            return Found::OutOfBudget;
        }
        let Ok(mut imgs) = images(q) else { return Found::OutOfBudget };
        // retracts first: they keep the linear-delay accounting tight
        imgs.sort_by_key(|i| (i.retraction.is_none(), std::cmp::Reverse(i.atom_indices.len())));
        let mut exhausted = true;
        for img in imgs.iter().filter(|i| !i.is_trivial(q)) {
            let result = untangling_step(q, &img.query);
            if is_acyclic(&result) {
                match self.visit(&img.query) {
                    Found::Yes(mut w) => {
                        w.steps.push(UntangleStep {
                            query: q.clone(),
                            image: img.query.clone(),
                            result,
                            via_image: true,
                        });
                        return Found::Yes(w);
                    }
                    Found::OutOfBudget => exhausted = false,
                    Found::No => {}
                }
            }
            if is_acyclic(&img.query) {
                match self.visit(&result) {
                    Found::Yes(mut w) => {
                        w.steps.push(UntangleStep {
                            query: q.clone(),
                            image: img.query.clone(),
                            result: result.clone(),
                            via_image: false,
                        });
                        return Found::Yes(w);
                    }
                    Found::OutOfBudget => exhausted = false,
                    Found::No => {}
                }
            }
        }
        if exhausted {
            self.failed.insert(key);
            Found::No
        } else {
            Found::OutOfBudget
        }
    }
}

/// Searches for an untangling sequence. Every non-trivial image and every
/// untangling result is strictly smaller than the query, so the search
/// terminates; `budget` bounds the number of cyclic queries examined.
pub fn is_untangleable(q: &Query, budget: usize) -> Untangleability {
    let mut u = Untangler {
        budget,
        spent: 0,
        failed: BTreeSet::new(),
    };
    match u.visit(&q.full_closure()) {
        Found::Yes(w) => Untangleability::Yes(w),
        Found::No => Untangleability::No,
        Found::OutOfBudget => Untangleability::Unknown,
    }
}

/// An acyclic image and an isomorphism from the remaining atoms onto it that
/// is the identity on shared variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MirrorWitness {
    pub image: Query,
    pub rest: Query,
    pub iso: VarMap,
}

impl MirrorWitness {
    /// Variables shared by the image and the remaining atoms.
    pub fn shared(&self) -> Vec<Var> {
        let r: BTreeSet<Var> = self.rest.vars().into_iter().collect();
        self.image.vars().into_iter().filter(|v| r.contains(v)).collect()
    }

    pub fn validate(&self, q: &Query) -> bool {
        let mut all: Vec<Atom> = self.image.atoms().to_vec();
        all.extend(self.rest.atoms().iter().cloned());
        all.sort();
        all.dedup();
        if all != q.atoms() || self.rest.atoms().iter().any(|a| self.image.atoms().contains(a)) {
            return false;
        }
        if !is_acyclic(&self.image) || !self.iso.is_injective() {
            return false;
        }
        if self.shared().iter().any(|v| self.iso.apply(v) != *v) {
            return false;
        }
        let mapped: BTreeSet<Atom> = self.rest.atoms().iter().map(|a| self.iso.apply_atom(a)).collect();
        mapped == self.image.atoms().iter().cloned().collect()
    }
}

pub fn is_mirror(q: &Query) -> Result<Option<MirrorWitness>, StructureError> {
    let q = q.full_closure();
    for img in images(&q)? {
        if img.is_trivial(&q) || !is_acyclic(&img.query) {
            continue;
        }
        let rest = Query::full(q.atoms().iter().filter(|a| !img.query.atoms().contains(a)).cloned());
        if rest.atoms().len() != img.query.atoms().len() || rest.vars().len() != img.query.vars().len() {
            continue;
        }
        let ivars: BTreeSet<Var> = img.query.vars().into_iter().collect();
        let mut s = HomSearch::new(&rest, &img.query).injective();
        for v in rest.vars().iter().filter(|v| ivars.contains(v)) {
            s = s.fix(v, v);
        }
        if let Some(iso) = s.first() {
            let w = MirrorWitness {
                image: img.query.clone(),
                rest,
                iso,
            };
            if w.validate(&q) {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// An image `I` with `q' = untangling_step(q, I)` such that every image of
/// `q` holds none or all of the variables of `q'`, and `q'` has a cyclic
/// core.
pub fn hardness_transfer(q: &Query) -> Result<Option<(Image, Query)>, StructureError> {
    let q = q.full_closure();
    let imgs = images(&q)?;
    for img in imgs.iter().filter(|i| !i.is_trivial(&q)) {
        let result = untangling_step(&q, &img.query);
        if result.atoms().is_empty() || is_acyclic(&core(&result)) {
            continue;
        }
        let rvars: BTreeSet<Var> = result.vars().into_iter().collect();
        let separated = imgs.iter().all(|j| {
            let jv = j.vars();
            let common = rvars.intersection(&jv).count();
            common == 0 || common == rvars.len()
        });
        if separated {
            return Ok(Some((img.clone(), result)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmodel::parse_query;

    fn q(s: &str) -> Query {
        parse_query(s).unwrap()
    }

    #[test]
    fn diamond_images() {
        let d = q("Q(x,u,y,v) :- R(x,u), R(u,y), R(x,v), R(v,y).");
        let imgs = images(&d).unwrap();
        assert_eq!(imgs.len(), 3);
        assert_eq!(imgs[0].query.atoms().len(), 2);
        assert_eq!(imgs[1].query.atoms().len(), 2);
        assert!(imgs[2].is_trivial(&d));
    }

    #[test]
    fn single_atom_one_image() {
        assert_eq!(images(&q("Q(x,y) :- R(x,y).")).unwrap().len(), 1);
    }

    #[test]
    fn untangle_whole_query_is_empty() {
        let d = q("Q(x,y) :- R(x,y), R(y,x).");
        assert!(untangling_step(&d, &d).atoms().is_empty());
    }

    #[test]
    fn fresh_symbols_split_by_fixed_variable() {
        let p = q("Q(a,b,c,x,y) :- R(a,b), R(b,c), R(a,x), R(c,y).");
        let i = q("Q(a,b,c) :- R(a,b), R(b,c).");
        let (r, origins) = untangle_with_origins(&p, &i);
        let syms: BTreeSet<&str> = r.atoms().iter().map(|a| a.symbol.as_str()).collect();
        assert_eq!(syms, BTreeSet::from(["R__0", "R__0_1"]));
        assert_eq!(origins.len(), 2);
    }

    #[test]
    fn diamond_is_mirror() {
        let d = q("Q(x,u,y,v) :- R(x,u), R(u,y), R(x,v), R(v,y).");
        let w = is_mirror(&d).unwrap().unwrap();
        assert!(w.validate(&d));
        assert_eq!(w.shared(), vec![Var::new("x"), Var::new("y")]);
    }

    #[test]
    fn fig1_is_untangleable_not_mirror() {
        let f = q("Q(x,y,z,u) :- R(x,y), R(y,z), R(x,u), R(u,z), P(y).");
        assert!(is_mirror(&f).unwrap().is_none());
        match is_untangleable(&f, DEFAULT_UNTANGLE_BUDGET) {
            Untangleability::Yes(w) => assert!(w.validate(&f)),
            other => panic!("expected untangleable, got {other:?}"),
        }
    }
}
