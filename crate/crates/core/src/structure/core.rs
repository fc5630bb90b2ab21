use std::ops::ControlFlow;

use super::hom::{HomSearch, VarMap};
use super::{check_size, StructureError};
use crate::qmodel::Query;

/// All endomorphisms of `q`; with `fix_free` only those fixing the free
/// variables. The identity is always included.
pub fn endomorphisms(q: &Query, fix_free: bool) -> Result<Vec<VarMap>, StructureError> {
    check_size(q)?;
    let mut s = HomSearch::new(q, q);
    if fix_free {
        for v in q.free_vars() {
            s = s.fix(v, v);
        }
    }
    let mut out = Vec::new();
    s.run(|a| {
        out.push(s.to_varmap(a));
        ControlFlow::Continue(())
    });
    out.sort();
    Ok(out)
}

/// An endomorphism fixing the free variables whose range misses some
/// variable, if one exists.
fn shrinking_endomorphism(q: &Query) -> Option<VarMap> {
    for v in q.quantified_vars() {
        let mut s = HomSearch::new(q, q).forbid_target(&v);
        for f in q.free_vars() {
            s = s.fix(f, f);
        }
        if let Some(h) = s.first() {
            return Some(h);
        }
    }
    None
}

/// Every endomorphism fixing the free variables is injective.
pub fn is_minimal(q: &Query) -> bool {
    shrinking_endomorphism(q).is_none()
}

/// Repeatedly replaces `q` by the range of a shrinking endomorphism until
/// none exists.
pub fn minimal_form(q: &Query) -> Query {
    let mut cur = q.clone();
    while let Some(h) = shrinking_endomorphism(&cur) {
        cur = cur.subquery(h.image_atoms(&cur));
    }
    cur
}

/// Minimal form of the Boolean closure.
pub fn core(q: &Query) -> Query {
    minimal_form(&q.boolean_closure())
}

/// The core with every variable free.
pub fn full_core(q: &Query) -> Query {
    core(q).full_closure()
}

/// A homomorphism from `q` onto its core's atoms, identity on the core.
pub fn retraction_onto(q: &Query, sub: &Query) -> Option<VarMap> {
    let allowed: Vec<bool> = q.atoms().iter().map(|a| sub.atoms().contains(a)).collect();
    let mut s = HomSearch::new(q, q).restrict_targets(&allowed);
    for v in sub.vars() {
        s = s.fix(&v, &v);
    }
    s.first()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmodel::{parse_query, Var};
    use crate::structure::acyclic::is_acyclic;

    fn q(s: &str) -> Query {
        parse_query(s).unwrap()
    }

    #[test]
    fn diamond_automorphisms() {
        let d = q("Q(x,u,y,v) :- R(x,u), R(u,y), R(x,v), R(v,y).");
        let endos = endomorphisms(&d, false).unwrap();
        let bij: Vec<_> = endos.iter().filter(|h| h.is_injective()).collect();
        assert_eq!(bij.len(), 2);
        assert!(bij.iter().any(|h| h.apply(&Var::new("u")) == Var::new("v")));
        assert_eq!(endos.len(), 4);
    }

    #[test]
    fn single_atom_only_identity() {
        let e = endomorphisms(&q("Q(x,y) :- R(x,y)."), false).unwrap();
        assert_eq!(e.len(), 1);
        assert!(e[0].is_identity());
    }

    #[test]
    fn fig1_core_is_red_path() {
        let fig1 = q("Q(x,y,z,u) :- R(x,y), R(y,z), R(x,u), R(u,z), P(y).");
        assert!(!is_minimal(&fig1.boolean_closure()));
        assert!(is_minimal(&fig1));
        let c = full_core(&fig1);
        assert_eq!(c.atoms().len(), 3);
        assert!(is_acyclic(&c));
        assert!(c.atoms().iter().any(|a| a.symbol == "P"));
    }

    #[test]
    fn rev_is_its_own_core() {
        let rev = q("Q(x,u,y,v) :- R(x,u), R(u,y), R(x,v), R(y,v).");
        let c = full_core(&rev);
        assert_eq!(c.atoms(), rev.atoms());
        assert!(!is_acyclic(&c));
    }

    #[test]
    fn minimal_form_is_idempotent() {
        let p = q("Q(x) :- R(x,y), R(x,z), R(z,w).");
        let m = minimal_form(&p);
        assert!(is_minimal(&m));
        assert_eq!(minimal_form(&m), m);
        assert_eq!(m.atoms().len(), 2);
    }

    #[test]
    fn retraction_fixes_core() {
        let fig1 = q("Q(x,y,z,u) :- R(x,y), R(y,z), R(x,u), R(u,z), P(y).");
        let c = full_core(&fig1);
        let r = retraction_onto(&fig1, &c).unwrap();
        for v in c.vars() {
            assert_eq!(r.apply(&v), v);
        }
        assert!(r.is_endomorphism_of(&fig1));
    }
}
