//! Linear-delay enumeration along an untangling sequence: enumerate the
//! image, and for every image answer restrict the database to the rewritten
//! schema and enumerate the untangled remainder on it.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::acyclic::AcyclicEnum;
use super::cursor::{EnumerationCursor, Enumerate};
use super::instance::{Instance, Rel};
use super::EngineError;
use crate::qmodel::{Database, Query, Var};
use crate::structure::{untangle_with_origins, Origin, UntanglingWitness};

pub(crate) enum Plan {
    Acyclic(Query),
    Untangle {
        image: Arc<Plan>,
        rest: Arc<Plan>,
        origins: Vec<Origin>,
        image_vars: Vec<Var>,
    },
}

impl Plan {
    pub fn from_witness(w: &UntanglingWitness) -> Arc<Plan> {
        let mut prev = Arc::new(Plan::Acyclic(w.base.clone()));
        for st in &w.steps {
            let (result, origins) = untangle_with_origins(&st.query, &st.image);
            let (image, rest) = if st.via_image {
                (prev, Arc::new(Plan::Acyclic(result)))
            } else {
                (Arc::new(Plan::Acyclic(st.image.clone())), prev)
            };
            prev = Arc::new(Plan::Untangle {
                image_vars: image.vars(),
                image,
                rest,
                origins,
            });
        }
        prev
    }

    pub fn vars(&self) -> Vec<Var> {
        match self {
            Plan::Acyclic(q) => q.vars(),
            Plan::Untangle { image, rest, .. } => {
                let mut v = image.vars();
                v.extend(rest.vars());
                v
            }
        }
    }

    pub fn build(self: &Arc<Self>, inst: Arc<Instance>, ticks: &mut u64) -> Result<Box<dyn Enumerate>, EngineError> {
        match &**self {
            Plan::Acyclic(q) => Ok(Box::new(AcyclicEnum::new(q, &inst, ticks)?)),
            Plan::Untangle { image, .. } => {
                let image_enum = image.build(Arc::clone(&inst), ticks)?;
                Ok(Box::new(UntangleEnum {
                    vars: self.vars(),
                    plan: Arc::clone(self),
                    inst,
                    image: image_enum,
                    current: None,
                }))
            }
        }
    }
}

struct UntangleEnum {
    vars: Vec<Var>,
    plan: Arc<Plan>,
    inst: Arc<Instance>,
    image: Box<dyn Enumerate>,
    current: Option<(Vec<u32>, Box<dyn Enumerate>)>,
}

/// The database over the untangled schema for one image answer.
fn restrict(
    inst: &Instance,
    origins: &[Origin],
    image_vars: &[Var],
    answer: &[u32],
    ticks: &mut u64,
) -> Instance {
    let mut rels: BTreeMap<String, Rel> = BTreeMap::new();
    for o in origins {
        if rels.contains_key(&o.atom.symbol) {
            continue;
        }
        let fixed: Vec<(usize, u32)> = o
            .fixed
            .iter()
            .map(|(p, v)| (*p, answer[image_vars.iter().position(|w| w == v).unwrap()]))
            .collect();
        let kept: Vec<usize> = (0..o.source_arity).filter(|p| !fixed.iter().any(|(q, _)| q == p)).collect();
        let mut rows = Vec::new();
        for r in inst.rows(&o.source_symbol) {
            *ticks += 1;
            if r.len() == o.source_arity && fixed.iter().all(|&(p, v)| r[p] == v) {
                rows.push(kept.iter().map(|&p| r[p]).collect());
            }
        }
        rels.insert(
            o.atom.symbol.clone(),
            Rel {
                arity: kept.len(),
                rows,
            },
        );
    }
    Instance::with_rels(Arc::clone(&inst.dict), rels)
}

impl Enumerate for UntangleEnum {
    fn vars(&self) -> &[Var] {
        &self.vars
    }

    fn next(&mut self, ticks: &mut u64) -> Result<Option<Vec<u32>>, EngineError> {
        let Plan::Untangle { rest, origins, image_vars, .. } = &*self.plan else {
            unreachable!("untangle enumerator built from an untangle plan")
        };
        loop {
            if let Some((a, r)) = &mut self.current {
                if let Some(b) = r.next(ticks)? {
                    let mut out = a.clone();
                    out.extend(b);
                    return Ok(Some(out));
                }
                self.current = None;
            }
            let Some(a) = self.image.next(ticks)? else {
                return Ok(None);
            };
            let sub = Arc::new(restrict(&self.inst, origins, image_vars, &a, ticks));
            let r = rest.build(sub, ticks)?;
            self.current = Some((a, r));
        }
    }
}

/// Enumerates a full query along a validated untangling witness.
pub fn enum_untangle(q: &Query, w: &UntanglingWitness, db: &Database) -> Result<EnumerationCursor, EngineError> {
    if !q.is_full() {
        return Err(EngineError::NotFull);
    }
    if !w.validate(q) {
        return Err(EngineError::InvalidWitness("untangling sequence does not end at the query".into()));
    }
    let mut ticks = 0;
    let inst = Arc::new(Instance::new(db, &mut ticks));
    let plan = Plan::from_witness(w);
    let e = plan.build(Arc::clone(&inst), &mut ticks)?;
    Ok(EnumerationCursor::new(e, Arc::clone(&inst.dict), q.free_vars(), ticks))
}
