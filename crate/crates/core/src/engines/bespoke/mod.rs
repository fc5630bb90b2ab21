//! Hand-made strategies for registered queries that the generic criteria do
//! not cover. Each strategy runs on the registered fixture's variables and
//! is mapped onto the caller's query through an isomorphism.

mod loops;
mod spikes;

use std::collections::{HashSet, VecDeque};
use std::ops::ControlFlow;
use std::sync::Arc;

use super::cursor::{cheater_dedup, EnumerationCursor, Enumerate};
use super::instance::{Graph, Instance};
use super::EngineError;
use crate::qmodel::{Atom, Database, Query, Var};
use crate::structure::{lookup_registered, HomSearch, Registered, VarMap};

/// One unit of producer work.
pub(super) enum Step {
    Emit(Vec<u32>),
    Work,
    Done,
}

/// A resumable algorithm performing constant work per step.
pub(super) trait Producer: Send {
    fn vars(&self) -> &[Var];
    fn step(&mut self, ticks: &mut u64) -> Step;
}

/// Runs `credit` producer steps per requested answer and buffers what they
/// emit. When the producer's total work is at most `credit` steps per answer
/// so far, the buffer never runs dry and the delay is constant.
struct Paced<P> {
    producer: P,
    credit: usize,
    queue: VecDeque<Vec<u32>>,
    done: bool,
}

impl<P: Producer> Paced<P> {
    fn pump(&mut self, ticks: &mut u64) {
        match self.producer.step(ticks) {
            Step::Emit(r) => self.queue.push_back(r),
            Step::Work => {}
            Step::Done => self.done = true,
        }
    }
}

impl<P: Producer> Enumerate for Paced<P> {
    fn vars(&self) -> &[Var] {
        self.producer.vars()
    }

    fn next(&mut self, ticks: &mut u64) -> Result<Option<Vec<u32>>, EngineError> {
        for _ in 0..self.credit {
            if self.done {
                break;
            }
            self.pump(ticks);
        }
        loop {
            if let Some(r) = self.queue.pop_front() {
                return Ok(Some(r));
            }
            if self.done {
                return Ok(None);
            }
            self.pump(ticks);
        }
    }
}

/// Mixed-radix counter over the product of lists with the given lengths.
#[derive(Debug, Clone)]
pub(super) struct Odo {
    lens: Vec<usize>,
    pub idx: Vec<usize>,
}

impl Odo {
    pub fn new(lens: Vec<usize>) -> Self {
        let idx = vec![0; lens.len()];
        Odo { lens, idx }
    }

    pub fn is_empty(&self) -> bool {
        self.lens.iter().any(|&l| l == 0)
    }

    /// Moves to the next combination; false once all have been visited.
    pub fn advance(&mut self) -> bool {
        for i in (0..self.idx.len()).rev() {
            self.idx[i] += 1;
            if self.idx[i] < self.lens[i] {
                return true;
            }
            self.idx[i] = 0;
        }
        false
    }
}

/// The binary `R` and unary `P` relations the registered queries use.
pub(super) struct Edges {
    pub g: Graph,
    pub rows: Vec<(u32, u32)>,
}

impl Edges {
    pub fn new(inst: &Instance, ticks: &mut u64) -> Result<Self, EngineError> {
        for (sym, arity) in [("R", 2), ("P", 1)] {
            if let Some(r) = inst.rels.get(sym) {
                if r.arity != arity {
                    return Err(EngineError::WrongSchema(format!("{sym} must have arity {arity}")));
                }
            }
        }
        let rows = inst.rows("R");
        let g = Graph::new(rows, ticks);
        let mut edges: Vec<(u32, u32)> = g.edges.iter().copied().collect();
        edges.sort_unstable();
        *ticks += edges.len() as u64;
        Ok(Edges { g, rows: edges })
    }

    pub fn loops(&self) -> Vec<u32> {
        self.rows.iter().filter(|(a, b)| a == b).map(|&(a, _)| a).collect()
    }
}

/// A homomorphism from `q` into `sub` whose image uses every variable of
/// `sub`, so that composing with it is injective on answers of `sub`.
pub(super) fn covering_hom(q: &Query, sub: &Query) -> Option<VarMap> {
    let search = HomSearch::new(q, sub);
    let want = sub.vars().len();
    let mut out = None;
    search.run(|a| {
        let hit: HashSet<usize> = a.iter().copied().collect();
        if hit.len() == want {
            out = Some(search.to_varmap(a));
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    out
}

/// Column of each variable of `q` in a row over `cols`, after applying `h`.
pub(super) fn lift_columns(q_vars: &[Var], h: &VarMap, cols: &[Var]) -> Vec<usize> {
    q_vars
        .iter()
        .map(|x| {
            let y = h.apply(x);
            cols.iter().position(|c| *c == y).expect("image variable has a column")
        })
        .collect()
}

pub(super) fn atoms(q: &Query, pick: &[&str]) -> Query {
    let chosen: Vec<Atom> = q
        .atoms()
        .iter()
        .filter(|a| pick.contains(&a.to_string().as_str()))
        .cloned()
        .collect();
    assert_eq!(chosen.len(), pick.len(), "image atoms belong to the fixture");
    Query::full(chosen)
}

/// Enumerates `q` with the strategy registered for the query it is
/// isomorphic to.
pub fn enum_bespoke(q: &Query, db: &Database) -> Result<EnumerationCursor, EngineError> {
    let Some((r, _)) = lookup_registered(q) else {
        return Err(EngineError::Inapplicable("query has no registered strategy".into()));
    };
    enum_bespoke_as(r, q, db)
}

/// Enumerates `q` with the strategy of `r`; `q` must be isomorphic to the
/// registered query.
pub fn enum_bespoke_as(r: Registered, q: &Query, db: &Database) -> Result<EnumerationCursor, EngineError> {
    let (cur, dedup) = enum_bespoke_raw(r, q, db)?;
    Ok(if dedup > 1 { cheater_dedup(cur, dedup) } else { cur })
}

/// The strategy's stream before deduplication, with the largest number of
/// times it may repeat an answer.
pub fn enum_bespoke_raw(r: Registered, q: &Query, db: &Database) -> Result<(EnumerationCursor, usize), EngineError> {
    if !r.has_strategy() {
        return Err(EngineError::Inapplicable(format!("{} has no bespoke strategy", r.id())));
    }
    let iso = match lookup_registered(q) {
        Some((found, iso)) if found == r => iso,
        _ => return Err(EngineError::Inapplicable(format!("query is not isomorphic to {}", r.id()))),
    };
    let mut ticks = 0;
    let inst = Instance::new(db, &mut ticks);
    let e = Edges::new(&inst, &mut ticks)?;
    let fixture = r.query();
    let (inner, dedup): (Box<dyn Enumerate>, usize) = match r {
        Registered::TwoLoops => (Box::new(Paced::plain(loops::TwoLoops::new(e, &mut ticks))), 1),
        Registered::TwoTriangles => (Box::new(Paced::plain(loops::TwoTriangles::new(e, &mut ticks))), 1),
        Registered::SpikeQ2 => (
            Box::new(Paced::with_credit(spikes::SpikeQ2::new(&fixture, &inst, e, &mut ticks)?, 8)),
            3,
        ),
        Registered::SpikeQ3 => (
            Box::new(Paced::with_credit(spikes::SpikeQ3::new(&fixture, &inst, e, &mut ticks)?, 16)),
            4,
        ),
        _ => unreachable!("strategy checked above"),
    };
    let renamed = Box::new(Renamed {
        vars: inner.vars().iter().map(|v| iso.apply(v)).collect(),
        inner,
    });
    let cur = EnumerationCursor::new(renamed, Arc::clone(&inst.dict), q.free_vars(), ticks);
    Ok((cur, dedup))
}

impl<P: Producer> Paced<P> {
    fn plain(producer: P) -> Self {
        Self::with_credit(producer, 0)
    }

    fn with_credit(producer: P, credit: usize) -> Self {
        Paced {
            producer,
            credit,
            queue: VecDeque::new(),
            done: false,
        }
    }
}

struct Renamed {
    vars: Vec<Var>,
    inner: Box<dyn Enumerate>,
}

impl Enumerate for Renamed {
    fn vars(&self) -> &[Var] {
        &self.vars
    }

    fn next(&mut self, ticks: &mut u64) -> Result<Option<Vec<u32>>, EngineError> {
        self.inner.next(ticks)
    }
}
