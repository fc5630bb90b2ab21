//! Linear-delay strategies for the two-loop and two-triangle queries: scan
//! every edge once per self-loop, file matching patterns into two tables and
//! pair each new entry with the entries of the other table.

use std::collections::{HashMap, VecDeque};

use super::{Edges, Producer, Step};
use crate::qmodel::Var;

fn vars(names: &[&str]) -> Vec<Var> {
    names.iter().map(|s| Var::new(*s)).collect()
}

/// Pending pairings of one new table entry with a prefix of a list.
struct Task<K> {
    first_table: bool,
    key: K,
    mine: (u32, u32),
    len: usize,
    idx: usize,
}

/// `R(a,a), R(a,b), R(b,c), R(c,a), R(d,d), R(d,c), R(c,e), R(e,d)`.
///
/// For a loop `a` and an edge `(p,q)` with `a->p` and `q->a`, the triple is
/// a left triangle with `c = q` and a right triangle with `c = p`.
pub(super) struct TwoLoops {
    vars: Vec<Var>,
    e: Edges,
    loops: Vec<u32>,
    li: usize,
    ei: usize,
    /// `c -> (a, b)` for left triangles.
    t1: HashMap<u32, Vec<(u32, u32)>>,
    /// `c -> (d, e)` for right triangles.
    t2: HashMap<u32, Vec<(u32, u32)>>,
    tasks: VecDeque<Task<u32>>,
}

impl TwoLoops {
    pub fn new(e: Edges, ticks: &mut u64) -> Self {
        let loops = e.loops();
        *ticks += loops.len() as u64;
        TwoLoops {
            vars: vars(&["a", "b", "c", "d", "e"]),
            e,
            loops,
            li: 0,
            ei: 0,
            t1: HashMap::new(),
            t2: HashMap::new(),
            tasks: VecDeque::new(),
        }
    }
}

impl Producer for TwoLoops {
    fn vars(&self) -> &[Var] {
        &self.vars
    }

    fn step(&mut self, ticks: &mut u64) -> Step {
        *ticks += 1;
        if let Some(t) = self.tasks.front_mut() {
            if t.idx < t.len {
                let (a, b) = t.mine;
                let row = if t.first_table {
                    let (d, e) = self.t2[&t.key][t.idx];
                    vec![a, b, t.key, d, e]
                } else {
                    let (a2, b2) = self.t1[&t.key][t.idx];
                    vec![a2, b2, t.key, a, b]
                };
                t.idx += 1;
                return Step::Emit(row);
            }
            self.tasks.pop_front();
            return Step::Work;
        }
        let Some(&a) = self.loops.get(self.li) else {
            return Step::Done;
        };
        let Some(&(p, q)) = self.e.rows.get(self.ei) else {
            self.li += 1;
            self.ei = 0;
            return Step::Work;
        };
        self.ei += 1;
        if self.e.g.has(a, p, ticks) && self.e.g.has(q, a, ticks) {
            let len2 = self.t2.get(&q).map_or(0, Vec::len);
            self.t1.entry(q).or_default().push((a, p));
            let len1 = self.t1.get(&p).map_or(0, Vec::len);
            self.t2.entry(p).or_default().push((a, q));
            self.tasks.push_back(Task { first_table: true, key: q, mine: (a, p), len: len2, idx: 0 });
            self.tasks.push_back(Task { first_table: false, key: p, mine: (a, q), len: len1, idx: 0 });
        }
        Step::Work
    }
}

/// `R(b,c), R(c,a), R(a,b), R(a,a), R(d,b), R(d,c), R(d,d)`: tables keyed
/// by the shared edge `(b,c)`.
pub(super) struct TwoTriangles {
    vars: Vec<Var>,
    e: Edges,
    loops: Vec<u32>,
    li: usize,
    ei: usize,
    /// `(b,c) -> a` with `a->b->c->a`.
    t1: HashMap<(u32, u32), Vec<u32>>,
    /// `(b,c) -> d` with `d->b`, `d->c`.
    t2: HashMap<(u32, u32), Vec<u32>>,
    tasks: VecDeque<Task<(u32, u32)>>,
}

impl TwoTriangles {
    pub fn new(e: Edges, ticks: &mut u64) -> Self {
        let loops = e.loops();
        *ticks += loops.len() as u64;
        TwoTriangles {
            vars: vars(&["a", "b", "c", "d"]),
            e,
            loops,
            li: 0,
            ei: 0,
            t1: HashMap::new(),
            t2: HashMap::new(),
            tasks: VecDeque::new(),
        }
    }
}

impl Producer for TwoTriangles {
    fn vars(&self) -> &[Var] {
        &self.vars
    }

    fn step(&mut self, ticks: &mut u64) -> Step {
        *ticks += 1;
        if let Some(t) = self.tasks.front_mut() {
            if t.idx < t.len {
                let (b, c) = t.key;
                let row = if t.first_table {
                    vec![t.mine.0, b, c, self.t2[&t.key][t.idx]]
                } else {
                    vec![self.t1[&t.key][t.idx], b, c, t.mine.0]
                };
                t.idx += 1;
                return Step::Emit(row);
            }
            self.tasks.pop_front();
            return Step::Work;
        }
        let Some(&a) = self.loops.get(self.li) else {
            return Step::Done;
        };
        let Some(&(b, c)) = self.e.rows.get(self.ei) else {
            self.li += 1;
            self.ei = 0;
            return Step::Work;
        };
        self.ei += 1;
        if !self.e.g.has(a, b, ticks) {
            return Step::Work;
        }
        let key = (b, c);
        if self.e.g.has(c, a, ticks) {
            let len = self.t2.get(&key).map_or(0, Vec::len);
            self.t1.entry(key).or_default().push(a);
            self.tasks.push_back(Task { first_table: true, key, mine: (a, a), len, idx: 0 });
        }
        if self.e.g.has(a, c, ticks) {
            let len = self.t1.get(&key).map_or(0, Vec::len);
            self.t2.entry(key).or_default().push(a);
            self.tasks.push_back(Task { first_table: false, key, mine: (a, a), len, idx: 0 });
        }
        Step::Work
    }
}
