//! Join-tree evaluation: full semi-join reduction, then constant-delay
//! enumeration of full acyclic queries by walking the tree top-down.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use super::cursor::{EnumerationCursor, Enumerate};
use super::instance::Instance;
use super::EngineError;
use crate::qmodel::{Atom, Database, Query, Value, Var};
use crate::structure::{gyo_acyclic, JoinTree};

struct Node {
    vars: Vec<Var>,
    rows: Vec<Vec<u32>>,
    /// Positions (in `vars`) of the variables shared with the parent.
    key: Vec<usize>,
    /// The same variables' positions in the parent's `vars`.
    parent_key: Vec<usize>,
}

fn distinct_vars(a: &Atom) -> Vec<Var> {
    let mut out: Vec<Var> = Vec::new();
    for v in &a.args {
        if !out.contains(v) {
            out.push(v.clone());
        }
    }
    out
}

/// Rows of `a`'s relation that respect repeated variables, projected onto
/// the atom's distinct variables.
fn local_rows(a: &Atom, inst: &Instance, ticks: &mut u64) -> Result<Vec<Vec<u32>>, EngineError> {
    let Some(rel) = inst.rels.get(&a.symbol) else {
        return Ok(Vec::new());
    };
    if rel.arity != a.arity() {
        return Err(EngineError::WrongSchema(format!(
            "{} has arity {} in the database but {} in the query",
            a.symbol,
            rel.arity,
            a.arity()
        )));
    }
    let vars = distinct_vars(a);
    let first: Vec<usize> = vars
        .iter()
        .map(|v| a.args.iter().position(|w| w == v).unwrap())
        .collect();
    let mut out = Vec::new();
    'rows: for r in &rel.rows {
        *ticks += 1;
        for (i, v) in a.args.iter().enumerate() {
            let f = a.args.iter().position(|w| w == v).unwrap();
            if r[f] != r[i] {
                continue 'rows;
            }
        }
        out.push(first.iter().map(|&p| r[p]).collect());
    }
    Ok(out)
}

fn project(row: &[u32], pos: &[usize]) -> Vec<u32> {
    pos.iter().map(|&p| row[p]).collect()
}

/// A fully reduced join tree over a database.
pub(crate) struct Reduced {
    tree: JoinTree,
    nodes: Vec<Node>,
}

impl Reduced {
    pub fn new(q: &Query, inst: &Instance, ticks: &mut u64) -> Result<Self, EngineError> {
        let tree = gyo_acyclic(q).ok_or(EngineError::NotAcyclic)?;
        let mut nodes = Vec::with_capacity(tree.atoms.len());
        for a in &tree.atoms {
            nodes.push(Node {
                vars: distinct_vars(a),
                rows: local_rows(a, inst, ticks)?,
                key: Vec::new(),
                parent_key: Vec::new(),
            });
        }
        for i in 0..nodes.len() {
            if let Some(p) = tree.parent[i] {
                let shared: Vec<Var> = nodes[i]
                    .vars
                    .iter()
                    .filter(|v| nodes[p].vars.contains(v))
                    .cloned()
                    .collect();
                nodes[i].key = shared.iter().map(|v| nodes[i].vars.iter().position(|w| w == v).unwrap()).collect();
                nodes[i].parent_key = shared.iter().map(|v| nodes[p].vars.iter().position(|w| w == v).unwrap()).collect();
            }
        }
        let mut r = Reduced { tree, nodes };
        r.reduce(ticks);
        Ok(r)
    }

    fn semijoin(&mut self, keep: usize, keep_pos: Vec<usize>, by: usize, by_pos: Vec<usize>, ticks: &mut u64) {
        let keys: HashSet<Vec<u32>> = self.nodes[by]
            .rows
            .iter()
            .map(|r| {
                *ticks += 1;
                project(r, &by_pos)
            })
            .collect();
        self.nodes[keep].rows.retain(|r| {
            *ticks += 1;
            keys.contains(&project(r, &keep_pos))
        });
    }

    fn reduce(&mut self, ticks: &mut u64) {
        let order = self.tree.elimination.clone();
        for &e in &order {
            if let Some(p) = self.tree.parent[e] {
                let (kp, pk) = (self.nodes[e].key.clone(), self.nodes[e].parent_key.clone());
                self.semijoin(p, pk, e, kp, ticks);
            }
        }
        for &e in order.iter().rev() {
            if let Some(p) = self.tree.parent[e] {
                let (kp, pk) = (self.nodes[e].key.clone(), self.nodes[e].parent_key.clone());
                self.semijoin(e, kp, p, pk, ticks);
            }
        }
    }

    pub fn nonempty(&self) -> bool {
        match self.tree.root {
            None => true,
            Some(r) => !self.nodes[r].rows.is_empty(),
        }
    }
}

/// Constant-delay enumeration over a reduced join tree.
pub(crate) struct AcyclicEnum {
    vars: Vec<Var>,
    order: Vec<usize>,
    nodes: Vec<Node>,
    /// Level of each node's parent in `order`.
    parent_level: Vec<Option<usize>>,
    buckets: Vec<Vec<usize>>,
    index: Vec<HashMap<Vec<u32>, usize>>,
    /// For each output variable: (level, column).
    out: Vec<(usize, usize)>,
    state: Vec<(usize, usize)>,
    started: bool,
    done: bool,
}

impl AcyclicEnum {
    pub fn new(q: &Query, inst: &Instance, ticks: &mut u64) -> Result<Self, EngineError> {
        let red = Reduced::new(q, inst, ticks)?;
        let order = red.tree.top_down();
        let level_of: HashMap<usize, usize> = order.iter().enumerate().map(|(l, &n)| (n, l)).collect();
        let parent_level = order.iter().map(|&n| red.tree.parent[n].map(|p| level_of[&p])).collect();
        let mut buckets = Vec::new();
        let mut index = Vec::with_capacity(order.len());
        for (l, &n) in order.iter().enumerate() {
            let node = &red.nodes[n];
            let mut idx: HashMap<Vec<u32>, usize> = HashMap::new();
            if l == 0 {
                buckets.push((0..node.rows.len()).collect());
                idx.insert(Vec::new(), buckets.len() - 1);
            } else {
                for (ri, r) in node.rows.iter().enumerate() {
                    *ticks += 1;
                    let k = project(r, &node.key);
                    let b = *idx.entry(k).or_insert_with(|| {
                        buckets.push(Vec::new());
                        buckets.len() - 1
                    });
                    buckets[b].push(ri);
                }
            }
            index.push(idx);
        }
        let vars = q.vars();
        let out = vars
            .iter()
            .map(|v| {
                order
                    .iter()
                    .enumerate()
                    .find_map(|(l, &n)| red.nodes[n].vars.iter().position(|w| w == v).map(|c| (l, c)))
                    .expect("every variable occurs in an atom")
            })
            .collect();
        let nodes = red.nodes;
        let done = order.first().is_some_and(|&r| nodes[r].rows.is_empty());
        Ok(AcyclicEnum {
            vars,
            state: vec![(0, 0); order.len()],
            order,
            nodes,
            parent_level,
            buckets,
            index,
            out,
            started: false,
            done,
        })
    }

    fn row(&self, level: usize) -> &[u32] {
        let (b, p) = self.state[level];
        &self.nodes[self.order[level]].rows[self.buckets[b][p]]
    }

    /// Points `level` at the first row matching its parent's current row.
    fn open(&mut self, level: usize, ticks: &mut u64) -> bool {
        *ticks += 1;
        let b = match self.parent_level[level] {
            None => 0,
            Some(pl) => {
                let node = &self.nodes[self.order[level]];
                let key = project(self.row(pl), &node.parent_key);
                match self.index[level].get(&key) {
                    Some(&b) => b,
                    None => return false,
                }
            }
        };
        self.state[level] = (b, 0);
        !self.buckets[b].is_empty()
    }

    fn emit(&self, ticks: &mut u64) -> Vec<u32> {
        *ticks += 1;
        self.out.iter().map(|&(l, c)| self.row(l)[c]).collect()
    }
}

impl Enumerate for AcyclicEnum {
    fn vars(&self) -> &[Var] {
        &self.vars
    }

    fn next(&mut self, ticks: &mut u64) -> Result<Option<Vec<u32>>, EngineError> {
        if self.done {
            return Ok(None);
        }
        let levels = self.order.len();
        let from = if !self.started {
            self.started = true;
            0
        } else {
            let mut k = levels;
            loop {
                if k == 0 {
                    self.done = true;
                    return Ok(None);
                }
                k -= 1;
                *ticks += 1;
                let (b, p) = self.state[k];
                if p + 1 < self.buckets[b].len() {
                    self.state[k].1 += 1;
                    break;
                }
            }
            k + 1
        };
        for l in from..levels {
            if !self.open(l, ticks) {
                // unreachable after full reduction unless the result is empty
                self.done = true;
                return Ok(None);
            }
        }
        if levels == 0 {
            self.done = true;
        }
        Ok(Some(self.emit(ticks)))
    }
}

/// Constant-delay enumeration of a full acyclic query.
pub fn enum_full_acyclic(q: &Query, db: &Database) -> Result<EnumerationCursor, EngineError> {
    if !q.is_full() {
        return Err(EngineError::NotFull);
    }
    let mut ticks = 0;
    let inst = Instance::new(db, &mut ticks);
    let e = AcyclicEnum::new(q, &inst, &mut ticks)?;
    Ok(EnumerationCursor::new(Box::new(e), Arc::clone(&inst.dict), q.free_vars(), ticks))
}

/// Whether an acyclic query has a solution.
pub fn eval_boolean(q: &Query, db: &Database) -> Result<bool, EngineError> {
    let mut ticks = 0;
    eval_boolean_ticks(q, db, &mut ticks)
}

pub fn eval_boolean_ticks(q: &Query, db: &Database, ticks: &mut u64) -> Result<bool, EngineError> {
    let inst = Instance::new(db, ticks);
    Ok(Reduced::new(q, &inst, ticks)?.nonempty())
}

/// Answers of an acyclic unary query.
pub fn eval_unary(q: &Query, db: &Database) -> Result<BTreeSet<Value>, EngineError> {
    let [x] = q.free_vars() else {
        return Err(EngineError::Inapplicable("query is not unary".into()));
    };
    let mut ticks = 0;
    let inst = Instance::new(db, &mut ticks);
    let red = Reduced::new(q, &inst, &mut ticks)?;
    let (n, c) = red
        .nodes
        .iter()
        .enumerate()
        .find_map(|(i, node)| node.vars.iter().position(|v| v == x).map(|c| (i, c)))
        .expect("free variable occurs in an atom");
    Ok(red.nodes[n]
        .rows
        .iter()
        .map(|r| inst.dict.value(r[c]).clone())
        .collect())
}
