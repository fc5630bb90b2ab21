//! Ground-truth evaluation by exhaustive search over the active domain.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use super::cursor::{collect_answers, EnumerationCursor, Enumerate};
use super::instance::Instance;
use super::EngineError;
use crate::qmodel::{AnswerTuple, Database, Query, Var};

pub(crate) struct OracleEnum {
    order: Vec<Var>,
    head: Vec<usize>,
    domain: Vec<u32>,
    tables: Vec<HashSet<Vec<u32>>>,
    /// For each atom: (table, variable levels of its arguments).
    atoms: Vec<(usize, Vec<usize>)>,
    /// Atoms whose last variable is bound at each level.
    checks: Vec<Vec<usize>>,
    assign: Vec<u32>,
    pos: Vec<usize>,
    level: usize,
    emitted: Option<HashSet<Vec<u32>>>,
    done: bool,
}

impl OracleEnum {
    pub fn new(q: &Query, inst: &Instance, ticks: &mut u64) -> Self {
        // bind variables so that atoms complete as early as possible
        let mut order: Vec<Var> = Vec::new();
        let mut left = q.vars();
        while !left.is_empty() {
            let score = |v: &Var| {
                let complete = q
                    .atoms()
                    .iter()
                    .filter(|a| a.args.contains(v) && a.args.iter().all(|w| w == v || order.contains(w)))
                    .count();
                let touching = q
                    .atoms()
                    .iter()
                    .filter(|a| a.args.contains(v) && a.args.iter().any(|w| order.contains(w)))
                    .count();
                (complete, touching)
            };
            let best = (0..left.len())
                .max_by(|&i, &j| score(&left[i]).cmp(&score(&left[j])).then(j.cmp(&i)))
                .unwrap();
            order.push(left.remove(best));
        }
        let level: HashMap<&Var, usize> = order.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut table_of: HashMap<&str, usize> = HashMap::new();
        let mut tables = Vec::new();
        let mut atoms = Vec::new();
        let mut checks = vec![Vec::new(); order.len()];
        let mut nullary_ok = true;
        for a in q.atoms() {
            let t = *table_of.entry(a.symbol.as_str()).or_insert_with(|| {
                tables.push(
                    inst.rows(&a.symbol)
                        .iter()
                        .map(|r| {
                            *ticks += 1;
                            r.clone()
                        })
                        .collect::<HashSet<_>>(),
                );
                tables.len() - 1
            });
            let lv: Vec<usize> = a.args.iter().map(|v| level[v]).collect();
            match lv.iter().max() {
                Some(&m) => checks[m].push(atoms.len()),
                None => nullary_ok &= tables[t].contains(&Vec::new()),
            }
            atoms.push((t, lv));
        }
        let head = q.free_vars().iter().map(|v| level[v]).collect();
        let mut domain: Vec<u32> = (0..inst.dict.len() as u32).collect();
        domain.sort_by(|a, b| inst.dict.value(*a).cmp(inst.dict.value(*b)));
        *ticks += domain.len() as u64;
        let n = order.len();
        OracleEnum {
            order,
            head,
            domain,
            tables,
            atoms,
            checks,
            assign: vec![0; n],
            pos: vec![0; n.max(1)],
            level: 0,
            emitted: if q.is_full() { None } else { Some(HashSet::new()) },
            done: !nullary_ok,
        }
    }
}

impl Enumerate for OracleEnum {
    fn vars(&self) -> &[Var] {
        &self.order
    }

    fn next(&mut self, ticks: &mut u64) -> Result<Option<Vec<u32>>, EngineError> {
        let n = self.order.len();
        loop {
            if self.done {
                return Ok(None);
            }
            if self.level == n {
                let full: Vec<u32> = self.assign.clone();
                if n == 0 {
                    self.done = true;
                } else {
                    self.level -= 1;
                }
                *ticks += 1;
                let fresh = match &mut self.emitted {
                    None => true,
                    Some(seen) => seen.insert(self.head.iter().map(|&i| full[i]).collect()),
                };
                if fresh {
                    return Ok(Some(full));
                }
                continue;
            }
            let k = self.level;
            if self.pos[k] >= self.domain.len() {
                if k == 0 {
                    self.done = true;
                    return Ok(None);
                }
                self.level -= 1;
                continue;
            }
            *ticks += 1;
            self.assign[k] = self.domain[self.pos[k]];
            self.pos[k] += 1;
            let ok = self.checks[k].iter().all(|&ai| {
                *ticks += 1;
                let (t, lv) = &self.atoms[ai];
                let tuple: Vec<u32> = lv.iter().map(|&l| self.assign[l]).collect();
                self.tables[*t].contains(&tuple)
            });
            if ok {
                self.level += 1;
                if self.level < n {
                    self.pos[self.level] = 0;
                }
            }
        }
    }
}

/// Lazy exhaustive search, emitting answers as they are found.
pub fn oracle_cursor(q: &Query, db: &Database) -> EnumerationCursor {
    let mut ticks = 0;
    let inst = Instance::new(db, &mut ticks);
    let e = OracleEnum::new(q, &inst, &mut ticks);
    EnumerationCursor::new(Box::new(e), Arc::clone(&inst.dict), q.free_vars(), ticks)
}

/// `q(D)` by trying every valuation over the active domain.
pub fn oracle_enumerate(q: &Query, db: &Database) -> BTreeSet<AnswerTuple> {
    collect_answers(oracle_cursor(q, db))
        .expect("oracle never fails")
        .into_iter()
        .collect()
}
