use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use crate::qmodel::{Database, Value};

/// Interned values; ids are dense `u32`s.
#[derive(Debug, Default)]
pub struct Dict {
    values: Vec<Value>,
    index: HashMap<Value, u32>,
}

impl Dict {
    pub fn intern(&mut self, v: &Value) -> u32 {
        if let Some(&id) = self.index.get(v) {
            return id;
        }
        let id = self.values.len() as u32;
        self.values.push(v.clone());
        self.index.insert(v.clone(), id);
        id
    }

    pub fn value(&self, id: u32) -> &Value {
        &self.values[id as usize]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }
}

/// A relation as deduplicated rows of ids.
#[derive(Debug, Clone, Default)]
pub struct Rel {
    pub arity: usize,
    pub rows: Vec<Vec<u32>>,
}

/// A database over interned ids. Restricted copies built during enumeration
/// share the dictionary of their parent.
#[derive(Debug, Clone)]
pub struct Instance {
    pub dict: Arc<Dict>,
    pub rels: BTreeMap<String, Rel>,
}

impl Instance {
    /// Interns `db`, charging one tick per stored value.
    pub fn new(db: &Database, ticks: &mut u64) -> Self {
        let mut dict = Dict::default();
        let mut rels = BTreeMap::new();
        for (name, rel) in db.relations() {
            let mut rows = Vec::with_capacity(rel.tuples.len());
            for t in &rel.tuples {
                *ticks += 1 + t.len() as u64;
                rows.push(t.iter().map(|v| dict.intern(v)).collect());
            }
            rels.insert(
                name.to_string(),
                Rel {
                    arity: rel.arity,
                    rows,
                },
            );
        }
        Instance {
            dict: Arc::new(dict),
            rels,
        }
    }

    pub fn with_rels(dict: Arc<Dict>, rels: BTreeMap<String, Rel>) -> Self {
        Instance { dict, rels }
    }

    pub fn rows(&self, symbol: &str) -> &[Vec<u32>] {
        self.rels.get(symbol).map_or(&[], |r| &r.rows)
    }
}

/// Membership index for a binary relation: out/in adjacency and edge set.
#[derive(Debug, Default)]
pub struct Graph {
    pub out: HashMap<u32, Vec<u32>>,
    pub inc: HashMap<u32, Vec<u32>>,
    pub edges: HashSet<(u32, u32)>,
}

impl Graph {
    pub fn new(rows: &[Vec<u32>], ticks: &mut u64) -> Self {
        let mut g = Graph::default();
        for r in rows {
            *ticks += 1;
            let (a, b) = (r[0], r[1]);
            if g.edges.insert((a, b)) {
                g.out.entry(a).or_default().push(b);
                g.inc.entry(b).or_default().push(a);
            }
        }
        g
    }

    pub fn has(&self, a: u32, b: u32, ticks: &mut u64) -> bool {
        *ticks += 1;
        self.edges.contains(&(a, b))
    }

    pub fn out(&self, a: u32) -> &[u32] {
        self.out.get(&a).map_or(&[], |v| v)
    }

    pub fn inc(&self, a: u32) -> &[u32] {
        self.inc.get(&a).map_or(&[], |v| v)
    }
}
