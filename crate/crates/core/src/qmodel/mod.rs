//! Query and database data model.
//!
//! A [`Query`] is a set of [`Atom`]s plus an ordered list of free variables;
//! a [`Database`] maps relation names to sets of [`Value`] tuples. Both are
//! immutable once built and can be shared freely between threads.

mod parse;
mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::{parse_database, parse_query};
pub use text::{format_answer, serialize_answers, serialize_database, serialize_query};

/// Default bound on the number of variables and atoms accepted by the
/// structural algorithms.
pub const DEFAULT_MAX_VARS: usize = 32;
/// Environment variable overriding [`DEFAULT_MAX_VARS`].
pub const MAX_VARS_ENV: &str = "CQSJ_MAX_VARS";

/// The configured structural size limit.
pub fn max_query_size() -> usize {
    std::env::var(MAX_VARS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_VARS)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("relation {name} used with arity {found} but earlier with arity {expected}")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("variable {0} appears twice in the head")]
    DuplicateHeadVar(String),
    #[error("head variable {0} does not occur in the body")]
    UnboundHeadVar(String),
    #[error("nested pair value in {0}")]
    NestedPair(String),
}

/// A query variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var(s.to_string())
    }
}

/// A relation symbol occurrence: name plus the argument list.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub symbol: String,
    pub args: Vec<Var>,
}

impl Atom {
    pub fn new(symbol: impl Into<String>, args: impl IntoIterator<Item = Var>) -> Self {
        Atom {
            symbol: symbol.into(),
            args: args.into_iter().collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// Distinct variables of the atom, sorted.
    pub fn var_set(&self) -> BTreeSet<Var> {
        self.args.iter().cloned().collect()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.symbol)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A conjunctive query. Atoms are kept sorted and deduplicated.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Query {
    atoms: Vec<Atom>,
    free: Vec<Var>,
}

impl Query {
    /// Builds a query, checking arity consistency and the free-variable
    /// invariants.
    pub fn new(
        atoms: impl IntoIterator<Item = Atom>,
        free: impl IntoIterator<Item = Var>,
    ) -> Result<Self, ModelError> {
        let mut atoms: Vec<Atom> = atoms.into_iter().collect();
        atoms.sort();
        atoms.dedup();
        let mut arities: BTreeMap<&str, usize> = BTreeMap::new();
        for a in &atoms {
            match arities.get(a.symbol.as_str()) {
                Some(&k) if k != a.arity() => {
                    return Err(ModelError::ArityMismatch {
                        name: a.symbol.clone(),
                        expected: k,
                        found: a.arity(),
                    })
                }
                _ => {
                    arities.insert(&a.symbol, a.arity());
                }
            }
        }
        let free: Vec<Var> = free.into_iter().collect();
        let all: BTreeSet<&Var> = atoms.iter().flat_map(|a| a.args.iter()).collect();
        let mut seen = BTreeSet::new();
        for v in &free {
            if !seen.insert(v) {
                return Err(ModelError::DuplicateHeadVar(v.to_string()));
            }
            if !all.contains(v) {
                return Err(ModelError::UnboundHeadVar(v.to_string()));
            }
        }
        Ok(Query { atoms, free })
    }

    /// A full query over the given atoms; free variables in sorted order.
    pub fn full(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let atoms: Vec<Atom> = atoms.into_iter().collect();
        let vars: BTreeSet<Var> = atoms.iter().flat_map(|a| a.args.iter().cloned()).collect();
        Query::new(atoms, vars).expect("full query over consistent atoms")
    }

    pub fn empty() -> Self {
        Query {
            atoms: Vec::new(),
            free: Vec::new(),
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn free_vars(&self) -> &[Var] {
        &self.free
    }

    /// All variables occurring in the atoms, sorted.
    pub fn vars(&self) -> Vec<Var> {
        let s: BTreeSet<&Var> = self.atoms.iter().flat_map(|a| a.args.iter()).collect();
        s.into_iter().cloned().collect()
    }

    pub fn quantified_vars(&self) -> Vec<Var> {
        let free: BTreeSet<&Var> = self.free.iter().collect();
        self.vars().into_iter().filter(|v| !free.contains(v)).collect()
    }

    pub fn arity(&self) -> usize {
        self.free.len()
    }

    pub fn is_full(&self) -> bool {
        self.free.len() == self.vars().len()
    }

    pub fn is_boolean(&self) -> bool {
        self.free.is_empty()
    }

    pub fn is_self_join_free(&self) -> bool {
        let syms: BTreeSet<&str> = self.atoms.iter().map(|a| a.symbol.as_str()).collect();
        syms.len() == self.atoms.len()
    }

    /// Relation symbols with their arities.
    pub fn schema(&self) -> BTreeMap<String, usize> {
        self.atoms
            .iter()
            .map(|a| (a.symbol.clone(), a.arity()))
            .collect()
    }

    /// The same atoms with every variable quantified.
    pub fn boolean_closure(&self) -> Query {
        Query {
            atoms: self.atoms.clone(),
            free: Vec::new(),
        }
    }

    /// The same atoms with every variable free (sorted order).
    pub fn full_closure(&self) -> Query {
        Query::full(self.atoms.clone())
    }

    /// Subquery induced by a subset of atoms. Free variables are the original
    /// free variables that survive, followed by (when `full` is set) every
    /// other surviving variable.
    pub fn subquery(&self, atoms: impl IntoIterator<Item = Atom>) -> Query {
        let atoms: Vec<Atom> = atoms.into_iter().collect();
        let vars: BTreeSet<&Var> = atoms.iter().flat_map(|a| a.args.iter()).collect();
        let free: Vec<Var> = self
            .free
            .iter()
            .filter(|v| vars.contains(v))
            .cloned()
            .collect();
        Query::new(atoms, free).expect("subquery of a valid query")
    }

    /// Applies a variable renaming to atoms and free variables.
    pub fn rename(&self, f: impl Fn(&Var) -> Var) -> Query {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom::new(a.symbol.clone(), a.args.iter().map(&f)));
        Query::new(atoms, self.free.iter().map(&f)).expect("renaming must be injective")
    }

    /// Same atoms with a different free-variable list.
    pub fn with_free(&self, free: impl IntoIterator<Item = Var>) -> Result<Query, ModelError> {
        Query::new(self.atoms.clone(), free)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_query(self))
    }
}

impl fmt::Debug for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_query(self))
    }
}

/// A database value: an opaque token or a `(data, variable)` pair.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Value {
    Atomic(String),
    Pair { data: String, var: Var },
}

impl Value {
    pub fn atomic(s: impl Into<String>) -> Self {
        Value::Atomic(s.into())
    }

    pub fn pair(data: impl Into<String>, var: impl Into<Var>) -> Self {
        Value::Pair {
            data: data.into(),
            var: var.into(),
        }
    }

    pub fn as_pair(&self) -> Option<(&str, &Var)> {
        match self {
            Value::Pair { data, var } => Some((data, var)),
            Value::Atomic(_) => None,
        }
    }
}

impl From<String> for Var {
    fn from(s: String) -> Self {
        Var(s)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Atomic(s) => f.write_str(s),
            Value::Pair { data, var } => write!(f, "pair({data},{var})"),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub type Tuple = Vec<Value>;

/// A relation instance: fixed arity, set semantics.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Relation {
    pub arity: usize,
    pub tuples: BTreeSet<Tuple>,
}

/// A finite relational instance.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Database {
    relations: BTreeMap<String, Relation>,
}

impl Database {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a fact; duplicates are ignored. Fails when the arity disagrees
    /// with earlier facts of the same relation.
    pub fn insert(&mut self, symbol: &str, tuple: Tuple) -> Result<bool, ModelError> {
        let rel = self
            .relations
            .entry(symbol.to_string())
            .or_insert_with(|| Relation {
                arity: tuple.len(),
                tuples: BTreeSet::new(),
            });
        if rel.arity != tuple.len() {
            return Err(ModelError::ArityMismatch {
                name: symbol.to_string(),
                expected: rel.arity,
                found: tuple.len(),
            });
        }
        Ok(rel.tuples.insert(tuple))
    }

    /// Declares an (initially empty) relation.
    pub fn declare(&mut self, symbol: &str, arity: usize) -> Result<(), ModelError> {
        let rel = self
            .relations
            .entry(symbol.to_string())
            .or_insert_with(|| Relation {
                arity,
                tuples: BTreeSet::new(),
            });
        if rel.arity != arity {
            return Err(ModelError::ArityMismatch {
                name: symbol.to_string(),
                expected: rel.arity,
                found: arity,
            });
        }
        Ok(())
    }

    pub fn relation(&self, symbol: &str) -> Option<&Relation> {
        self.relations.get(symbol)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn contains(&self, symbol: &str, tuple: &[Value]) -> bool {
        self.relations
            .get(symbol)
            .is_some_and(|r| r.tuples.contains(tuple))
    }

    /// Total number of facts.
    pub fn size(&self) -> usize {
        self.relations.values().map(|r| r.tuples.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    /// Every value occurring in some fact, sorted.
    pub fn domain(&self) -> BTreeSet<Value> {
        self.relations
            .values()
            .flat_map(|r| r.tuples.iter().flat_map(|t| t.iter().cloned()))
            .collect()
    }

    /// Relation symbols with their arities.
    pub fn schema(&self) -> BTreeMap<String, usize> {
        self.relations
            .iter()
            .map(|(k, r)| (k.clone(), r.arity))
            .collect()
    }
}

/// One answer, aligned with the free variables of the producing query.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct AnswerTuple(pub Vec<Value>);

impl AnswerTuple {
    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for AnswerTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_answer(self))
    }
}

/// Distinct variable sets, one per atom; atoms with the same variable set
/// share an edge.
pub fn hypergraph_of(q: &Query) -> BTreeSet<BTreeSet<Var>> {
    q.atoms().iter().map(Atom::var_set).collect()
}
