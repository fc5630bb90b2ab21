//! Seeded databases of a target size for delay benchmarks.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ReductionError;
use crate::qmodel::{Database, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Workload {
    /// Facts spread evenly over the schema, values drawn from a domain as
    /// large as the target size.
    Uniform,
    /// A sparse random graph `R` with a few planted self-loops, each closing
    /// triangles, plus one loop that joins nothing.
    Loops,
}

impl Workload {
    pub const ALL: [Workload; 2] = [Workload::Uniform, Workload::Loops];

    pub fn id(self) -> &'static str {
        match self {
            Workload::Uniform => "uniform",
            Workload::Loops => "loops",
        }
    }

    /// A database over `schema` with about `size` facts.
    pub fn generate(self, schema: &BTreeMap<String, usize>, size: usize, seed: u64) -> Result<Database, ReductionError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut db = Database::new();
        for (sym, &arity) in schema {
            db.declare(sym, arity)?;
        }
        match self {
            Workload::Uniform => {
                let rels: Vec<(&String, usize)> = schema.iter().map(|(s, &a)| (s, a)).filter(|&(_, a)| a > 0).collect();
                if rels.is_empty() {
                    return Ok(db);
                }
                let n = size.max(1);
                let per = size / rels.len();
                for (sym, arity) in rels {
                    let mut have = 0;
                    while have < per {
                        let t = (0..arity).map(|_| Value::atomic(format!("d{}", rng.gen_range(0..n)))).collect();
                        have += usize::from(db.insert(sym, t)?);
                    }
                }
            }
            Workload::Loops => {
                if schema.iter().any(|(s, &a)| s != "R" || a != 2) {
                    return Err(ReductionError::SchemaMismatch("the loops workload needs exactly R/2".into()));
                }
                db.declare("R", 2)?;
                let edge = |db: &mut Database, a: String, b: String| db.insert("R", vec![Value::atomic(a), Value::atomic(b)]);
                const PLANTED: usize = 4;
                for i in 0..PLANTED {
                    let (a, b, c) = (format!("l{i}"), format!("b{i}"), format!("c{i}"));
                    edge(&mut db, a.clone(), a.clone())?;
                    edge(&mut db, a.clone(), b.clone())?;
                    edge(&mut db, b, c.clone())?;
                    edge(&mut db, c.clone(), a.clone())?;
                    edge(&mut db, a, c)?;
                }
                edge(&mut db, "z".into(), "z".into())?;
                let n = size.max(2);
                while db.size() < size {
                    let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                    if a != b {
                        edge(&mut db, format!("v{a}"), format!("v{b}"))?;
                    }
                }
            }
        }
        Ok(db)
    }
}

impl fmt::Display for Workload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Workload {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Workload::ALL
            .into_iter()
            .find(|w| w.id() == s)
            .ok_or_else(|| format!("unknown generator {s:?}; expected uniform or loops"))
    }
}
