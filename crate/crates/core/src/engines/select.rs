//! Engine choice by name or by the strongest applicable guarantee, and
//! delay benchmarks over growing databases.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{
    cheater_dedup, enum_bespoke_raw, enum_full_acyclic, enum_mirror, enum_untangle, measure_delay, oracle_cursor,
    DelayStats, EngineError, EnumerationCursor,
};
use crate::qmodel::{Database, Query};
use crate::reductions::{ReductionError, Workload};
use crate::structure::{
    is_acyclic, is_mirror, is_untangleable, lookup_registered, Registered, Untangleability, DEFAULT_UNTANGLE_BUDGET,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Auto,
    Oracle,
    Acyclic,
    Untangle,
    Mirror,
    Bespoke(Registered),
}

impl fmt::Display for EngineChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineChoice::Auto => f.write_str("auto"),
            EngineChoice::Oracle => f.write_str("oracle"),
            EngineChoice::Acyclic => f.write_str("acyclic"),
            EngineChoice::Untangle => f.write_str("untangle"),
            EngineChoice::Mirror => f.write_str("mirror"),
            EngineChoice::Bespoke(r) => write!(f, "bespoke:{}", r.id()),
        }
    }
}

impl FromStr for EngineChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "auto" => EngineChoice::Auto,
            "oracle" => EngineChoice::Oracle,
            "acyclic" => EngineChoice::Acyclic,
            "untangle" => EngineChoice::Untangle,
            "mirror" => EngineChoice::Mirror,
            _ => {
                let id = s
                    .strip_prefix("bespoke:")
                    .ok_or_else(|| format!("unknown engine {s:?}"))?;
                let r = Registered::ALL
                    .into_iter()
                    .find(|r| r.id().eq_ignore_ascii_case(id) && r.has_strategy())
                    .ok_or_else(|| format!("no bespoke strategy named {id:?}"))?;
                EngineChoice::Bespoke(r)
            }
        })
    }
}

/// A running engine and the engine that was actually picked.
pub struct Opened {
    pub cursor: EnumerationCursor,
    pub engine: EngineChoice,
    /// Set when `auto` had to fall back to exhaustive search.
    pub warning: Option<String>,
}

/// Picks the engine with the best guarantee for `q`: constant delay
/// (acyclic, mirror, constant-delay strategies) before linear delay
/// (untangling, linear-delay strategies) before the oracle.
pub fn auto_engine(q: &Query) -> EngineChoice {
    if !q.is_full() {
        return EngineChoice::Oracle;
    }
    if is_acyclic(q) {
        return EngineChoice::Acyclic;
    }
    if matches!(is_mirror(q), Ok(Some(_))) {
        return EngineChoice::Mirror;
    }
    let bespoke = lookup_registered(q).map(|(r, _)| r).filter(|r| r.has_strategy());
    if let Some(r @ (Registered::SpikeQ2 | Registered::SpikeQ3)) = bespoke {
        return EngineChoice::Bespoke(r);
    }
    if matches!(is_untangleable(q, DEFAULT_UNTANGLE_BUDGET), Untangleability::Yes(_)) {
        return EngineChoice::Untangle;
    }
    bespoke.map_or(EngineChoice::Oracle, EngineChoice::Bespoke)
}

/// Starts `choice` on `q` over `db`. With `dedup` off, bespoke strategies
/// stream their raw output, duplicates included.
pub fn open_engine(q: &Query, db: &Database, choice: EngineChoice, dedup: bool) -> Result<Opened, EngineError> {
    let engine = if choice == EngineChoice::Auto { auto_engine(q) } else { choice };
    let warning = (choice == EngineChoice::Auto && engine == EngineChoice::Oracle)
        .then(|| "no enumeration algorithm applies; falling back to the oracle".to_string());
    let cursor = match engine {
        EngineChoice::Auto => unreachable!("resolved above"),
        EngineChoice::Oracle => oracle_cursor(q, db),
        EngineChoice::Acyclic => enum_full_acyclic(q, db)?,
        EngineChoice::Mirror => match is_mirror(q)? {
            Some(w) => enum_mirror(q, &w, db)?,
            None => return Err(EngineError::Inapplicable("query is not a mirror".into())),
        },
        EngineChoice::Untangle => {
            if !q.is_full() {
                return Err(EngineError::Inapplicable("untangling needs a full query".into()));
            }
            match is_untangleable(q, DEFAULT_UNTANGLE_BUDGET) {
                Untangleability::Yes(w) => enum_untangle(q, &w, db)?,
                Untangleability::No => return Err(EngineError::Inapplicable("query cannot be untangled".into())),
                Untangleability::Unknown => {
                    return Err(EngineError::Inapplicable("untangling search ran out of budget".into()))
                }
            }
        }
        EngineChoice::Bespoke(r) => {
            let (cur, c) = enum_bespoke_raw(r, q, db)?;
            if dedup && c > 1 {
                cheater_dedup(cur, c)
            } else {
                cur
            }
        }
    };
    Ok(Opened { cursor, engine, warning })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DelayClass {
    Constant,
    Linear,
    Unbounded,
}

impl fmt::Display for DelayClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DelayClass::Constant => "CONSTANT",
            DelayClass::Linear => "LINEAR",
            DelayClass::Unbounded => "UNBOUNDED",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub target: usize,
    /// Facts in the generated database.
    pub facts: usize,
    #[serde(flatten)]
    pub stats: DelayStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub engine: String,
    pub generator: String,
    pub seed: u64,
    pub rows: Vec<BenchRow>,
    pub verdict: DelayClass,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Generator(#[from] ReductionError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Ratio of the largest to the smallest value; infinite when the smallest
/// is zero and the largest is not.
fn spread(xs: impl Iterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.collect();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(0.0, f64::max);
    if hi == 0.0 {
        1.0
    } else if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// CONSTANT when `max_gap` varies by at most 2x across the rows, LINEAR
/// when `max_gap / facts` does, UNBOUNDED otherwise.
pub fn delay_class(rows: &[BenchRow]) -> DelayClass {
    if spread(rows.iter().map(|r| r.stats.max_gap as f64)) <= 2.0 {
        DelayClass::Constant
    } else if spread(rows.iter().map(|r| r.stats.max_gap as f64 / r.facts.max(1) as f64)) <= 2.0 {
        DelayClass::Linear
    } else {
        DelayClass::Unbounded
    }
}

/// Runs `choice` to completion on one generated database per size.
pub fn bench_delay(
    q: &Query,
    choice: EngineChoice,
    sizes: &[usize],
    gen: Workload,
    seed: u64,
) -> Result<BenchReport, BenchError> {
    let mut rows = Vec::new();
    let mut engine = choice;
    for &target in sizes {
        let db = gen.generate(&q.schema(), target, seed)?;
        let mut picked = choice;
        let stats = measure_delay(|| {
            let o = open_engine(q, &db, choice, true)?;
            picked = o.engine;
            Ok(o.cursor)
        })?;
        engine = picked;
        rows.push(BenchRow { target, facts: db.size(), stats });
    }
    let verdict = delay_class(&rows);
    Ok(BenchReport {
        engine: engine.to_string(),
        generator: gen.to_string(),
        seed,
        rows,
        verdict,
    })
}
