//! Evaluation and enumeration engines over interned databases.
//!
//! Every engine returns an [`EnumerationCursor`] that counts elementary
//! steps, so delay can be measured independently of wall time.

mod acyclic;
mod bespoke;
mod cursor;
mod instance;
mod mirror;
mod oracle;
mod select;
mod untangle;

use thiserror::Error;

use crate::qmodel::{AnswerTuple, Database, Query};
use crate::structure::{full_core, is_acyclic, retraction_onto, StructureError};

pub use self::acyclic::{enum_full_acyclic, eval_boolean, eval_unary};
pub use self::bespoke::{enum_bespoke, enum_bespoke_as, enum_bespoke_raw};
pub use self::cursor::{cheater_dedup, collect_answers, measure_delay, DelayStats, EnumerationCursor, Phase};
pub use self::mirror::enum_mirror;
pub use self::oracle::{oracle_cursor, oracle_enumerate};
pub use self::select::{
    auto_engine, bench_delay, delay_class, open_engine, BenchError, BenchReport, BenchRow, DelayClass, EngineChoice, Opened,
};
pub use self::untangle::enum_untangle;

pub(crate) use self::acyclic::AcyclicEnum;
pub(crate) use self::cursor::Enumerate;
pub(crate) use self::instance::Instance;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("query is not acyclic")]
    NotAcyclic,
    #[error("query core is cyclic")]
    CyclicCore,
    #[error("query is not full")]
    NotFull,
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("database does not match the query schema: {0}")]
    WrongSchema(String),
    #[error("engine not applicable: {0}")]
    Inapplicable(String),
    #[error("an answer was produced {count} times, more than the allowed {c}")]
    CheaterViolation { c: usize, count: usize },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// One answer of `q`, found by evaluating its full core and lifting the
/// answer along a retraction. Runs in linear time when the full core is
/// acyclic.
pub fn first_solution(q: &Query, db: &Database) -> Result<Option<AnswerTuple>, EngineError> {
    crate::structure::check_size(q)?;
    let fc = full_core(q);
    if !is_acyclic(&fc) {
        return Err(EngineError::CyclicCore);
    }
    let mut ticks = 0;
    let inst = Instance::new(db, &mut ticks);
    let mut e = AcyclicEnum::new(&fc, &inst, &mut ticks)?;
    let Some(row) = e.next(&mut ticks)? else {
        return Ok(None);
    };
    let h = retraction_onto(q, &fc).ok_or_else(|| EngineError::InvalidWitness("no retraction onto the core".into()))?;
    let vars = e.vars().to_vec();
    let val = |x| {
        let y = h.apply(x);
        let i = vars.iter().position(|v| *v == y).expect("retraction lands in the core");
        inst.dict.value(row[i]).clone()
    };
    Ok(Some(AnswerTuple(q.free_vars().iter().map(val).collect())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::qmodel::parse_database;

    #[test]
    fn first_solution_of_cyclic_query_with_acyclic_core() {
        let q = fixtures::query("Q(x,y,z,w) :- R(x,y), R(y,z), R(z,w), R(w,x), R(x,x).");
        let db = parse_database("R(a,b). R(b,a). R(c,c). R(c,a). R(a,c).").unwrap();
        let a = first_solution(&q, &db).unwrap().unwrap();
        assert!(oracle_enumerate(&q, &db).contains(&a));
    }

    #[test]
    fn first_solution_rejects_triangle() {
        let q = fixtures::query(fixtures::TRIANGLE);
        let db = parse_database("R(a,b).").unwrap();
        assert!(matches!(first_solution(&q, &db), Err(EngineError::CyclicCore)));
    }
}
