//! Constant-delay enumeration of mirror queries. Image answers are grouped
//! by their shared-variable values; each new completion is paired with every
//! completion seen before under the same key, in both directions.

use std::collections::HashMap;
use std::sync::Arc;

use super::acyclic::AcyclicEnum;
use super::cursor::{EnumerationCursor, Enumerate};
use super::instance::Instance;
use super::EngineError;
use crate::qmodel::{Database, Query, Var};
use crate::structure::MirrorWitness;

enum Step {
    Diagonal,
    Pair { idx: usize, swapped: bool },
}

struct MirrorEnum {
    vars: Vec<Var>,
    image: AcyclicEnum,
    shared_pos: Vec<usize>,
    private_pos: Vec<usize>,
    /// For each rest-only variable, its image under the isomorphism as an
    /// index into the private part.
    rest_from: Vec<usize>,
    table: HashMap<Vec<u32>, Vec<Vec<u32>>>,
    current: Option<(Vec<u32>, Vec<u32>, usize, Step)>,
}

impl MirrorEnum {
    fn row(&self, key: &[u32], left: &[u32], right: &[u32]) -> Vec<u32> {
        let mut out = vec![0; self.shared_pos.len() + self.private_pos.len()];
        for (i, &p) in self.shared_pos.iter().enumerate() {
            out[p] = key[i];
        }
        for (i, &p) in self.private_pos.iter().enumerate() {
            out[p] = left[i];
        }
        out.extend(self.rest_from.iter().map(|&i| right[i]));
        out
    }
}

impl Enumerate for MirrorEnum {
    fn vars(&self) -> &[Var] {
        &self.vars
    }

    fn next(&mut self, ticks: &mut u64) -> Result<Option<Vec<u32>>, EngineError> {
        loop {
            if let Some((key, b, len, step)) = self.current.take() {
                match step {
                    Step::Diagonal => {
                        let out = self.row(&key, &b, &b);
                        self.current = Some((key, b, len, Step::Pair { idx: 0, swapped: false }));
                        return Ok(Some(out));
                    }
                    Step::Pair { idx, swapped } if idx < len => {
                        *ticks += 1;
                        let other = &self.table[&key][idx];
                        let out = if swapped {
                            self.row(&key, other, &b)
                        } else {
                            self.row(&key, &b, other)
                        };
                        let next = if swapped {
                            Step::Pair { idx: idx + 1, swapped: false }
                        } else {
                            Step::Pair { idx, swapped: true }
                        };
                        self.current = Some((key, b, len, next));
                        return Ok(Some(out));
                    }
                    Step::Pair { .. } => {
                        *ticks += 1;
                        self.table.entry(key).or_default().push(b);
                    }
                }
            }
            let Some(a) = self.image.next(ticks)? else {
                return Ok(None);
            };
            *ticks += 1;
            let key: Vec<u32> = self.shared_pos.iter().map(|&p| a[p]).collect();
            let b: Vec<u32> = self.private_pos.iter().map(|&p| a[p]).collect();
            let len = self.table.get(&key).map_or(0, Vec::len);
            self.current = Some((key, b, len, Step::Diagonal));
        }
    }
}

/// Enumerates a mirror query from a validated witness.
pub fn enum_mirror(q: &Query, w: &MirrorWitness, db: &Database) -> Result<EnumerationCursor, EngineError> {
    if !q.is_full() {
        return Err(EngineError::NotFull);
    }
    if !w.validate(q) {
        return Err(EngineError::InvalidWitness("mirror decomposition does not match the query".into()));
    }
    let mut ticks = 0;
    let inst = Instance::new(db, &mut ticks);
    let image = AcyclicEnum::new(&w.image, &inst, &mut ticks)?;
    let ivars = w.image.vars();
    let shared = w.shared();
    let shared_pos: Vec<usize> = ivars.iter().enumerate().filter(|(_, v)| shared.contains(v)).map(|(i, _)| i).collect();
    let private_pos: Vec<usize> = ivars.iter().enumerate().filter(|(_, v)| !shared.contains(v)).map(|(i, _)| i).collect();
    let rest_only: Vec<Var> = w.rest.vars().into_iter().filter(|v| !shared.contains(v)).collect();
    let rest_from = rest_only
        .iter()
        .map(|r| {
            let target = w.iso.apply(r);
            private_pos.iter().position(|&p| ivars[p] == target).expect("isomorphism maps onto private image variables")
        })
        .collect();
    let mut vars = ivars.clone();
    vars.extend(rest_only);
    let e = MirrorEnum {
        vars,
        image,
        shared_pos,
        private_pos,
        rest_from,
        table: HashMap::new(),
        current: None,
    };
    Ok(EnumerationCursor::new(Box::new(e), Arc::clone(&inst.dict), q.free_vars(), ticks))
}
