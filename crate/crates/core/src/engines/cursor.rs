use std::collections::{HashMap, VecDeque};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use super::instance::Dict;
use super::EngineError;
use crate::qmodel::{AnswerTuple, Var};

/// A stream of answers over interned ids. Every elementary step adds to
/// `ticks`.
pub(crate) trait Enumerate: Send {
    /// Column order of the emitted tuples.
    fn vars(&self) -> &[Var];
    fn next(&mut self, ticks: &mut u64) -> Result<Option<Vec<u32>>, EngineError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Preprocessing,
    Enumerating,
    Done,
}

/// Preprocess-then-next answer stream with a tick counter.
pub struct EnumerationCursor {
    inner: Box<dyn Enumerate>,
    dict: Arc<Dict>,
    columns: Vec<usize>,
    phase: Phase,
    ticks: u64,
    preprocessing_ticks: u64,
}

impl EnumerationCursor {
    /// `head` fixes the output column order; every head variable must be a
    /// column of `inner`.
    pub(crate) fn new(
        inner: Box<dyn Enumerate>,
        dict: Arc<Dict>,
        head: &[Var],
        preprocessing_ticks: u64,
    ) -> Self {
        let columns = head
            .iter()
            .map(|v| {
                inner
                    .vars()
                    .iter()
                    .position(|w| w == v)
                    .expect("head variable produced by engine")
            })
            .collect();
        EnumerationCursor {
            inner,
            dict,
            columns,
            phase: Phase::Enumerating,
            ticks: preprocessing_ticks,
            preprocessing_ticks,
        }
    }

    /// A cursor replaying fixed answers, charging `gap` ticks before each.
    pub fn from_answers(answers: Vec<AnswerTuple>, gap: u64) -> Self {
        let mut dict = Dict::default();
        let width = answers.first().map_or(0, |a| a.len());
        let vars: Vec<Var> = (0..width).map(|i| Var::new(format!("c{i}"))).collect();
        let rows = answers
            .iter()
            .map(|a| a.values().iter().map(|v| dict.intern(v)).collect())
            .collect();
        let src = Replay {
            vars: vars.clone(),
            rows,
            pos: 0,
            gap,
        };
        EnumerationCursor::new(Box::new(src), Arc::new(dict), &vars, 0)
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn ticks(&self) -> u64 {
        self.ticks
    }

    pub fn preprocessing_ticks(&self) -> u64 {
        self.preprocessing_ticks
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn next_answer(&mut self) -> Result<Option<AnswerTuple>, EngineError> {
        if self.phase == Phase::Done {
            return Ok(None);
        }
        match self.inner.next(&mut self.ticks) {
            Ok(Some(row)) => {
                self.ticks += 1;
                Ok(Some(AnswerTuple(
                    self.columns
                        .iter()
                        .map(|&c| self.dict.value(row[c]).clone())
                        .collect(),
                )))
            }
            Ok(None) => {
                self.phase = Phase::Done;
                Ok(None)
            }
            Err(e) => {
                self.phase = Phase::Done;
                Err(e)
            }
        }
    }

    /// Deconstructs into the raw stream, already projected to head order.
    pub(crate) fn into_raw(self) -> (Box<dyn Enumerate>, Arc<Dict>, u64) {
        let vars: Vec<Var> = self.columns.iter().map(|&c| self.inner.vars()[c].clone()).collect();
        let inner = Box::new(Project {
            inner: self.inner,
            columns: self.columns,
            vars,
        });
        (inner, self.dict, self.ticks)
    }

    pub(crate) fn head_vars(&self) -> Vec<Var> {
        self.columns.iter().map(|&c| self.inner.vars()[c].clone()).collect()
    }
}

impl Iterator for EnumerationCursor {
    type Item = Result<AnswerTuple, EngineError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_answer().transpose()
    }
}

struct Replay {
    vars: Vec<Var>,
    rows: Vec<Vec<u32>>,
    pos: usize,
    gap: u64,
}

impl Enumerate for Replay {
    fn vars(&self) -> &[Var] {
        &self.vars
    }

    fn next(&mut self, ticks: &mut u64) -> Result<Option<Vec<u32>>, EngineError> {
        *ticks += self.gap;
        let r = self.rows.get(self.pos).cloned();
        self.pos += 1;
        Ok(r)
    }
}

struct Project {
    inner: Box<dyn Enumerate>,
    columns: Vec<usize>,
    vars: Vec<Var>,
}

impl Enumerate for Project {
    fn vars(&self) -> &[Var] {
        &self.vars
    }

    fn next(&mut self, ticks: &mut u64) -> Result<Option<Vec<u32>>, EngineError> {
        Ok(self
            .inner
            .next(ticks)?
            .map(|r| self.columns.iter().map(|&c| r[c]).collect()))
    }
}

/// Bounded-multiplicity deduplication. Each emission pulls up to `c` inner
/// answers into a FIFO of first occurrences, so the output gap stays within
/// `c` inner gaps.
struct Dedup {
    inner: Box<dyn Enumerate>,
    c: usize,
    seen: HashMap<Vec<u32>, usize>,
    queue: VecDeque<Vec<u32>>,
    exhausted: bool,
}

impl Enumerate for Dedup {
    fn vars(&self) -> &[Var] {
        self.inner.vars()
    }

    fn next(&mut self, ticks: &mut u64) -> Result<Option<Vec<u32>>, EngineError> {
        loop {
            let mut pulled = 0;
            while !self.exhausted && pulled < self.c {
                pulled += 1;
                match self.inner.next(ticks)? {
                    None => self.exhausted = true,
                    Some(row) => {
                        *ticks += 1;
                        let n = self.seen.entry(row.clone()).or_insert(0);
                        *n += 1;
                        if *n > self.c {
                            return Err(EngineError::CheaterViolation { c: self.c, count: *n });
                        }
                        if *n == 1 {
                            self.queue.push_back(row);
                        }
                    }
                }
            }
            if let Some(r) = self.queue.pop_front() {
                return Ok(Some(r));
            }
            if self.exhausted {
                return Ok(None);
            }
        }
    }
}

/// Removes duplicates from a stream that repeats each answer at most `c`
/// times; more repetitions surface as a violation error.
pub fn cheater_dedup(inner: EnumerationCursor, c: usize) -> EnumerationCursor {
    let head = inner.head_vars();
    let (raw, dict, ticks) = inner.into_raw();
    let d = Dedup {
        inner: raw,
        c: c.max(1),
        seen: HashMap::new(),
        queue: VecDeque::new(),
        exhausted: false,
    };
    EnumerationCursor::new(Box::new(d), dict, &head, ticks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DelayStats {
    pub preprocessing_ticks: u64,
    /// Largest tick distance between consecutive emissions, counting the
    /// stretch before the first and after the last.
    pub max_gap: u64,
    pub answers: u64,
    pub wall_ms: u64,
}

/// Runs a cursor to completion and records its delay profile.
pub fn measure_delay(
    make_cursor: impl FnOnce() -> Result<EnumerationCursor, EngineError>,
) -> Result<DelayStats, EngineError> {
    let start = Instant::now();
    let mut cur = make_cursor()?;
    let pre = cur.preprocessing_ticks();
    let mut last = pre;
    let mut max_gap = 0;
    let mut answers = 0;
    while cur.next_answer()?.is_some() {
        let t = cur.ticks();
        max_gap = max_gap.max(t - last);
        last = t;
        answers += 1;
    }
    max_gap = max_gap.max(cur.ticks() - last);
    Ok(DelayStats {
        preprocessing_ticks: pre,
        max_gap,
        answers,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// Drains a cursor into a vector.
pub fn collect_answers(cur: EnumerationCursor) -> Result<Vec<AnswerTuple>, EngineError> {
    cur.collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmodel::Value;

    fn stream(xs: &[&str]) -> Vec<AnswerTuple> {
        xs.iter().map(|s| AnswerTuple(vec![Value::atomic(*s)])).collect()
    }

    #[test]
    fn dedup_pairs() {
        let cur = EnumerationCursor::from_answers(stream(&["a", "a", "b", "b", "c", "c"]), 1);
        let out = collect_answers(cheater_dedup(cur, 2)).unwrap();
        assert_eq!(out, stream(&["a", "b", "c"]));
    }

    #[test]
    fn dedup_violation() {
        let cur = EnumerationCursor::from_answers(stream(&["a", "b", "a"]), 1);
        let err = collect_answers(cheater_dedup(cur, 1)).unwrap_err();
        assert!(matches!(err, EngineError::CheaterViolation { c: 1, count: 2 }));
    }

    #[test]
    fn delay_of_replay() {
        let s = measure_delay(|| Ok(EnumerationCursor::from_answers(stream(&["a", "b"]), 5))).unwrap();
        assert_eq!(s.answers, 2);
        assert_eq!(s.max_gap, 6);
        assert_eq!(s.preprocessing_ticks, 0);
    }
}
