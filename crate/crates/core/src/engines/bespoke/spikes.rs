//! Constant-delay strategies for two spiked variants of the eight-cycle.
//!
//! Both emit, besides the genuine cycle answers, the answers induced by a few
//! acyclic images. Those come cheaply and pay for the joins that follow;
//! every answer is produced at most a constant number of times, and the
//! caller removes repeats.

use std::collections::HashMap;

use super::{atoms, covering_hom, lift_columns, Edges, Odo, Producer, Step};
use crate::engines::acyclic::AcyclicEnum;
use crate::engines::cursor::Enumerate;
use crate::engines::instance::Instance;
use crate::engines::EngineError;
use crate::qmodel::{Query, Var};

/// An acyclic image enumerated on its own, with the map lifting its answers
/// to answers of the whole query.
struct ImageSide {
    vars: Vec<Var>,
    lift: Vec<usize>,
}

impl ImageSide {
    fn new(q: &Query, img: &Query) -> Result<Self, EngineError> {
        let h = covering_hom(q, img)
            .ok_or_else(|| EngineError::InvalidWitness(format!("no covering homomorphism onto {img}")))?;
        let vars = img.vars();
        Ok(ImageSide {
            lift: lift_columns(&q.vars(), &h, &vars),
            vars,
        })
    }

    fn col(&self, name: &str) -> usize {
        self.vars.iter().position(|v| v.as_str() == name).expect("image variable")
    }

    /// An image answer given by name.
    fn row(&self, vals: &[(&str, u32)]) -> Vec<u32> {
        let mut r = vec![0; self.vars.len()];
        for (n, v) in vals {
            r[self.col(n)] = *v;
        }
        r
    }

    fn lifted(&self, row: &[u32]) -> Vec<u32> {
        self.lift.iter().map(|&c| row[c]).collect()
    }
}

fn index(vars: &[Var]) -> impl Fn(&str) -> usize + '_ {
    move |n| vars.iter().position(|v| v.as_str() == n).expect("fixture variable")
}

const TOP2: [&str; 6] = ["R(x1,x2)", "R(x2,x3)", "R(x1,x8)", "R(x8,x7)", "R(x6,x7)", "P(x2)"];
const LEFT2: [&str; 6] = ["R(x1,x2)", "R(x2,x3)", "R(x4,x3)", "R(x5,x4)", "R(x5,x6)", "P(x2)"];

/// The cycle with spikes `x5->s6` and `s4->x7`. Top-image answers are filed
/// by `(x1,x2,x3,x6)`; each left-image answer is then joined with the
/// filed `(x8,x7)` pairs and extended by the spikes.
pub(super) struct SpikeQ2 {
    vars: Vec<Var>,
    e: Edges,
    top: AcyclicEnum,
    left: AcyclicEnum,
    top_side: ImageSide,
    left_side: ImageSide,
    table: HashMap<[u32; 4], Vec<(u32, u32)>>,
    on_left: bool,
    /// Current left answer, position in its table list and spike counter.
    cross: Option<(Vec<u32>, usize, Option<Odo>)>,
}

impl SpikeQ2 {
    pub fn new(q: &Query, inst: &Instance, e: Edges, ticks: &mut u64) -> Result<Self, EngineError> {
        let top_q = atoms(q, &TOP2);
        let left_q = atoms(q, &LEFT2);
        Ok(SpikeQ2 {
            vars: q.vars(),
            top: AcyclicEnum::new(&top_q, inst, ticks)?,
            left: AcyclicEnum::new(&left_q, inst, ticks)?,
            top_side: ImageSide::new(q, &top_q)?,
            left_side: ImageSide::new(q, &left_q)?,
            e,
            table: HashMap::new(),
            on_left: false,
            cross: None,
        })
    }

    fn key(side: &ImageSide, row: &[u32]) -> [u32; 4] {
        ["x1", "x2", "x3", "x6"].map(|n| row[side.col(n)])
    }
}

impl Producer for SpikeQ2 {
    fn vars(&self) -> &[Var] {
        &self.vars
    }

    fn step(&mut self, ticks: &mut u64) -> Step {
        *ticks += 1;
        if let Some((lrow, i, odo)) = &mut self.cross {
            let key = Self::key(&self.left_side, lrow);
            let list = &self.table[&key];
            if *i >= list.len() {
                self.cross = None;
                return Step::Work;
            }
            let (x8, x7) = list[*i];
            let x5 = lrow[self.left_side.col("x5")];
            let (outs, ins) = (self.e.g.out(x5), self.e.g.inc(x7));
            let o = odo.get_or_insert_with(|| Odo::new(vec![outs.len(), ins.len()]));
            let at = index(&self.vars);
            let mut row = vec![0; self.vars.len()];
            for n in ["x1", "x2", "x3", "x4", "x5", "x6"] {
                row[at(n)] = lrow[self.left_side.col(n)];
            }
            row[at("x7")] = x7;
            row[at("x8")] = x8;
            row[at("s6")] = outs[o.idx[0]];
            row[at("s4")] = ins[o.idx[1]];
            if !o.advance() {
                *i += 1;
                *odo = None;
            }
            return Step::Emit(row);
        }
        if !self.on_left {
            return match self.top.next(ticks).ok().flatten() {
                Some(r) => {
                    let s = &self.top_side;
                    let pair = (r[s.col("x8")], r[s.col("x7")]);
                    self.table.entry(Self::key(s, &r)).or_default().push(pair);
                    Step::Emit(s.lifted(&r))
                }
                None => {
                    self.on_left = true;
                    Step::Work
                }
            };
        }
        match self.left.next(ticks).ok().flatten() {
            Some(r) => {
                let out = self.left_side.lifted(&r);
                if self.table.contains_key(&Self::key(&self.left_side, &r)) {
                    self.cross = Some((r, 0, None));
                }
                Step::Emit(out)
            }
            None => Step::Done,
        }
    }
}

const SMALL3: [&str; 5] = ["R(x1,x8)", "R(x1,x2)", "R(x2,x3)", "R(x4,x3)", "P(x2)"];
const LEFT3: [&str; 10] = [
    "R(x1,x2)", "R(x2,x3)", "R(x4,x3)", "R(x5,x4)", "R(x1,s1)", "R(s2,x3)", "R(s5,x4)", "R(x5,s6)", "R(x5,s7)",
    "P(x2)",
];
const TOP3: [&str; 8] = [
    "R(x1,x8)", "R(x8,x7)", "R(x1,x2)", "R(x2,x3)", "R(x8,s3)", "R(x1,s1)", "R(s2,x3)", "P(x2)",
];

enum Stage {
    Next,
    /// Answers of the left image: `x5, s5` into `a`, `s6, s7` out of `x5`.
    Left { i5: usize, odo: Option<Odo> },
    /// Files every `x6` reachable as `a <- x5 -> x6` with its `x5`s.
    Build { i5: usize, j: usize },
    /// Answers of the top image: `x7, s3` out of `b`.
    Top { odo: Option<Odo> },
    /// Tests each filed `x6` against each `x7` out of `b`.
    Cross { k: usize, j: usize },
    /// Full cycle answers with all spike choices.
    Emit { m: usize, k5: usize, odo: Option<Odo> },
}

/// The cycle with six spikes. For each answer of the small image
/// `x8 <- x1 -> x2 -> x3 <- x4` (with `a = x4`, `b = x8`) the strategy emits
/// that answer, the left-image answers around `a`, the top-image answers
/// around `b`, then the edges `x6 -> x7` between the two sides. The test
/// costs at most as many steps as the image answers emitted before it.
pub(super) struct SpikeQ3 {
    vars: Vec<Var>,
    e: Edges,
    small: AcyclicEnum,
    small_side: ImageSide,
    left_side: ImageSide,
    top_side: ImageSide,
    cur: [u32; 5],
    tp: HashMap<u32, Vec<u32>>,
    tp_keys: Vec<u32>,
    matches: Vec<(u32, u32)>,
    stage: Stage,
}

impl SpikeQ3 {
    pub fn new(q: &Query, inst: &Instance, e: Edges, ticks: &mut u64) -> Result<Self, EngineError> {
        let small_q = atoms(q, &SMALL3);
        Ok(SpikeQ3 {
            vars: q.vars(),
            small: AcyclicEnum::new(&small_q, inst, ticks)?,
            small_side: ImageSide::new(q, &small_q)?,
            left_side: ImageSide::new(q, &atoms(q, &LEFT3))?,
            top_side: ImageSide::new(q, &atoms(q, &TOP3))?,
            e,
            cur: [0; 5],
            tp: HashMap::new(),
            tp_keys: Vec::new(),
            matches: Vec::new(),
            stage: Stage::Next,
        })
    }
}

impl Producer for SpikeQ3 {
    fn vars(&self) -> &[Var] {
        &self.vars
    }

    fn step(&mut self, ticks: &mut u64) -> Step {
        *ticks += 1;
        let [x1, x2, x3, a, b] = self.cur;
        let g = &self.e.g;
        match &mut self.stage {
            Stage::Next => {
                let Some(r) = self.small.next(ticks).ok().flatten() else {
                    return Step::Done;
                };
                let s = &self.small_side;
                self.cur = ["x1", "x2", "x3", "x4", "x8"].map(|n| r[s.col(n)]);
                *ticks += (self.tp_keys.len() + self.matches.len()) as u64;
                self.tp.clear();
                self.tp_keys.clear();
                self.matches.clear();
                self.stage = Stage::Left { i5: 0, odo: None };
                Step::Emit(s.lifted(&r))
            }
            Stage::Left { i5, odo } => {
                let ins = g.inc(a);
                let Some(&x5) = ins.get(*i5) else {
                    self.stage = Stage::Build { i5: 0, j: 0 };
                    return Step::Work;
                };
                let outs = g.out(x5);
                let o = odo.get_or_insert_with(|| Odo::new(vec![ins.len(), outs.len(), outs.len()]));
                let row = self.left_side.row(&[
                    ("x1", x1),
                    ("x2", x2),
                    ("x3", x3),
                    ("x4", a),
                    ("x5", x5),
                    ("s1", b),
                    ("s2", a),
                    ("s5", ins[o.idx[0]]),
                    ("s6", outs[o.idx[1]]),
                    ("s7", outs[o.idx[2]]),
                ]);
                if !o.advance() {
                    *i5 += 1;
                    *odo = None;
                }
                Step::Emit(self.left_side.lifted(&row))
            }
            Stage::Build { i5, j } => {
                let Some(&x5) = g.inc(a).get(*i5) else {
                    self.stage = Stage::Top { odo: None };
                    return Step::Work;
                };
                match g.out(x5).get(*j) {
                    Some(&x6) => {
                        let list = self.tp.entry(x6).or_default();
                        if list.is_empty() {
                            self.tp_keys.push(x6);
                        }
                        list.push(x5);
                        *j += 1;
                    }
                    None => {
                        *i5 += 1;
                        *j = 0;
                    }
                }
                Step::Work
            }
            Stage::Top { odo } => {
                let outs = g.out(b);
                let o = odo.get_or_insert_with(|| Odo::new(vec![outs.len(), outs.len()]));
                if o.is_empty() {
                    self.stage = Stage::Cross { k: 0, j: 0 };
                    return Step::Work;
                }
                let row = self.top_side.row(&[
                    ("x1", x1),
                    ("x2", x2),
                    ("x3", x3),
                    ("x7", outs[o.idx[0]]),
                    ("x8", b),
                    ("s1", x2),
                    ("s2", a),
                    ("s3", outs[o.idx[1]]),
                ]);
                if !o.advance() {
                    self.stage = Stage::Cross { k: 0, j: 0 };
                }
                Step::Emit(self.top_side.lifted(&row))
            }
            Stage::Cross { k, j } => {
                let Some(&x6) = self.tp_keys.get(*k) else {
                    self.stage = Stage::Emit { m: 0, k5: 0, odo: None };
                    return Step::Work;
                };
                match g.out(b).get(*j) {
                    Some(&x7) => {
                        if g.has(x6, x7, ticks) {
                            self.matches.push((x6, x7));
                        }
                        *j += 1;
                    }
                    None => {
                        *k += 1;
                        *j = 0;
                    }
                }
                Step::Work
            }
            Stage::Emit { m, k5, odo } => {
                let Some(&(x6, x7)) = self.matches.get(*m) else {
                    self.stage = Stage::Next;
                    return Step::Work;
                };
                let Some(&x5) = self.tp[&x6].get(*k5) else {
                    *m += 1;
                    *k5 = 0;
                    return Step::Work;
                };
                let (o1, i3, ob, ia, o5) = (g.out(x1), g.inc(x3), g.out(b), g.inc(a), g.out(x5));
                let o = odo.get_or_insert_with(|| {
                    Odo::new(vec![o1.len(), i3.len(), ob.len(), ia.len(), o5.len(), o5.len()])
                });
                let at = index(&self.vars);
                let mut row = vec![0; self.vars.len()];
                for (n, v) in [
                    ("x1", x1),
                    ("x2", x2),
                    ("x3", x3),
                    ("x4", a),
                    ("x5", x5),
                    ("x6", x6),
                    ("x7", x7),
                    ("x8", b),
                    ("s1", o1[o.idx[0]]),
                    ("s2", i3[o.idx[1]]),
                    ("s3", ob[o.idx[2]]),
                    ("s5", ia[o.idx[3]]),
                    ("s6", o5[o.idx[4]]),
                    ("s7", o5[o.idx[5]]),
                ] {
                    row[at(n)] = v;
                }
                if !o.advance() {
                    *k5 += 1;
                    *odo = None;
                }
                Step::Emit(row)
            }
        }
    }
}
