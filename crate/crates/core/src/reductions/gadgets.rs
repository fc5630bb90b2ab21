//! Gadget databases reducing triangle detection to enumeration of specific
//! queries, with decoders that sort each answer into the case analysis of
//! its construction.
//!
//! Triangle labels list three vertices `(a, b, c)` with edges `a->b` and
//! `b->c`; the closing edge is `c->a` for the untangling and unbalanced
//! gadgets and `a->c` for the two spike-free cycle gadgets (see
//! [`Gadget::closes_forward`]).

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{Graph, ReductionError, BOT};
use crate::fixtures;
use crate::qmodel::{AnswerTuple, Database, Query, Value, Var};
use crate::structure::VarMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gadget {
    TriangleUntangle2,
    TriangleMirrorFig1,
    TriangleSpikeQ1,
    UtdSpikeQ4,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "label", content = "data", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GadgetLabel {
    Triangle([String; 3]),
    BotFamily,
    Node(String),
    Edge(String, String),
    /// An edge between `U` and `V`, listed as `(u, v)`.
    EdgeUv(String, String),
    /// An edge between `W` and `U`, listed as `(u, w)`.
    EdgeUw(String, String),
    Unclassified,
}

impl GadgetLabel {
    pub fn is_triangle(&self) -> bool {
        matches!(self, GadgetLabel::Triangle(_))
    }
}

impl fmt::Display for GadgetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GadgetLabel::Triangle([a, b, c]) => write!(f, "TRIANGLE({a},{b},{c})"),
            GadgetLabel::BotFamily => f.write_str("BOT_FAMILY"),
            GadgetLabel::Node(a) => write!(f, "NODE({a})"),
            GadgetLabel::Edge(a, b) => write!(f, "EDGE({a},{b})"),
            GadgetLabel::EdgeUv(u, v) => write!(f, "EDGE_UV({u},{v})"),
            GadgetLabel::EdgeUw(u, w) => write!(f, "EDGE_UW({u},{w})"),
            GadgetLabel::Unclassified => f.write_str("UNCLASSIFIED"),
        }
    }
}

/// A gadget answer split into data and variable parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetAnswer {
    /// `(data, variable)` per head position; `bot` has no variable.
    pub parts: Vec<(String, Option<Var>)>,
    /// The endomorphism read off the variable parts, when every value is a
    /// pair.
    pub variable_part: Option<VarMap>,
    /// Variables hit by the variable parts.
    pub image_vars: BTreeSet<Var>,
    pub label: GadgetLabel,
}

impl GadgetAnswer {
    /// Data of some head value whose variable part is `x`.
    fn data_at(&self, x: &str) -> Option<&str> {
        self.parts
            .iter()
            .find(|(_, v)| v.as_ref().is_some_and(|v| v.as_str() == x))
            .map(|(d, _)| d.as_str())
    }

    fn has(&self, x: &str) -> bool {
        self.image_vars.contains(&Var::new(x))
    }
}

fn p(data: &str, var: &str) -> Value {
    Value::pair(data, var)
}

fn add(db: &mut Database, sym: &str, t: Vec<Value>) {
    db.insert(sym, t).expect("gadget facts respect the schema");
}

impl Gadget {
    pub const ALL: [Gadget; 4] = [
        Gadget::TriangleUntangle2,
        Gadget::TriangleMirrorFig1,
        Gadget::TriangleSpikeQ1,
        Gadget::UtdSpikeQ4,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Gadget::TriangleUntangle2 => "triangle-untangle2",
            Gadget::TriangleMirrorFig1 => "triangle-mirrorfig1",
            Gadget::TriangleSpikeQ1 => "triangle-spike-q1",
            Gadget::UtdSpikeQ4 => "utd-spike-q4",
        }
    }

    pub fn from_id(s: &str) -> Option<Gadget> {
        Gadget::ALL.into_iter().find(|g| g.id() == s)
    }

    /// The query whose answers on the gadget database are decoded.
    pub fn query(self) -> Query {
        fixtures::query(match self {
            Gadget::TriangleUntangle2 => fixtures::UNTANGLE_Q2,
            Gadget::TriangleMirrorFig1 => fixtures::FIG1,
            Gadget::TriangleSpikeQ1 => fixtures::BLOWFISH,
            Gadget::UtdSpikeQ4 => fixtures::SPIKE_Q4,
        })
    }

    /// Whether a decoded triangle `(a, b, c)` closes with `a->c` rather than
    /// `c->a`.
    pub fn closes_forward(self) -> bool {
        matches!(self, Gadget::TriangleMirrorFig1 | Gadget::TriangleSpikeQ1)
    }

    /// The three directed edges a decoded triangle claims.
    pub fn triangle_edges(self, t: &[String; 3]) -> [(String, String); 3] {
        let [a, b, c] = t.clone();
        let close = if self.closes_forward() {
            (a.clone(), c.clone())
        } else {
            (c.clone(), a.clone())
        };
        [(a, b.clone()), (b, c), close]
    }

    /// Upper bound on the number of facts, linear in the graph.
    pub fn size_bound(self, g: &Graph) -> usize {
        let (n, m) = (g.vertices.len(), g.edges.len());
        match self {
            Gadget::TriangleUntangle2 => 5 * m + 4,
            Gadget::TriangleMirrorFig1 => 5 * m,
            Gadget::TriangleSpikeQ1 => 6 * n + 3 * m,
            Gadget::UtdSpikeQ4 => 4 * n + 2 * m,
        }
    }

    pub fn build(self, g: &Graph) -> Result<Database, ReductionError> {
        g.check_tokens()?;
        let q = self.query();
        let mut db = Database::new();
        for (sym, arity) in q.schema() {
            db.declare(&sym, arity)?;
        }
        match self {
            Gadget::TriangleUntangle2 => {
                for (a, b) in &g.edges {
                    add(&mut db, "R", vec![p(a, "x"), p(b, "y")]);
                    add(&mut db, "R", vec![p(a, "y"), p(b, "z")]);
                    add(&mut db, "R", vec![p(a, "z"), p(b, "x")]);
                    add(&mut db, "R", vec![p(BOT, "u"), p(a, "x")]);
                    add(&mut db, "R", vec![p(b, "y"), p(BOT, "v")]);
                }
                let bot = Value::atomic(BOT);
                add(&mut db, "R", vec![bot.clone(), bot.clone()]);
                add(&mut db, "R", vec![p(BOT, "u"), bot.clone()]);
                add(&mut db, "R", vec![bot.clone(), p(BOT, "v")]);
                add(&mut db, "S", vec![bot.clone(), bot.clone(), bot]);
            }
            Gadget::TriangleMirrorFig1 => {
                for (a, b) in &g.edges {
                    add(&mut db, "R", vec![p(a, "x"), p(b, "y")]);
                    add(&mut db, "R", vec![p(b, "y"), p(b, "z")]);
                    add(&mut db, "R", vec![p(a, "x"), p(b, "u")]);
                    add(&mut db, "R", vec![p(a, "u"), p(b, "z")]);
                    add(&mut db, "P", vec![p(b, "y")]);
                }
            }
            Gadget::TriangleSpikeQ1 => {
                for a in &g.vertices {
                    add(&mut db, "R", vec![p(a, "x1"), p(a, "x2")]);
                    add(&mut db, "R", vec![p(a, "x2"), p(a, "x3")]);
                    add(&mut db, "R", vec![p(a, "x4"), p(a, "x3")]);
                    add(&mut db, "R", vec![p(a, "x5"), p(a, "x4")]);
                    add(&mut db, "R", vec![p(a, "x1"), p(a, "x8")]);
                    add(&mut db, "P", vec![p(a, "x2")]);
                }
                for (a, b) in &g.edges {
                    add(&mut db, "R", vec![p(a, "x5"), p(b, "x6")]);
                    add(&mut db, "R", vec![p(a, "x6"), p(b, "x7")]);
                    add(&mut db, "R", vec![p(a, "x8"), p(b, "x7")]);
                }
            }
            Gadget::UtdSpikeQ4 => {
                let parts = g.parts.as_ref().ok_or(ReductionError::PartsMissing)?;
                for u in &parts[0] {
                    add(&mut db, "R", vec![p(u, "x1"), p(u, "x2")]);
                    add(&mut db, "R", vec![p(u, "x2"), p(u, "x3")]);
                    add(&mut db, "R", vec![p(u, "x4"), p(u, "x3")]);
                    add(&mut db, "P", vec![p(u, "x2")]);
                }
                for (a, b) in &g.edges {
                    match (g.part_of(a), g.part_of(b)) {
                        (Some(0), Some(1)) => {
                            let uv = format!("{a}#{b}");
                            add(&mut db, "R", vec![p(&uv, "x5"), p(a, "x4")]);
                            add(&mut db, "R", vec![p(&uv, "x5"), p(b, "x6")]);
                        }
                        (Some(1), Some(2)) => add(&mut db, "R", vec![p(a, "x6"), p(b, "x7")]),
                        (Some(2), Some(0)) => {
                            let wu = format!("{a}#{b}");
                            add(&mut db, "R", vec![p(b, "x1"), p(&wu, "x8")]);
                            add(&mut db, "R", vec![p(&wu, "x8"), p(a, "x7")]);
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(db)
    }

    /// Splits an answer of [`Gadget::query`] and labels it.
    pub fn decode(self, ans: &AnswerTuple) -> Result<GadgetAnswer, ReductionError> {
        let q = self.query();
        if ans.len() != q.arity() {
            return Err(ReductionError::SchemaMismatch(format!(
                "answer has {} values, query head has {}",
                ans.len(),
                q.arity()
            )));
        }
        let mut parts = Vec::new();
        for v in ans.values() {
            parts.push(match v {
                Value::Pair { data, var } => (data.clone(), Some(var.clone())),
                Value::Atomic(s) if s == BOT => (s.clone(), None),
                Value::Atomic(_) => return Err(ReductionError::NonPair(v.to_string())),
            });
        }
        let variable_part = if parts.iter().all(|(_, v)| v.is_some()) {
            let m = VarMap::from_pairs(
                q.free_vars()
                    .iter()
                    .cloned()
                    .zip(parts.iter().map(|(_, v)| v.clone().unwrap())),
            );
            if !m.is_endomorphism_of(&q) {
                return Err(ReductionError::NotEndomorphism);
            }
            Some(m)
        } else {
            None
        };
        let image_vars = parts.iter().filter_map(|(_, v)| v.clone()).collect();
        let mut out = GadgetAnswer {
            parts,
            variable_part,
            image_vars,
            label: GadgetLabel::Unclassified,
        };
        out.label = self.label(&out);
        Ok(out)
    }

    fn label(self, a: &GadgetAnswer) -> GadgetLabel {
        let s = |x: &str| a.data_at(x).map(str::to_string);
        match self {
            Gadget::TriangleUntangle2 => {
                let head = self.query().free_vars().to_vec();
                let at = |x: &str| {
                    let i = head.iter().position(|v| v.as_str() == x).unwrap();
                    a.parts[i].0.clone()
                };
                let t = [at("x"), at("y"), at("z")];
                if t.iter().any(|d| d == BOT) {
                    GadgetLabel::BotFamily
                } else {
                    GadgetLabel::Triangle(t)
                }
            }
            Gadget::TriangleMirrorFig1 => match (s("x"), s("y"), s("z"), s("u")) {
                (Some(x), _, Some(z), Some(u)) => GadgetLabel::Triangle([x, u, z]),
                (Some(x), Some(y), _, None) => GadgetLabel::Edge(x, y),
                _ => GadgetLabel::Unclassified,
            },
            Gadget::TriangleSpikeQ1 => {
                if ["x6", "x7", "x8"].iter().all(|x| !a.has(x)) {
                    s("x1").map_or(GadgetLabel::Unclassified, GadgetLabel::Node)
                } else if !a.has("x6") && !a.has("x4") {
                    match (s("x1"), s("x7")) {
                        (Some(x), Some(y)) => GadgetLabel::Edge(x, y),
                        _ => GadgetLabel::Unclassified,
                    }
                } else {
                    match (s("x1"), s("x6"), s("x7")) {
                        (Some(x), Some(y), Some(z)) => GadgetLabel::Triangle([x, y, z]),
                        _ => GadgetLabel::Unclassified,
                    }
                }
            }
            Gadget::UtdSpikeQ4 => {
                // the case analysis looks at where the cycle lands; spikes
                // may fold onto any cycle variable
                let head = self.query().free_vars().to_vec();
                let cycle: BTreeSet<&str> = head
                    .iter()
                    .zip(&a.parts)
                    .filter(|(x, _)| !x.as_str().starts_with('s'))
                    .filter_map(|(_, (_, v))| v.as_ref().map(Var::as_str))
                    .collect();
                let has = |x: &str| cycle.contains(x);
                let all = (1..=8).all(|i| has(&format!("x{i}")));
                let only_top = (4..=8).all(|i| !has(&format!("x{i}")));
                match (all, only_top, has("x4"), has("x8")) {
                    (true, ..) => match (s("x1"), s("x6"), s("x7")) {
                        (Some(u), Some(v), Some(w)) => GadgetLabel::Triangle([u, v, w]),
                        _ => GadgetLabel::Unclassified,
                    },
                    (false, true, ..) => s("x1").map_or(GadgetLabel::Unclassified, GadgetLabel::Node),
                    (false, false, false, true) => match (s("x1"), s("x7")) {
                        (Some(u), Some(w)) => GadgetLabel::EdgeUw(u, w),
                        _ => GadgetLabel::Unclassified,
                    },
                    (false, false, true, false) => match s("x5").and_then(|d| {
                        d.split_once('#').map(|(u, v)| (u.to_string(), v.to_string()))
                    }) {
                        Some((u, v)) => GadgetLabel::EdgeUv(u, v),
                        None => GadgetLabel::Unclassified,
                    },
                    _ => GadgetLabel::Unclassified,
                }
            }
        }
    }
}
