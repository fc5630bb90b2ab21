use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ReductionError;
use crate::qmodel::{Database, Value};

/// A directed graph, optionally split into three parts `U`, `V`, `W`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    pub vertices: BTreeSet<String>,
    pub edges: BTreeSet<(String, String)>,
    pub parts: Option<[BTreeSet<String>; 3]>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: impl Into<String>) {
        self.vertices.insert(v.into());
    }

    pub fn add_edge(&mut self, a: impl Into<String>, b: impl Into<String>) {
        let (a, b) = (a.into(), b.into());
        self.vertices.insert(a.clone());
        self.vertices.insert(b.clone());
        self.edges.insert((a, b));
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        self.edges.contains(&(a.to_string(), b.to_string()))
    }

    pub fn is_valid(&self) -> bool {
        let ends_ok = self
            .edges
            .iter()
            .all(|(a, b)| self.vertices.contains(a) && self.vertices.contains(b));
        let parts_ok = self.parts.as_ref().map_or(true, |p| {
            let mut all = BTreeSet::new();
            p.iter().all(|s| s.iter().all(|v| all.insert(v.clone()))) && all == self.vertices
        });
        ends_ok && parts_ok
    }

    /// Part index (0 = U, 1 = V, 2 = W) of a vertex.
    pub fn part_of(&self, v: &str) -> Option<usize> {
        self.parts.as_ref()?.iter().position(|p| p.contains(v))
    }

    /// Identifiers usable as database tokens; `bot` and `#` are reserved.
    pub(crate) fn check_tokens(&self) -> Result<(), ReductionError> {
        for v in &self.vertices {
            let ok = !v.is_empty()
                && v.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
            if !ok || v == super::BOT {
                return Err(ReductionError::ReservedToken(v.clone()));
            }
        }
        Ok(())
    }

    /// The graph as a database with one binary relation `E` and a unary `V`.
    pub fn to_database(&self) -> Database {
        let mut db = Database::new();
        db.declare("E", 2).unwrap();
        db.declare("V", 1).unwrap();
        for v in &self.vertices {
            db.insert("V", vec![Value::atomic(v.as_str())]).unwrap();
        }
        for (a, b) in &self.edges {
            db.insert("E", vec![Value::atomic(a.as_str()), Value::atomic(b.as_str())])
                .unwrap();
        }
        db
    }
}

/// Parses an edge list: one `u v` pair per line, `#` comments, an optional
/// `#parts U:a,b V:c W:d` header, and single tokens for isolated vertices.
pub fn parse_graph(text: &str) -> Result<Graph, ReductionError> {
    let mut g = Graph::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        let err = |msg: &str| ReductionError::GraphSyntax {
            line: i + 1,
            msg: msg.to_string(),
        };
        if let Some(rest) = line.strip_prefix("#parts") {
            let mut parts: [BTreeSet<String>; 3] = Default::default();
            let mut seen = [false; 3];
            for field in rest.split_whitespace() {
                let (name, list) = field.split_once(':').ok_or_else(|| err("expected PART:v1,v2"))?;
                let k = match name {
                    "U" => 0,
                    "V" => 1,
                    "W" => 2,
                    _ => return Err(err("part name must be U, V or W")),
                };
                seen[k] = true;
                for v in list.split(',').filter(|s| !s.is_empty()) {
                    parts[k].insert(v.to_string());
                    g.vertices.insert(v.to_string());
                }
            }
            if seen != [true; 3] {
                return Err(err("parts header needs U, V and W"));
            }
            g.parts = Some(parts);
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [v] => g.add_vertex(*v),
            [a, b] => g.add_edge(*a, *b),
            _ => return Err(err("expected `u v`")),
        }
    }
    if !g.is_valid() {
        return Err(ReductionError::GraphSyntax {
            line: 0,
            msg: "parts do not partition the vertices".into(),
        });
    }
    g.check_tokens()?;
    Ok(g)
}

pub fn serialize_graph(g: &Graph) -> String {
    let mut out = String::new();
    if let Some(p) = &g.parts {
        let list = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(",");
        writeln!(out, "#parts U:{} V:{} W:{}", list(&p[0]), list(&p[1]), list(&p[2])).unwrap();
    }
    let touched: BTreeSet<&String> = g.edges.iter().flat_map(|(a, b)| [a, b]).collect();
    for v in &g.vertices {
        if !touched.contains(v) && g.parts.is_none() {
            writeln!(out, "{v}").unwrap();
        }
    }
    for (a, b) in &g.edges {
        writeln!(out, "{a} {b}").unwrap();
    }
    out
}

/// `n` vertices `v0..` and `m` distinct loop-free edges (fewer if the graph
/// would be complete).
pub fn gen_random_graph(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new();
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    for v in &names {
        g.add_vertex(v.clone());
    }
    let m = m.min(n * n.saturating_sub(1));
    if 2 * m > n * n.saturating_sub(1) {
        let mut all: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        all.shuffle(&mut rng);
        for (a, b) in all.into_iter().take(m) {
            g.add_edge(names[a].clone(), names[b].clone());
        }
    } else {
        while g.edges.len() < m {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                g.add_edge(names[a].clone(), names[b].clone());
            }
        }
    }
    g
}

/// Each relation of `schema` gets `m` random tuples over `d0..d{n-1}`
/// (duplicates collapse).
pub fn gen_random_db(schema: &BTreeMap<String, usize>, n: usize, m: usize, seed: u64) -> Database {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut db = Database::new();
    for (sym, &arity) in schema {
        db.declare(sym, arity).unwrap();
        if n == 0 && arity > 0 {
            continue;
        }
        for _ in 0..m {
            let t = (0..arity)
                .map(|_| Value::atomic(format!("d{}", rng.gen_range(0..n))))
                .collect();
            db.insert(sym, t).unwrap();
        }
    }
    db
}

/// Tripartite graph with parts `u0..`, `v0..`, `w0..`; every pair in
/// U×V, V×W and W×U becomes an edge (in that direction) with probability `p`.
pub fn gen_tripartite(nu: usize, nv: usize, nw: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let part = |c: char, n: usize| -> Vec<String> { (0..n).map(|i| format!("{c}{i}")).collect() };
    let (us, vs, ws) = (part('u', nu), part('v', nv), part('w', nw));
    let mut g = Graph::new();
    for v in us.iter().chain(&vs).chain(&ws) {
        g.add_vertex(v.clone());
    }
    for (from, to) in [(&us, &vs), (&vs, &ws), (&ws, &us)] {
        for a in from {
            for b in to {
                if rng.gen_bool(p.clamp(0.0, 1.0)) {
                    g.add_edge(a.clone(), b.clone());
                }
            }
        }
    }
    let set = |v: &Vec<String>| v.iter().cloned().collect::<BTreeSet<_>>();
    g.parts = Some([set(&us), set(&vs), set(&ws)]);
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isolated_vertices() {
        let g = gen_random_graph(5, 0, 7);
        assert_eq!(g.vertices.len(), 5);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn same_seed_same_graph() {
        assert_eq!(gen_random_graph(20, 40, 3), gen_random_graph(20, 40, 3));
        assert_ne!(gen_random_graph(20, 40, 3).edges, gen_random_graph(20, 40, 4).edges);
    }

    #[test]
    fn dense_request_is_capped() {
        assert_eq!(gen_random_graph(4, 100, 1).edges.len(), 12);
    }

    #[test]
    fn tripartite_part_sizes() {
        let g = gen_tripartite(100, 10, 10, 0.3, 9);
        let p = g.parts.as_ref().unwrap();
        assert_eq!([p[0].len(), p[1].len(), p[2].len()], [100, 10, 10]);
        assert!(g.is_valid());
    }

    #[test]
    fn graph_text_round_trip() {
        let g = gen_tripartite(3, 2, 2, 0.5, 1);
        assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
        let h = gen_random_graph(6, 4, 2);
        assert_eq!(parse_graph(&serialize_graph(&h)).unwrap(), h);
    }

    #[test]
    fn bot_is_rejected() {
        assert!(matches!(parse_graph("a bot\n"), Err(ReductionError::ReservedToken(_))));
        assert!(parse_graph("a b c\n").is_err());
    }
}
