use std::fmt;

use serde::Serialize;

use super::acyclic::{gyo_acyclic, is_acyclic, is_free_connex, JoinTree};
use super::core::{core, full_core, is_minimal, minimal_form};
use super::hom::{isomorphism, VarMap};
use super::images::{
    has_nested_images, hardness_transfer, images, is_mirror, is_untangleable, Image,
    MirrorWitness, Untangleability, DEFAULT_UNTANGLE_BUDGET,
};
use crate::fixtures;
use crate::qmodel::Query;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    FirstSolution,
    Evaluation,
    LinearDelay,
    ConstantDelay,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::FirstSolution => "first-solution",
            Problem::Evaluation => "evaluation",
            Problem::LinearDelay => "linear-delay",
            Problem::ConstantDelay => "constant-delay",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictLabel {
    #[serde(rename = "yes")]
    Yes,
    #[serde(rename = "conditionally hard")]
    ConditionallyHard,
    #[serde(rename = "unknown")]
    Unknown,
}

impl fmt::Display for VerdictLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictLabel::Yes => "yes",
            VerdictLabel::ConditionallyHard => "conditionally hard",
            VerdictLabel::Unknown => "unknown",
        })
    }
}

/// The fine-grained hypothesis a hardness verdict rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Assumption {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "sHyperclique")]
    SHyperclique,
    #[serde(rename = "BMM+Hyperclique")]
    BmmHyperclique,
    #[serde(rename = "UTD")]
    Utd,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Assumption::None => "none",
            Assumption::SHyperclique => "sHyperclique",
            Assumption::BmmHyperclique => "BMM+Hyperclique",
            Assumption::Utd => "UTD",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub problem: Problem,
    pub verdict: VerdictLabel,
    pub assumption: Assumption,
    pub citation: String,
}

impl Verdict {
    fn yes(problem: Problem, citation: &str) -> Self {
        Verdict {
            problem,
            verdict: VerdictLabel::Yes,
            assumption: Assumption::None,
            citation: citation.to_string(),
        }
    }

    fn hard(problem: Problem, assumption: Assumption, citation: &str) -> Self {
        Verdict {
            problem,
            verdict: VerdictLabel::ConditionallyHard,
            assumption,
            citation: citation.to_string(),
        }
    }

    fn unknown(problem: Problem) -> Self {
        Verdict {
            problem,
            verdict: VerdictLabel::Unknown,
            assumption: Assumption::None,
            citation: "no applicable criterion".to_string(),
        }
    }

    /// `yes (free-connex)`, `conditionally hard (UTD; ...)`, `unknown`.
    pub fn describe(&self) -> String {
        match self.verdict {
            VerdictLabel::Yes => format!("yes ({})", self.citation),
            VerdictLabel::ConditionallyHard => {
                format!("conditionally hard ({}; {})", self.assumption, self.citation)
            }
            VerdictLabel::Unknown => "unknown".to_string(),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.problem, self.describe())
    }
}

/// Queries whose status is settled individually rather than by a general
/// criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Registered {
    TwoLoops,
    TwoTriangles,
    SpikeQ2,
    SpikeQ3,
    Blowfish,
    SpikeQ4,
    Fig1,
    OverlapHard,
}

impl Registered {
    pub const ALL: [Registered; 8] = [
        Registered::TwoLoops,
        Registered::TwoTriangles,
        Registered::SpikeQ2,
        Registered::SpikeQ3,
        Registered::Blowfish,
        Registered::SpikeQ4,
        Registered::Fig1,
        Registered::OverlapHard,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Registered::TwoLoops => "TWO_LOOPS",
            Registered::TwoTriangles => "TWO_TRIANGLES",
            Registered::SpikeQ2 => "SPIKE_Q2",
            Registered::SpikeQ3 => "SPIKE_Q3",
            Registered::Blowfish => "BLOWFISH",
            Registered::SpikeQ4 => "SPIKE_Q4",
            Registered::Fig1 => "FIG1",
            Registered::OverlapHard => "OVERLAP_HARD",
        }
    }

    pub fn query(self) -> Query {
        fixtures::query(match self {
            Registered::TwoLoops => fixtures::TWO_LOOPS,
            Registered::TwoTriangles => fixtures::TWO_TRIANGLES,
            Registered::SpikeQ2 => fixtures::SPIKE_Q2,
            Registered::SpikeQ3 => fixtures::SPIKE_Q3,
            Registered::Blowfish => fixtures::BLOWFISH,
            Registered::SpikeQ4 => fixtures::SPIKE_Q4,
            Registered::Fig1 => fixtures::FIG1,
            Registered::OverlapHard => fixtures::OVERLAP_HARD,
        })
    }

    /// Whether a bespoke enumeration strategy exists for this query.
    pub fn has_strategy(self) -> bool {
        matches!(
            self,
            Registered::TwoLoops | Registered::TwoTriangles | Registered::SpikeQ2 | Registered::SpikeQ3
        )
    }

    fn verdicts(self) -> Vec<Verdict> {
        use Problem::*;
        let bespoke = format!("bespoke {}", self.id());
        match self {
            Registered::TwoLoops | Registered::TwoTriangles => vec![Verdict::yes(LinearDelay, &bespoke)],
            Registered::SpikeQ2 | Registered::SpikeQ3 => vec![Verdict::yes(ConstantDelay, &bespoke)],
            Registered::Blowfish => vec![Verdict::hard(
                ConstantDelay,
                Assumption::SHyperclique,
                "triangle encoding into the spike-free cycle",
            )],
            Registered::SpikeQ4 => vec![Verdict::hard(
                ConstantDelay,
                Assumption::Utd,
                "unbalanced triangle encoding",
            )],
            Registered::Fig1 => vec![Verdict::hard(
                ConstantDelay,
                Assumption::SHyperclique,
                "triangle encoding with red middle node",
            )],
            Registered::OverlapHard => vec![Verdict::hard(
                LinearDelay,
                Assumption::SHyperclique,
                "triangle encoding across overlapping images",
            )],
        }
    }
}

/// Finds the registered query isomorphic to `q` (a full query), with the
/// isomorphism from the registered query's variables to `q`'s.
pub fn lookup_registered(q: &Query) -> Option<(Registered, VarMap)> {
    if !q.is_full() {
        return None;
    }
    let key = super::canon::canonical_key(q);
    Registered::ALL.iter().find_map(|&r| {
        let rq = r.query();
        if super::canon::canonical_key(&rq) != key {
            return None;
        }
        isomorphism(&rq, q).map(|iso| (r, iso))
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub query: Query,
    /// The query the verdicts refer to: the input, or its minimal form.
    pub analyzed: Query,
    pub minimized: bool,
    pub is_full: bool,
    pub is_boolean: bool,
    pub is_unary: bool,
    pub is_binary: bool,
    pub acyclic: bool,
    pub join_tree: Option<JoinTree>,
    pub free_connex: bool,
    pub minimal: bool,
    pub core: Query,
    pub core_acyclic: bool,
    pub full_core: Option<Query>,
    pub images: Vec<Image>,
    pub nested_images: Option<bool>,
    pub mirror: Option<MirrorWitness>,
    pub untangleable: Option<Untangleability>,
    pub hardness_witness: Option<(Image, Query)>,
    pub registered: Option<Registered>,
    pub verdicts: Vec<Verdict>,
}

impl ClassificationReport {
    pub fn verdict(&self, p: Problem) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.problem == p)
    }

    /// One-line enumeration summary, e.g. `constant delay (mirror)`.
    pub fn enumeration_summary(&self) -> String {
        let lin = self.verdict(Problem::LinearDelay);
        let con = self.verdict(Problem::ConstantDelay);
        match (lin, con) {
            (_, Some(c)) if c.verdict == VerdictLabel::Yes => format!("constant delay ({})", c.citation),
            (Some(l), c) if l.verdict == VerdictLabel::Yes => {
                let mut s = format!("linear delay ({})", l.citation);
                if let Some(c) = c.filter(|c| c.verdict == VerdictLabel::ConditionallyHard) {
                    s.push_str(&format!(
                        "; constant delay conditionally hard ({}; {})",
                        c.assumption, c.citation
                    ));
                }
                s
            }
            (Some(l), _) if l.verdict == VerdictLabel::ConditionallyHard => {
                format!("conditionally hard ({}; {})", l.assumption, l.citation)
            }
            (_, Some(c)) if c.verdict == VerdictLabel::ConditionallyHard => {
                format!("constant delay conditionally hard ({}; {})", c.assumption, c.citation)
            }
            _ => "unknown".to_string(),
        }
    }

    pub fn untangle_status(&self) -> &'static str {
        match &self.untangleable {
            None => "n/a",
            Some(Untangleability::Yes(_)) => "yes",
            Some(Untangleability::No) => "no within progressing search",
            Some(Untangleability::Unknown) => "unknown",
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let yn = |b: bool| if b { "yes" } else { "no" };
        s.push_str(&format!("query: {}\n", self.query));
        if self.minimized {
            s.push_str(&format!("minimized to: {}\n", self.analyzed));
        }
        s.push_str(&format!(
            "full: {}  boolean: {}  unary: {}  binary: {}\n",
            yn(self.is_full),
            yn(self.is_boolean),
            yn(self.is_unary),
            yn(self.is_binary)
        ));
        s.push_str(&format!(
            "acyclic: {}  free-connex: {}  minimal: {}\n",
            yn(self.acyclic),
            yn(self.free_connex),
            yn(self.minimal)
        ));
        s.push_str(&format!("core: {} ({})\n", self.core, if self.core_acyclic { "acyclic" } else { "cyclic" }));
        if let Some(fc) = &self.full_core {
            s.push_str(&format!("full-core: {fc}\n"));
        }
        if self.is_full {
            s.push_str(&format!("images: {}\n", self.images.len()));
            for img in &self.images {
                s.push_str(&format!("  {}\n", img.query));
            }
            if let Some(n) = self.nested_images {
                s.push_str(&format!("nested images: {}\n", yn(n)));
            }
            s.push_str(&format!("untangleable: {}\n", self.untangle_status()));
            match &self.mirror {
                Some(m) => s.push_str(&format!("mirror: yes, image {}\n", m.image)),
                None => s.push_str("mirror: no\n"),
            }
            if let Some((img, q2)) = &self.hardness_witness {
                s.push_str(&format!("hardness transfer: image {} leaves {}\n", img.query, q2));
            }
        }
        if let Some(r) = self.registered {
            s.push_str(&format!("registered: {}\n", r.id()));
        }
        for v in &self.verdicts {
            s.push_str(&format!("{v}\n"));
        }
        s.push_str(&format!("enumeration: {}\n", self.enumeration_summary()));
        s
    }
}

fn set(verdicts: &mut Vec<Verdict>, v: Verdict) {
    if !verdicts.iter().any(|w| w.problem == v.problem) {
        verdicts.push(v);
    }
}

/// Structural facts and per-problem verdicts. Non-minimal queries are
/// replaced by their minimal form first.
pub fn classify(q: &Query) -> ClassificationReport {
    use Problem::*;
    let minimal_input = is_minimal(q);
    let a = if minimal_input { q.clone() } else { minimal_form(q) };
    let arity = a.free_vars().len();
    let is_full = a.is_full();
    let join_tree = gyo_acyclic(&a);
    let acyclic = join_tree.is_some();
    let free_connex = is_free_connex(&a);
    let core_q = core(&a);
    let core_acyclic = is_acyclic(&core_q);

    let mut report = ClassificationReport {
        query: q.clone(),
        analyzed: a.clone(),
        minimized: !minimal_input,
        is_full,
        is_boolean: arity == 0,
        is_unary: arity == 1,
        is_binary: arity == 2,
        acyclic,
        join_tree,
        free_connex,
        minimal: minimal_input,
        core: core_q,
        core_acyclic,
        full_core: None,
        images: Vec::new(),
        nested_images: None,
        mirror: None,
        untangleable: None,
        hardness_witness: None,
        registered: None,
        verdicts: Vec::new(),
    };
    let mut v = Vec::new();

    if is_full {
        report.full_core = Some(full_core(&a));
        if let Ok(imgs) = images(&a) {
            report.nested_images = Some(has_nested_images(&imgs));
            report.images = imgs;
        }
        report.registered = lookup_registered(&a).map(|(r, _)| r);
        if core_acyclic {
            report.mirror = is_mirror(&a).ok().flatten();
            report.untangleable = Some(is_untangleable(&a, DEFAULT_UNTANGLE_BUDGET));
            report.hardness_witness = hardness_transfer(&a).ok().flatten();
        }
    }

    if !core_acyclic {
        let c = "cyclic core";
        v.push(Verdict::hard(FirstSolution, Assumption::SHyperclique, c));
        if arity <= 1 {
            v.push(Verdict::hard(Evaluation, Assumption::SHyperclique, c));
        }
        v.push(Verdict::hard(LinearDelay, Assumption::SHyperclique, c));
        v.push(Verdict::hard(ConstantDelay, Assumption::SHyperclique, c));
        report.verdicts = v;
        return report;
    }
    v.push(Verdict::yes(FirstSolution, "acyclic core"));

    if arity <= 1 {
        if acyclic {
            v.push(Verdict::yes(Evaluation, "acyclic, semi-join reduction"));
            v.push(Verdict::yes(ConstantDelay, "free-connex"));
        } else {
            let c = "Boolean/unary dichotomy for minimal queries";
            v.push(Verdict::hard(Evaluation, Assumption::SHyperclique, c));
            v.push(Verdict::hard(ConstantDelay, Assumption::SHyperclique, c));
        }
    }
    if arity == 2 {
        if free_connex {
            v.push(Verdict::yes(ConstantDelay, "free-connex"));
        } else {
            v.push(Verdict::hard(
                ConstantDelay,
                Assumption::BmmHyperclique,
                "binary dichotomy for minimal queries",
            ));
        }
    }
    if free_connex {
        set(&mut v, Verdict::yes(ConstantDelay, "free-connex"));
    }
    if acyclic {
        set(&mut v, Verdict::yes(LinearDelay, "acyclic"));
    }

    if is_full {
        if report.mirror.is_some() {
            set(&mut v, Verdict::yes(ConstantDelay, "mirror"));
        }
        if let Some(r) = report.registered {
            for rv in r.verdicts() {
                set(&mut v, rv);
            }
        }
        if v.iter().any(|x| x.problem == ConstantDelay && x.verdict == VerdictLabel::Yes) {
            set(&mut v, Verdict::yes(LinearDelay, "implied by constant delay"));
        }
        match &report.untangleable {
            Some(Untangleability::Yes(_)) => set(&mut v, Verdict::yes(LinearDelay, "untangleable")),
            Some(Untangleability::No) if report.nested_images == Some(true) => set(
                &mut v,
                Verdict::hard(LinearDelay, Assumption::SHyperclique, "nested images, not untangleable"),
            ),
            _ => {}
        }
        if report.hardness_witness.is_some() {
            set(
                &mut v,
                Verdict::hard(LinearDelay, Assumption::SHyperclique, "hardness transfer to a cyclic-core image complement"),
            );
        }
        if let Some(l) = v.iter().find(|x| x.problem == LinearDelay && x.verdict == VerdictLabel::ConditionallyHard).cloned() {
            set(&mut v, Verdict::hard(ConstantDelay, l.assumption, &l.citation));
        }
    }
    set(&mut v, Verdict::unknown(LinearDelay));
    set(&mut v, Verdict::unknown(ConstantDelay));
    v.sort_by_key(|x| x.problem as u8);
    report.verdicts = v;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;

    fn enumeration(text: &str) -> String {
        classify(&query(text)).enumeration_summary()
    }

    #[test]
    fn rev_has_cyclic_core() {
        let r = classify(&query(REV));
        assert!(!r.core_acyclic);
        assert_eq!(
            r.verdict(Problem::FirstSolution).unwrap().to_string(),
            "first-solution: conditionally hard (sHyperclique; cyclic core)"
        );
    }

    #[test]
    fn diamond_is_constant() {
        assert_eq!(enumeration(DIAMOND), "constant delay (mirror)");
    }

    #[test]
    fn fig1_linear_not_constant() {
        let s = enumeration(FIG1);
        assert!(s.starts_with("linear delay (untangleable); constant delay conditionally hard"), "{s}");
    }

    #[test]
    fn path_projection_is_not_free_connex() {
        let r = classify(&query(PATH2P));
        assert!(r.is_binary);
        assert_eq!(r.verdict(Problem::ConstantDelay).unwrap().verdict, VerdictLabel::ConditionallyHard);
        assert_eq!(r.verdict(Problem::LinearDelay).unwrap().verdict, VerdictLabel::Yes);
    }

    #[test]
    fn non_minimal_input_is_minimized() {
        let r = classify(&query("Q(x) :- R(x,y), R(x,z)."));
        assert!(r.minimized);
        assert_eq!(r.analyzed.atoms().len(), 1);
    }
}
