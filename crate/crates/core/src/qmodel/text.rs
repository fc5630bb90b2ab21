use std::fmt::Write;

use super::{AnswerTuple, Database, Query};

pub fn serialize_query(q: &Query) -> String {
    let mut s = String::from("Q(");
    for (i, v) in q.free_vars().iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(v.as_str());
    }
    s.push(')');
    if !q.atoms().is_empty() {
        s.push_str(" :- ");
        for (i, a) in q.atoms().iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            write!(s, "{a}").unwrap();
        }
    }
    s.push('.');
    s
}

/// One fact per line, relations and tuples in sorted order.
pub fn serialize_database(db: &Database) -> String {
    let mut s = String::new();
    for (name, rel) in db.relations() {
        for t in &rel.tuples {
            s.push_str(name);
            s.push('(');
            for (i, v) in t.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                write!(s, "{v}").unwrap();
            }
            s.push_str(").\n");
        }
    }
    s
}

/// `v1, v2, ...`; the empty (Boolean) answer prints as `()`.
pub fn format_answer(a: &AnswerTuple) -> String {
    if a.is_empty() {
        return "()".to_string();
    }
    let parts: Vec<String> = a.values().iter().map(|v| v.to_string()).collect();
    parts.join(", ")
}

pub fn serialize_answers<'a>(answers: impl IntoIterator<Item = &'a AnswerTuple>) -> String {
    let mut s = String::new();
    for a in answers {
        s.push_str(&format_answer(a));
        s.push('\n');
    }
    s
}
