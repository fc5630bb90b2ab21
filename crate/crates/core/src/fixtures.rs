//! Named queries used throughout the tests, the classifier registry and the
//! bespoke enumeration strategies. `R` is a binary edge relation, `P` a
//! unary colour and `S` a ternary relation.

use crate::qmodel::{parse_query, Query};

pub const PATH2F: &str = "Q(x,y,z) :- R(x,y), R(y,z).";
pub const PATH2P: &str = "Q(x,z) :- R(x,y), S(y,z).";
pub const TRIANGLE: &str = "Q(x,y,z) :- R(x,y), R(y,z), R(z,x).";
/// Two length-2 paths from `x` to `y`.
pub const DIAMOND: &str = "Q(x,u,y,v) :- R(x,u), R(u,y), R(x,v), R(v,y).";
/// The diamond with the last edge reversed.
pub const REV: &str = "Q(x,u,y,v) :- R(x,u), R(u,y), R(x,v), R(y,v).";
pub const FIG1: &str = "Q(x,y,z,u) :- R(x,y), R(y,z), R(x,u), R(u,z), P(y).";

/// Eight-cycle around a red node; the spike variants below extend it.
pub const BLOWFISH: &str = "Q(x1,x2,x3,x4,x5,x6,x7,x8) :- \
    R(x1,x2), R(x2,x3), R(x4,x3), R(x5,x4), R(x5,x6), R(x6,x7), R(x1,x8), R(x8,x7), P(x2).";
pub const SPIKE_Q2: &str = "Q(x1,x2,x3,x4,x5,x6,x7,x8,s4,s6) :- \
    R(x1,x2), R(x2,x3), R(x4,x3), R(x5,x4), R(x5,x6), R(x6,x7), R(x1,x8), R(x8,x7), P(x2), \
    R(x5,s6), R(s4,x7).";
pub const SPIKE_Q3: &str = "Q(x1,x2,x3,x4,x5,x6,x7,x8,s1,s2,s3,s5,s6,s7) :- \
    R(x1,x2), R(x2,x3), R(x4,x3), R(x5,x4), R(x5,x6), R(x6,x7), R(x1,x8), R(x8,x7), P(x2), \
    R(x1,s1), R(s2,x3), R(x8,s3), R(s5,x4), R(x5,s6), R(x5,s7).";
pub const SPIKE_Q4: &str = "Q(x1,x2,x3,x4,x5,x6,x7,x8,s1,s2,s3,s5,s6,s7) :- \
    R(x1,x2), R(x2,x3), R(x4,x3), R(x5,x4), R(x5,x6), R(x6,x7), R(x1,x8), R(x8,x7), P(x2), \
    R(x1,s1), R(s2,x3), R(x8,s3), R(x4,s5), R(x5,s6), R(x5,s7).";

/// Not untangleable: a triangle hanging off a ternary-covered triangle.
pub const UNTANGLE_Q2: &str = "Q(u,b,c,d,v,x,y,z) :- \
    R(u,b), R(b,c), R(c,d), R(d,b), R(c,v), S(b,c,d), R(y,v), R(x,y), R(y,z), R(z,x), R(u,x).";
/// `UNTANGLE_Q2` with one more edge into `v`, which makes it untangleable.
pub const UNTANGLE_Q1: &str = "Q(u,b,c,d,v,x,y,z,i) :- \
    R(u,b), R(b,c), R(c,d), R(d,b), R(c,v), S(b,c,d), R(y,v), R(x,y), R(y,z), R(z,x), R(u,x), \
    R(i,v).";
/// Untangleable through a chain of three nested images.
pub const UNTANGLE_CHAIN: &str = "Q(a,b,c,d,e,f,g) :- \
    S(a,b,c), R(a,b), R(a,c), R(c,b), R(a,d), R(d,b), R(e,f), R(e,d), R(d,f), R(e,g), R(g,f).";
/// Overlapping top and bottom images; linear delay is conditionally hard.
pub const OVERLAP_HARD: &str = "Q(a,b,c,d,e,f,g,h) :- \
    S(a,g,h), R(a,g), R(g,h), R(h,a), R(a,b), R(b,d), R(d,e), R(e,b), R(a,c), R(c,d), R(d,f), \
    R(f,c).";
pub const TWO_LOOPS: &str =
    "Q(a,b,c,d,e) :- R(a,a), R(a,b), R(b,c), R(c,a), R(d,d), R(d,c), R(c,e), R(e,d).";
pub const TWO_TRIANGLES: &str =
    "Q(a,b,c,d) :- R(b,c), R(c,a), R(a,b), R(a,a), R(d,b), R(d,c), R(d,d).";
/// Open: neither the easy nor the hard techniques apply.
pub const OPEN_LOOPS: &str =
    "Q(a,b,c,d,e) :- R(a,b), R(b,c), R(c,d), R(d,a), R(e,a), R(e,c), R(d,d), R(e,e).";
/// Open: a twenty-cycle with alternating orientation that is not a mirror.
pub const TWENTY_CYCLE: &str = "Q(a,b,c,d,e,f,g,h,i,j,k,l,m,n,o,p,q,r,s,t) :- \
    R(a,b), R(b,c), R(d,c), R(e,d), R(e,f), R(g,f), R(g,h), R(h,i), R(j,i), R(j,k), \
    R(l,k), R(m,l), R(m,n), R(o,n), R(o,p), R(p,q), R(r,q), R(r,s), R(t,s), R(a,t).";

/// Every named fixture with its identifier.
pub const ALL: &[(&str, &str)] = &[
    ("PATH2F", PATH2F),
    ("PATH2P", PATH2P),
    ("TRIANGLE", TRIANGLE),
    ("DIAMOND", DIAMOND),
    ("REV", REV),
    ("FIG1", FIG1),
    ("BLOWFISH", BLOWFISH),
    ("SPIKE_Q2", SPIKE_Q2),
    ("SPIKE_Q3", SPIKE_Q3),
    ("SPIKE_Q4", SPIKE_Q4),
    ("UNTANGLE_Q1", UNTANGLE_Q1),
    ("UNTANGLE_Q2", UNTANGLE_Q2),
    ("UNTANGLE_CHAIN", UNTANGLE_CHAIN),
    ("OVERLAP_HARD", OVERLAP_HARD),
    ("TWO_LOOPS", TWO_LOOPS),
    ("TWO_TRIANGLES", TWO_TRIANGLES),
    ("OPEN_LOOPS", OPEN_LOOPS),
    ("TWENTY_CYCLE", TWENTY_CYCLE),
];

/// Parses a fixture constant; panics on malformed fixture text.
pub fn query(text: &str) -> Query {
    parse_query(text).expect("fixture parses")
}

pub fn by_name(name: &str) -> Option<Query> {
    ALL.iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(_, t)| query(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_parse() {
        for (name, text) in ALL {
            let q = parse_query(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(q.is_full() || *name == "PATH2P", "{name}");
        }
    }
}
