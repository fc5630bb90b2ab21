//! Hardness constructions made executable: self-join-free relabeling, the
//! pair encoding, triangle and unbalanced-triangle gadget databases with
//! their decoders, and seeded instance generators.

mod gadgets;
mod graph;
mod relabel;
mod workload;

use thiserror::Error;

use crate::qmodel::ModelError;

pub use self::gadgets::{Gadget, GadgetAnswer, GadgetLabel};
pub use self::graph::{gen_random_db, gen_random_graph, gen_tripartite, parse_graph, serialize_graph, Graph};
pub use self::workload::Workload;
pub use self::relabel::{
    decode_solution, duplicate_db, encoding_trick, relabel_self_join_free, DecodedAnswer, EndoClass, OccurrenceMap,
};

/// The sentinel element of the untangling gadget.
pub const BOT: &str = "bot";

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("graph line {line}: {msg}")]
    GraphSyntax { line: usize, msg: String },
    #[error("vertex name {0:?} is reserved or not a plain token")]
    ReservedToken(String),
    #[error("graph has no U/V/W partition")]
    PartsMissing,
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("value {0} is not a pair")]
    NonPair(String),
    #[error("value {0} is already a pair")]
    NonAtomic(String),
    #[error("tuple is not an answer over the given database")]
    NotAnAnswer,
    #[error("variable part is not an endomorphism")]
    NotEndomorphism,
    #[error(transparent)]
    Model(#[from] ModelError),
}
